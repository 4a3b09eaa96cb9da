//! `(−Δ)^s` for `0 < s < 1` on radial sums `Σ c_i ⟨x⟩^{−e_i}` through
//!
//! `(−Δ)^s f(x) = K_{n,s} ∫₀^∞ (f(x) − M_f(x,ρ)) ρ^{−1−2s} dρ`,
//!
//! where `M_f(x,ρ)` is the mean of `f` over the sphere of radius `ρ` about `x`
//! and `K_{n,s} = 2s·4^s Γ(n/2+s) / (Γ(n/2) Γ(1−s))`. The `ρ` axis is split at
//! `max(|x|/2, 1)`. Below a small `δ` the mean is replaced by its Taylor series
//! in `ρ²`, integrated exactly.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::Integrator;
use crate::special::{gamma, gamma_ratio};

use super::expansion::{japanese, norm, PolyDecayFunction, PowerSum};

const TAYLOR_TERMS: u32 = 3;
const MAX_DOUBLINGS: usize = 400;

/// `K_{n,s}`.
pub fn normalization(n: u32, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("fractional order {s} not in (0,1)")));
    }
    Ok(2.0 * s * 4f64.powf(s) * gamma_ratio(n as f64 / 2.0, s)? / gamma(1.0 - s)?)
}

/// `∫₀^π sin^{n−2}θ dθ`.
fn sphere_weight(n: u32) -> f64 {
    PI.sqrt() * gamma_ratio_unchecked((n as f64 - 1.0) / 2.0, 0.5)
}

fn gamma_ratio_unchecked(x: f64, a: f64) -> f64 {
    // Γ(x)/Γ(x+a)
    1.0 / gamma_ratio(x, a).expect("positive arguments")
}

struct Radial<'a> {
    f: &'a PowerSum,
    n: u32,
    r: f64,
    scale: f64,
}

impl Radial<'_> {
    /// Spherical mean of `f` over `|y − x| = ρ`.
    fn mean(&self, rho: f64) -> Result<f64> {
        let (f, r) = (self.f, self.r);
        if self.n == 1 {
            return Ok(0.5 * (f.eval_norm(r + rho) + f.eval_norm((r - rho).abs())));
        }
        if r == 0.0 {
            return Ok(f.eval_norm(rho));
        }
        let power = self.n as i32 - 2;
        let gap = (r - rho) * (r - rho);
        let cross = 4.0 * r * rho;
        // |x + ρω|² = (r−ρ)² + 4rρ cos²(θ/2)
        let integrand = |theta: f64| {
            let c = (0.5 * theta).cos();
            f.eval_norm((gap + cross * c * c).sqrt()) * theta.sin().powi(power)
        };
        let width = (1.0 / (r * rho).sqrt()).min(0.5);
        let breaks = [0.0, PI - 8.0 * width, PI - width, PI];
        let tol = 1e-17 * self.scale;
        let res = Integrator::new(tol, 1e-12).integrate_breaks(integrand, &breaks)?;
        Ok(res.value / sphere_weight(self.n))
    }
}

fn integrate_mean_weighted<F: Fn(f64) -> Result<f64> + Sync>(
    g: F,
    s: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<f64> {
    // Collect the first error raised inside the integrand.
    let mut failure = None;
    let res = Integrator::new(tol, 1e-11).integrate_breaks(
        |rho| match g(rho) {
            Ok(v) => v * rho.powf(-1.0 - 2.0 * s),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        breaks,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(res.value),
    }
}

/// `(−Δ)^s f` at radius `r` for `0 < s < 1`.
fn fractional_part(f: &PowerSum, n: u32, s: f64, r: f64) -> Result<f64> {
    let k = normalization(n, s)?;
    let scale = f.terms().iter().fold(0.0f64, |m, t| m.max(t.1.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let radial = Radial { f, n, r, scale };
    let fx = f.eval_norm(r);
    let split = (0.5 * r).max(1.0);
    let delta = (0.02 * japanese(r) / f.max_exponent().max(1.0)).min(split);

    // ∫₀^δ (f − M) ρ^{−1−2s}, with M − f = Σ ρ^{2k} Δ^k f / (2^k k! n(n+2)⋯(n+2k−2))
    let mut inner = 0.0;
    let mut lap = f.clone();
    let mut denom = 1.0;
    for j in 1..=TAYLOR_TERMS {
        lap = lap.neg_laplacian(n);
        denom *= 2.0 * j as f64 * (n as f64 + 2.0 * j as f64 - 2.0);
        let delta_k = if j % 2 == 0 { 1.0 } else { -1.0 } * lap.eval_norm(r);
        let e = 2.0 * j as f64 - 2.0 * s;
        inner -= delta_k / denom * delta.powf(e) / e;
    }

    let tol = 1e-17 * scale;
    let mut mid_breaks = vec![delta];
    if r > delta && r < split {
        mid_breaks.push(r);
    }
    mid_breaks.push(split);
    let middle = integrate_mean_weighted(|rho| Ok(fx - radial.mean(rho)?), s, &mid_breaks, tol)?;

    // ∫_split^∞ (f(x) − M) ρ^{−1−2s}: the constant part exactly, the mean on
    // panels around the sphere through the origin and then on doubling intervals.
    let mut outer = fx * split.powf(-2.0 * s) / (2.0 * s);
    let mut breaks = vec![split];
    breaks.extend([r - 2.0, r - 1.0, r, r + 1.0, r + 2.0].into_iter().filter(|&b| b > split));
    let mut end = (r + 4.0).max(2.0 * split);
    breaks.push(end);
    outer -= integrate_mean_weighted(|rho| radial.mean(rho), s, &breaks, tol)?;
    for _ in 0..MAX_DOUBLINGS {
        let tail = f.tail_bound(end - r) * end.powf(-2.0 * s) / (2.0 * s);
        if tail <= 1e-14 * (outer.abs() + middle.abs() + inner.abs()) || tail <= 1e-300 {
            return Ok(k * (inner + middle + outer));
        }
        let next = 2.0 * end;
        outer -= integrate_mean_weighted(|rho| radial.mean(rho), s, &[end, next], tol)?;
        end = next;
    }
    Err(Error::QuadratureBudget { tol: 1e-14, budget: MAX_DOUBLINGS })
}

/// `(−Δ)^σ f` at radius `r` for a radial sum in ℝⁿ and any `σ ≥ 0`: the
/// integer part of `σ` is applied exactly, the remainder by quadrature.
pub fn fractional_laplacian_radial(f: &PowerSum, n: u32, sigma: f64, r: f64) -> Result<f64> {
    if n == 0 || !(sigma >= 0.0) || !sigma.is_finite() || !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("invalid arguments n = {n}, σ = {sigma}, |x| = {r}")));
    }
    let whole = sigma.floor();
    let s = sigma - whole;
    let g = (0..whole as u32).fold(f.clone(), |g, _| g.neg_laplacian(n));
    if s == 0.0 {
        return Ok(g.eval_norm(r));
    }
    fractional_part(&g, n, s, r)
}

/// `(−Δ)^σ φ(x)` for `φ = ⟨x/R⟩^{−q}` in ℝⁿ, `n = x.len()`, via
/// `(−Δ)^σ φ_R(x) = R^{−2σ} ((−Δ)^σ φ)(x/R)`.
pub fn singular_quadrature_apply(phi: &PolyDecayFunction, sigma: f64, x: &[f64]) -> Result<f64> {
    let n = x.len() as u32;
    let f = PowerSum::single(phi.q().to_f64());
    let r = phi.scale();
    Ok(r.powf(-2.0 * sigma) * fractional_laplacian_radial(&f, n, sigma, norm(x) / r)?)
}

/// Decay exponent `q_σ`: `q + 2σ` for integer `σ`, else `n + 2(σ − ⌊σ⌋)`.
pub fn decay_exponent(n: u32, sigma: f64, q: f64) -> f64 {
    if sigma.fract() == 0.0 {
        q + 2.0 * sigma
    } else {
        n as f64 + 2.0 * sigma.fract()
    }
}

/// Least-squares decay fit of `|(−Δ)^σ⟨x⟩^{−q}|` for `|x| ∈ [10, 100]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub q_sigma: f64,
    /// Smallest `C` with `|value| ≤ C⟨x⟩^{−q_σ}` on the samples.
    pub constant: f64,
    pub samples: Vec<(f64, f64)>,
    pub holds: bool,
}

impl DecayFit {
    /// Rows `x,value,bound` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value,bound\n");
        for &(x, v) in &self.samples {
            let bound = self.constant * japanese(x).powf(-self.q_sigma);
            out.push_str(&format!("{x:?},{v:?},{bound:?}\n"));
        }
        out
    }
}

pub const DECAY_SLACK: f64 = 0.15;
const DECAY_SAMPLES: usize = 12;

pub fn pointwise_bound_check(n: u32, sigma: f64, q: f64) -> Result<DecayFit> {
    if !(q > n as f64) {
        return Err(Error::Domain(format!("q = {q} must exceed n = {n}")));
    }
    let f = PowerSum::single(q);
    let xs: Vec<f64> = (0..DECAY_SAMPLES)
        .map(|i| 10f64 * 10f64.powf(i as f64 / (DECAY_SAMPLES - 1) as f64))
        .collect();
    let values = xs
        .par_iter()
        .map(|&x| fractional_laplacian_radial(&f, n, sigma, x))
        .collect::<Result<Vec<f64>>>()?;
    if let Some(bad) = values.iter().find(|v| **v == 0.0 || !v.is_finite()) {
        return Err(Error::NonFinite(format!("decay sample {bad}")));
    }
    let pts: Vec<(f64, f64)> = xs.iter().zip(&values).map(|(&x, &v)| (japanese(x).ln(), v.abs().ln())).collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2)));
    let slope = sxy / sxx;
    let q_sigma = decay_exponent(n, sigma, q);
    let constant = xs.iter().zip(&values).map(|(&x, v)| v.abs() * japanese(x).powf(q_sigma)).fold(0.0, f64::max);
    Ok(DecayFit {
        slope,
        q_sigma,
        constant,
        samples: xs.into_iter().zip(values).collect(),
        holds: slope <= -q_sigma + DECAY_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraclap::closed::value_at_origin;
    use crate::rational::Rational;

    #[test]
    fn normalization_one_dimensional_half() {
        assert!((normalization(1, 0.5).unwrap() - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn sphere_weights() {
        assert!((sphere_weight(2) - PI).abs() < 1e-14);
        assert!((sphere_weight(3) - 2.0).abs() < 1e-14);
        assert!((sphere_weight(4) - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn half_laplacian_at_origin() {
        let phi = PolyDecayFunction::new(Rational::from_integer(2), 1).unwrap();
        let v = singular_quadrature_apply(&phi, 0.5, &[0.0]).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn half_laplacian_closed_form_in_one_dimension() {
        // (−Δ)^{1/2} (1+x²)^{−1} = (1−x²)/(1+x²)²
        let f = PowerSum::single(2.0);
        for x in [0.3, 1.0, 2.5, 10.0, 40.0] {
            let v = fractional_laplacian_radial(&f, 1, 0.5, x).unwrap();
            let exact = (1.0 - x * x) / (1.0 + x * x).powi(2);
            assert!((v - exact).abs() < 1e-8 * exact.abs() + 1e-12, "x = {x}: {v} vs {exact}");
        }
    }

    #[test]
    fn two_dimensional_origin() {
        let phi = PolyDecayFunction::new(Rational::from_integer(3), 2).unwrap();
        let v = singular_quadrature_apply(&phi, 0.75, &[0.0, 0.0]).unwrap();
        let exact = value_at_origin(2, 0.75, 3.0).unwrap();
        assert!((v - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn mean_off_origin_in_three_dimensions_is_consistent() {
        // the same point approached along different axes
        let phi = PolyDecayFunction::new(Rational::from_integer(4), 3).unwrap();
        let a = singular_quadrature_apply(&phi, 0.25, &[3.0, 0.0, 0.0]).unwrap();
        let b = singular_quadrature_apply(&phi, 0.25, &[0.0, 0.0, 3.0]).unwrap();
        assert!((a - b).abs() < 1e-14 * a.abs());
    }

    #[test]
    fn integer_sigma_is_exact() {
        let f = PowerSum::single(2.0);
        let v = fractional_laplacian_radial(&f, 1, 1.0, 0.0).unwrap();
        assert_eq!(v, 2.0);
    }
}
