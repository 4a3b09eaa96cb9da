//! Time cutoffs `ψ = χ^{mp′}`, their derivatives and compactly supported
//! primitives, and the scaled families `ψ_R`, `φ_R`.

mod jet;

pub use jet::{factorial, Jet};

use crate::error::{Error, Result};
use crate::fraclap::{japanese, norm};
use crate::quad::Integrator;
use crate::rational::Rational;

/// Beyond this `|u|` the transition has saturated to double precision.
const SATURATION: f64 = 700.0;

/// `E(s) = e^{−1/s}` for `s > 0`, else 0.
fn bump(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// `χ(t) = E(1−t) / (E(1−t) + E(t−½))`: 1 on `[0, ½]`, 0 on `[1, ∞)`.
pub fn chi(t: f64) -> f64 {
    if t <= 0.5 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let (a, b) = (bump(1.0 - t), bump(t - 0.5));
    a / (a + b)
}

/// `1 − χ`, the reversed transition.
pub fn chi_reversed(t: f64) -> f64 {
    if t <= 0.5 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let (a, b) = (bump(1.0 - t), bump(t - 0.5));
    b / (a + b)
}

/// `ψ = χ^{mp′}` together with the scaling `(R, η)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunctionFamily {
    m: u32,
    p: f64,
    eta: Rational,
    r: f64,
}

impl TestFunctionFamily {
    pub fn new(m: u32, p: f64, eta: Rational, r: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("m must be positive".into()));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Domain(format!("p must exceed 1, got {p}")));
        }
        if eta.is_negative() {
            return Err(Error::Domain(format!("η must be non-negative, got {eta}")));
        }
        if !(r >= 1.0) || !r.is_finite() {
            return Err(Error::Domain(format!("R must be at least 1, got {r}")));
        }
        Ok(TestFunctionFamily { m, p, eta, r })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn p_prime(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn eta(&self) -> &Rational {
        &self.eta
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `R^η`, the time dilation of the scaled family.
    pub fn time_scale(&self) -> f64 {
        self.r.powf(self.eta.to_f64())
    }

    /// End of the support of `ψ_R`.
    pub fn support_end(&self) -> f64 {
        self.time_scale()
    }

    fn power(&self) -> f64 {
        self.m as f64 * self.p_prime()
    }

    /// Jet of `ψ` at `t` to the given degree.
    fn psi_jet(&self, t: f64, degree: usize) -> Jet {
        if t <= 0.5 {
            return Jet::constant(1.0, degree);
        }
        if t >= 1.0 {
            return Jet::constant(0.0, degree);
        }
        let x = Jet::variable(t, degree);
        // χ = 1/(1+e^u), u = 1/(1−t) − 1/(t−½)
        let u = &x.scale(-1.0).add_scalar(1.0).recip() - &x.add_scalar(-0.5).recip();
        let u0 = u.value();
        if u0 < -SATURATION {
            return Jet::constant(1.0, degree);
        }
        // ln χ = −ln(1+e^u), written so the exponential never overflows
        let softplus = if u0 > 0.0 { &u + &u.scale(-1.0).exp().add_scalar(1.0).ln() } else { u.exp().add_scalar(1.0).ln() };
        let log_psi = softplus.scale(-self.power());
        if log_psi.value() < -SATURATION {
            return Jet::constant(0.0, degree);
        }
        log_psi.exp()
    }

    fn check_order(&self, order: i32) -> Result<()> {
        if order.unsigned_abs() > self.m {
            return Err(Error::Domain(format!("derivative order {order} outside [−{m}, {m}]", m = self.m)));
        }
        Ok(())
    }

    /// `ψ^{(order)}(t)`; negative orders are the primitives vanishing on `[1, ∞)`:
    /// `ψ^{(−k)}(t) = (−1)^k ∫_t^1 (τ−t)^{k−1}/(k−1)! ψ(τ) dτ`.
    pub fn psi_derivative(&self, order: i32, t: f64) -> Result<f64> {
        self.check_order(order)?;
        if order >= 0 {
            return Ok(self.psi_jet(t, order as usize).derivative(order as usize));
        }
        if t >= 1.0 {
            return Ok(0.0);
        }
        let k = (-order) as i32;
        let norm = factorial(k as usize - 1);
        let integrand = |tau: f64| (tau - t).powi(k - 1) / norm * self.psi_jet(tau, 0).value();
        let breaks: Vec<f64> = if t < 0.5 { vec![t, 0.5, 1.0] } else { vec![t, 1.0] };
        let v = Integrator::new(0.0, 1e-13).integrate_breaks(integrand, &breaks)?.value;
        Ok(if k % 2 == 0 { v } else { -v })
    }

    /// `ψ_R^{(order)}(t) = R^{−order·η} ψ^{(order)}(R^{−η} t)`.
    pub fn scaled_psi(&self, order: i32, t: f64) -> Result<f64> {
        let s = self.time_scale();
        Ok(s.powi(-order) * self.psi_derivative(order, t / s)?)
    }
}

/// Empirical constant in `|ψ^{(order)}| ≤ C ψ^{1/p}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AaaBound {
    pub c_est: f64,
    pub holds: bool,
}

/// Sample `t ∈ [0, 1]` and take the largest ratio `|ψ^{(order)}(t)| / ψ(t)^{1/p}`.
pub fn check_aaa_bound(fam: &TestFunctionFamily, order: i32, samples: usize) -> Result<AaaBound> {
    fam.check_order(order)?;
    let samples = samples.max(2);
    let mut c_est: f64 = 0.0;
    for i in 0..samples {
        let t = i as f64 / (samples - 1) as f64;
        let d = fam.psi_derivative(order, t)?.abs();
        let base = fam.psi_derivative(0, t)?.powf(1.0 / fam.p());
        if d == 0.0 {
            continue;
        }
        c_est = c_est.max(if base > 0.0 { d / base } else { f64::INFINITY });
    }
    Ok(AaaBound { c_est, holds: c_est.is_finite() })
}

/// `φ_R(x) = ⟨x/R⟩^{−q}`.
pub fn phi_scaled(q: &Rational, r: f64, x: &[f64]) -> f64 {
    japanese(norm(x) / r).powf(-q.to_f64())
}

/// CSV with columns `t, psi(-m), …, psi(m)` on `samples` points of `[0, support]`.
pub fn dump_csv(fam: &TestFunctionFamily, samples: usize, scaled: bool) -> Result<String> {
    let m = fam.m() as i32;
    let end = if scaled { fam.support_end() } else { 1.0 };
    let mut out = String::from("t");
    for k in -m..=m {
        out.push_str(&format!(",psi({k})"));
    }
    out.push('\n');
    let samples = samples.max(2);
    for i in 0..samples {
        let t = end * i as f64 / (samples - 1) as f64;
        out.push_str(&format!("{t:?}"));
        for k in -m..=m {
            let v = if scaled { fam.scaled_psi(k, t)? } else { fam.psi_derivative(k, t)? };
            out.push_str(&format!(",{v:?}"));
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(m: u32, p: f64, eta: &str, r: f64) -> TestFunctionFamily {
        TestFunctionFamily::new(m, p, eta.parse().unwrap(), r).unwrap()
    }

    #[test]
    fn chi_plateau_and_support() {
        assert_eq!(chi(0.25), 1.0);
        assert_eq!(chi(1.5), 0.0);
        let v = chi(0.75);
        assert!(v > 0.0 && v < 1.0);
        assert!((v + chi_reversed(0.75) - 1.0).abs() < 1e-15);
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn jet_value_matches_power_of_chi() {
        let f = fam(2, 2.0, "1", 1.0);
        for t in [0.55, 0.7, 0.9, 0.99] {
            let direct = chi(t).powf(4.0);
            let v = f.psi_derivative(0, t).unwrap();
            assert!((v - direct).abs() <= 1e-13 * direct.max(1e-300), "{t}");
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let f = fam(3, 1.5, "1", 1.0);
        let h = 1e-5;
        for t in [0.6, 0.75, 0.85] {
            for k in 1..=3 {
                let fd = (f.psi_derivative(k - 1, t + h).unwrap() - f.psi_derivative(k - 1, t - h).unwrap()) / (2.0 * h);
                let ad = f.psi_derivative(k, t).unwrap();
                assert!((fd - ad).abs() < 1e-6 * ad.abs().max(1.0), "t={t} k={k}: {fd} vs {ad}");
            }
        }
    }

    #[test]
    fn primitives_vanish_at_support_end() {
        let f = fam(2, 2.0, "1", 1.0);
        assert_eq!(f.psi_derivative(-1, 1.0).unwrap(), 0.0);
        assert_eq!(f.psi_derivative(-2, 3.0).unwrap(), 0.0);
        assert_eq!(f.psi_derivative(0, 0.0).unwrap(), 1.0);
        for t in [0.1, 0.6, 0.9] {
            assert!(f.psi_derivative(-1, t).unwrap().abs() <= f.psi_derivative(0, t).unwrap());
        }
    }

    #[test]
    fn order_range_is_enforced() {
        let f = fam(2, 2.0, "1", 1.0);
        assert!(f.psi_derivative(3, 0.7).is_err());
        assert!(f.psi_derivative(-3, 0.7).is_err());
    }

    #[test]
    fn scaling_examples() {
        let f = fam(2, 2.0, "2", 10.0);
        assert_eq!(f.scaled_psi(0, 25.0).unwrap(), 1.0);
        let a = f.scaled_psi(-1, 0.0).unwrap();
        let b = 100.0 * f.psi_derivative(-1, 0.0).unwrap();
        assert!((a - b).abs() < 1e-12 * b.abs());
    }

    #[test]
    fn aaa_constants() {
        let f = fam(2, 2.0, "1", 1.0);
        let zero = check_aaa_bound(&f, 0, 1001).unwrap();
        assert!((zero.c_est - 1.0).abs() < 1e-15 && zero.holds);
        assert!(check_aaa_bound(&f, 1, 1001).unwrap().holds);
        let prim = check_aaa_bound(&f, -1, 1001).unwrap();
        assert!(prim.holds && prim.c_est <= 1.0);
    }

    #[test]
    fn phi_values() {
        let q: Rational = "2".parse().unwrap();
        assert_eq!(phi_scaled(&q, 1.0, &[0.0]), 1.0);
        assert!((phi_scaled(&q, 2.0, &[2.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn csv_has_all_orders() {
        let f = fam(1, 2.0, "1", 1.0);
        let csv = dump_csv(&f, 3, false).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,psi(-1),psi(0),psi(1)"));
        assert_eq!(lines.count(), 3);
    }
}
