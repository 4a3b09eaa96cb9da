#![allow(dead_code)]

mod oracles;

#[allow(unused_imports)]
pub use oracles::*;

use critex::sim::SimConfig;
use critex::{Datum, Mode, OperatorSpec, OperatorTerm, Rational, Shape};

pub fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn op(n: i64, m: i64, ell: i64, terms: &[(i64, &str, &str)]) -> OperatorSpec {
    let terms = terms.iter().map(|&(j, a, w)| OperatorTerm::new(j, r(a), r(w))).collect();
    OperatorSpec::new(n, m, ell, Mode::Fractional, terms).unwrap()
}

pub fn heat(n: i64, omega: &str) -> OperatorSpec {
    op(n, 1, 0, &[(0, "1", omega)])
}

/// `u_t + (−Δ)u = |u|^p` on `[−80, 80)` with `N = 1024`, `u_0 = A e^{−x²/2}`.
pub fn heat_sweep_config(amplitude: f64) -> SimConfig {
    SimConfig::new(heat(1, "2"), 2.0, 80.0, 1024, 0.01, 50.0)
        .with_datum(0, Datum::shaped("u0", Shape::Gaussian { amplitude, width: 1.0 }, 1))
}

/// `u_tt + (−Δ)^{1/4}u_t − Δu = |u|^p`, `u_0 = 0`, `u_1 = A e^{−x²/2}`.
pub fn damped_sweep_config(amplitude: f64) -> SimConfig {
    let spec = op(1, 2, 0, &[(0, "1", "2"), (1, "1", "1/2")]);
    SimConfig::new(spec, 2.0, 80.0, 1024, 0.01, 50.0)
        .with_datum(1, Datum::shaped("u1", Shape::Gaussian { amplitude, width: 1.0 }, 1))
}

/// `e^{hA}` for a 2×2 matrix by scaling and squaring of the Taylor series.
pub fn expm2(a: [[f64; 2]; 2], h: f64) -> [[f64; 2]; 2] {
    let norm = a.iter().flatten().map(|v| v.abs()).sum::<f64>() * h;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let s = h / 2f64.powi(squarings);
    let b = [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]];
    let mul = |x: [[f64; 2]; 2], y: [[f64; 2]; 2]| {
        let mut z = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        z
    };
    let mut result = [[1.0, 0.0], [0.0, 1.0]];
    let mut term = result;
    for k in 1..30 {
        term = mul(term, b);
        for i in 0..2 {
            for j in 0..2 {
                term[i][j] /= k as f64;
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mul(result, result);
    }
    result
}

/// Periodic evolution `e^{−t|ξ|^{2σ}}` of 1-D samples by a direct O(N²) DFT.
pub fn direct_heat_evolution(values: &[f64], half_width: f64, sigma: f64, t: f64) -> Vec<f64> {
    use std::f64::consts::PI;
    let n = values.len();
    let mut out = vec![0.0; n];
    for k in 0..n {
        let kk = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
        let xi = PI * kk / half_width;
        let (mut re, mut im) = (0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            let a = -2.0 * PI * (k * j) as f64 / n as f64;
            re += v * a.cos();
            im += v * a.sin();
        }
        let damp = if xi == 0.0 { 1.0 } else { (-t * xi.abs().powf(2.0 * sigma)).exp() };
        for (j, o) in out.iter_mut().enumerate() {
            let a = 2.0 * PI * (k * j) as f64 / n as f64;
            *o += damp * (re * a.cos() - im * a.sin()) / n as f64;
        }
    }
    out
}

/// A random member of one of the model families with its closed-form critical exponent.
pub struct FamilyDraw {
    pub name: &'static str,
    pub spec: OperatorSpec,
    pub p_c: Rational,
    /// Expected optimal scaling, when the family fixes it.
    pub eta: Option<Rational>,
}

/// Random rational strictly inside `(lo, hi)`, denominator ≤ 12 where the
/// interval allows it.
pub fn rational_in<R: rand::Rng>(rng: &mut R, lo: &Rational, hi: &Rational) -> Rational {
    for attempt in 0.. {
        let d: i64 = rng.random_range(1..=12) << (attempt / 8).min(20);
        let dr = Rational::from_integer(d);
        let a = (lo.clone() * &dr).floor_i64() + 1;
        let b = (hi.clone() * &dr).floor_i64();
        let b = if Rational::from_integer(b) == hi.clone() * &dr { b - 1 } else { b };
        if a <= b {
            return Rational::new(rng.random_range(a..=b), d).unwrap();
        }
    }
    unreachable!()
}

fn coefficient<R: rand::Rng>(rng: &mut R) -> Rational {
    Rational::new(rng.random_range(1..=9), rng.random_range(1..=4)).unwrap()
}

fn build(n: i64, m: i64, ell: i64, terms: Vec<(i64, Rational, Rational)>) -> OperatorSpec {
    let terms = terms.into_iter().map(|(j, a, w)| OperatorTerm::new(j, a, w)).collect();
    OperatorSpec::new(n, m, ell, Mode::Fractional, terms).unwrap()
}

pub fn family_draw<R: rand::Rng>(rng: &mut R, kind: usize) -> FamilyDraw {
    let zero = Rational::zero();
    let one = Rational::one();
    let two = Rational::from_integer(2);
    let n: i64 = rng.random_range(1..=3);
    let nr = Rational::from_integer(n);
    match kind {
        0 => {
            let sigma = rational_in(rng, &zero, &nr);
            let p_c = one.clone() + sigma.clone() * &two / &nr;
            let spec = build(n, 1, 0, vec![(0, coefficient(rng), sigma.clone() * &two)]);
            FamilyDraw { name: "heat", spec, p_c, eta: Some(sigma * &two) }
        }
        1 => {
            let sigma = rational_in(rng, &zero, &nr);
            let p_c = one + sigma.clone() * &two / (nr - &sigma);
            let spec = build(n, 2, 0, vec![(0, coefficient(rng), sigma.clone() * &two)]);
            FamilyDraw { name: "undamped", spec, p_c, eta: Some(sigma) }
        }
        2 => {
            let sigma = rational_in(rng, &zero, &Rational::from_integer(4));
            let cap = (sigma.clone() / &two).min(nr.clone() / &two);
            let sigma1 = rational_in(rng, &zero, &cap);
            let p_c = one + sigma.clone() * &two / (nr - sigma1.clone() * &two);
            let eta = (sigma.clone() - &sigma1) * &two;
            let spec =
                build(n, 2, 0, vec![(0, coefficient(rng), sigma * &two), (1, coefficient(rng), sigma1 * &two)]);
            FamilyDraw { name: "effective damping", spec, p_c, eta: Some(eta) }
        }
        3 => {
            let sigma = rational_in(rng, &zero, &Rational::from_integer(4));
            let sigma1 = rational_in(rng, &zero, &(sigma.clone() / &two));
            let p_c = one + sigma1.clone() * &two / &nr;
            let eta = sigma1.clone() * &two;
            let spec =
                build(n, 2, 1, vec![(0, coefficient(rng), sigma * &two), (1, coefficient(rng), sigma1 * &two)]);
            FamilyDraw { name: "effective damping, velocity", spec, p_c, eta: Some(eta) }
        }
        4 => {
            let sigma = rational_in(rng, &zero, &Rational::from_integer(4));
            let sigma1 = rational_in(rng, &(sigma.clone() / &two), &(sigma.clone() + &one));
            let p_c = one + sigma.clone() / &nr;
            let spec = build(
                n,
                2,
                1,
                vec![(0, coefficient(rng), sigma.clone() * &two), (1, coefficient(rng), sigma1 * &two)],
            );
            FamilyDraw { name: "noneffective damping, velocity", spec, p_c, eta: Some(sigma) }
        }
        _ => {
            // Σ_j b_j (−Δ)^{(m−j)θ} ∂ₜ^j with b_0 ≠ 0, σ = mθ, 2σ < n + 2θ
            let m: i64 = rng.random_range(1..=4);
            let cap = nr.clone() / Rational::from_integer(2 * (m - 1)).max(one.clone());
            let theta = rational_in(rng, &zero, &cap.min(Rational::from_integer(2)));
            let mut terms = vec![(0, coefficient(rng), theta.clone() * Rational::from_integer(2 * m))];
            for j in 1..m {
                if rng.random_bool(0.5) {
                    terms.push((j, coefficient(rng), theta.clone() * Rational::from_integer(2 * (m - j))));
                }
            }
            let sigma = theta.clone() * Rational::from_integer(m);
            let p_c = one + sigma.clone() * &two / (nr + theta.clone() * &two - sigma * &two);
            FamilyDraw { name: "quasi-homogeneous", spec: build(n, m, 0, terms), p_c, eta: Some(theta * &two) }
        }
    }
}

/// Random operator with `m ≤ 4`: a random subset of lower terms with
/// spatial orders in `[0, 6]`, denominators ≤ 6.
pub fn random_operator<R: rand::Rng>(rng: &mut R) -> OperatorSpec {
    let n: i64 = rng.random_range(1..=3);
    let m: i64 = rng.random_range(1..=4);
    let ell: i64 = rng.random_range(0..m);
    let mut terms = Vec::new();
    for j in 0..m {
        if rng.random_bool(0.7) {
            let d: i64 = rng.random_range(1..=6);
            let omega = Rational::new(rng.random_range(0..=6 * d), d).unwrap();
            terms.push((j, coefficient(rng), omega));
        }
    }
    build(n, m, ell, terms)
}
