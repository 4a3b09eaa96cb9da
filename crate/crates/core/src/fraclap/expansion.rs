use crate::error::{Error, Result};
use crate::rational::Rational;

/// `⟨x/R⟩^{−q}` with `⟨x⟩ = (1+|x|²)^{1/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyDecayFunction {
    q: Rational,
    scale: f64,
}

impl PolyDecayFunction {
    /// Requires `q > n` so the function is integrable on ℝⁿ.
    pub fn new(q: Rational, n: u32) -> Result<Self> {
        if q <= Rational::from_integer(n as i64) {
            return Err(Error::Domain(format!("decay exponent q = {q} must exceed n = {n}")));
        }
        Ok(PolyDecayFunction { q, scale: 1.0 })
    }

    pub fn with_scale(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("scale must be positive, got {r}")));
        }
        self.scale = r;
        Ok(self)
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn eval_norm(&self, r: f64) -> f64 {
        japanese(r / self.scale).powf(-self.q.to_f64())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_norm(norm(x))
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `⟨r⟩ = (1+r²)^{1/2}`.
pub fn japanese(r: f64) -> f64 {
    r.hypot(1.0)
}

/// `(−Δ)^k ⟨x⟩^{−q} = Σ_i c_i ⟨x⟩^{−(q+2k+2i)}`, `i = 0..=k`, exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecayExpansion {
    base: Rational,
    power: u32,
    coefficients: Vec<Rational>,
}

impl DecayExpansion {
    /// The function `⟨x⟩^{−q}` itself.
    pub fn identity(q: Rational) -> Self {
        DecayExpansion { base: q, power: 0, coefficients: vec![Rational::one()] }
    }

    pub fn base(&self) -> &Rational {
        &self.base
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    /// Exponents `q + 2k + 2i` matching [`Self::coefficients`].
    pub fn exponents(&self) -> Vec<Rational> {
        let lead = &self.base + Rational::from_integer(2 * self.power as i64);
        (0..self.coefficients.len()).map(|i| &lead + Rational::from_integer(2 * i as i64)).collect()
    }

    /// One more application of `−Δ` in ℝⁿ:
    /// `−Δ⟨x⟩^{−r} = −r(r+2−n)⟨x⟩^{−r−2} + r(r+2)⟨x⟩^{−r−4}`.
    pub fn neg_laplacian(&self, n: u32) -> Self {
        let n = Rational::from_integer(n as i64);
        let mut next = vec![Rational::zero(); self.coefficients.len() + 1];
        for (i, (c, r)) in self.coefficients.iter().zip(self.exponents()).enumerate() {
            let r2 = &r + Rational::from_integer(2);
            next[i] = &next[i] - c * &r * (&r2 - &n);
            next[i + 1] = &next[i + 1] + c * &r * &r2;
        }
        DecayExpansion { base: self.base.clone(), power: self.power + 1, coefficients: next }
    }

    pub fn eval_norm(&self, r: f64) -> f64 {
        self.to_power_sum().eval_norm(r)
    }

    pub fn to_power_sum(&self) -> PowerSum {
        PowerSum::new(
            self.exponents()
                .iter()
                .zip(&self.coefficients)
                .map(|(e, c)| (e.to_f64(), c.to_f64()))
                .collect(),
        )
    }
}

/// Exact coefficients of `(−Δ)^{k_power}⟨x⟩^{−q}` in ℝⁿ.
pub fn integer_laplacian_coeffs(n: u32, q: &Rational, k_power: u32) -> DecayExpansion {
    (0..k_power).fold(DecayExpansion::identity(q.clone()), |e, _| e.neg_laplacian(n))
}

/// Floating-point sum `Σ c_i ⟨x⟩^{−e_i}`; closed under `−Δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSum {
    terms: Vec<(f64, f64)>,
}

impl PowerSum {
    /// Terms as `(exponent, coefficient)` pairs.
    pub fn new(terms: Vec<(f64, f64)>) -> Self {
        PowerSum { terms }
    }

    pub fn single(exponent: f64) -> Self {
        PowerSum { terms: vec![(exponent, 1.0)] }
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn max_exponent(&self) -> f64 {
        self.terms.iter().map(|t| t.0).fold(0.0, f64::max)
    }

    pub fn min_exponent(&self) -> f64 {
        self.terms.iter().map(|t| t.0).fold(f64::INFINITY, f64::min)
    }

    pub fn eval_norm(&self, r: f64) -> f64 {
        let j2 = 1.0 + r * r;
        self.terms.iter().map(|&(e, c)| c * j2.powf(-0.5 * e)).sum()
    }

    /// Upper bound of `|f|` on `{|y| ≥ r}`; every term is radially decreasing.
    pub fn tail_bound(&self, r: f64) -> f64 {
        let j2 = 1.0 + r * r;
        self.terms.iter().map(|&(e, c)| c.abs() * j2.powf(-0.5 * e)).sum()
    }

    pub fn neg_laplacian(&self, n: u32) -> Self {
        let n = n as f64;
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for &(r, c) in &self.terms {
            terms.push((r + 2.0, -c * r * (r + 2.0 - n)));
            terms.push((r + 4.0, c * r * (r + 2.0)));
        }
        PowerSum { terms }.merged()
    }

    /// Combine equal exponents and drop zero coefficients.
    fn merged(mut self) -> Self {
        self.terms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.terms.len());
        for (e, c) in self.terms {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|t| t.1 != 0.0);
        PowerSum { terms: out }
    }
}
