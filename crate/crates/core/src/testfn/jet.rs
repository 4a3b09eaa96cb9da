use std::ops::{Add, Mul, Neg, Sub};

/// Truncated Taylor series `Σ c_k ε^k`, `c_k = f^{(k)}/k!`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

impl Jet {
    pub fn constant(v: f64, degree: usize) -> Self {
        let mut c = vec![0.0; degree + 1];
        c[0] = v;
        Jet { c }
    }

    /// The independent variable at `t`.
    pub fn variable(t: f64, degree: usize) -> Self {
        let mut j = Self::constant(t, degree);
        if degree > 0 {
            j.c[1] = 1.0;
        }
        j
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `f^{(k)}` at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.c.get(k).map_or(0.0, |&c| c * factorial(k))
    }

    fn degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet { c: self.c.iter().map(|v| v * s).collect() }
    }

    pub fn add_scalar(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    pub fn recip(&self) -> Self {
        let a = &self.c;
        let mut b = vec![0.0; a.len()];
        b[0] = 1.0 / a[0];
        for k in 1..a.len() {
            let s: f64 = (1..=k).map(|i| a[i] * b[k - i]).sum();
            b[k] = -s * b[0];
        }
        Jet { c: b }
    }

    pub fn exp(&self) -> Self {
        let a = &self.c;
        let mut b = vec![0.0; a.len()];
        b[0] = a[0].exp();
        for k in 1..a.len() {
            let s: f64 = (1..=k).map(|i| i as f64 * a[i] * b[k - i]).sum();
            b[k] = s / k as f64;
        }
        Jet { c: b }
    }

    pub fn ln(&self) -> Self {
        let a = &self.c;
        let mut b = vec![0.0; a.len()];
        b[0] = a[0].ln();
        for k in 1..a.len() {
            let s: f64 = (1..k).map(|i| i as f64 * b[i] * a[k - i]).sum();
            b[k] = (a[k] - s / k as f64) / a[0];
        }
        Jet { c: b }
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let d = self.degree().min(rhs.degree());
        let c = (0..=d).map(|k| (0..=k).map(|i| self.c[i] * rhs.c[k - i]).sum()).collect();
        Jet { c }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_sine_like_series() {
        // d^k/dt^k e^{2t} = 2^k e^{2t}
        let t = Jet::variable(0.3, 6);
        let e = t.scale(2.0).exp();
        for k in 0..=6 {
            let exact = 2f64.powi(k as i32) * 0.6f64.exp();
            assert!((e.derivative(k) - exact).abs() < 1e-12 * exact);
        }
    }

    #[test]
    fn ln_and_recip_compose() {
        // ln(1/t) = −ln t; derivatives (−1)^k (k−1)!/t^k with a sign flip
        let t = Jet::variable(1.7, 5);
        let a = t.recip().ln();
        let b = -&t.ln();
        for k in 0..=5 {
            assert!((a.derivative(k) - b.derivative(k)).abs() < 1e-12);
        }
        assert!((t.ln().derivative(3) - 2.0 / 1.7f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn product_rule() {
        let t = Jet::variable(0.5, 3);
        let sq = &t * &t;
        assert_eq!(sq.derivative(0), 0.25);
        assert_eq!(sq.derivative(1), 1.0);
        assert_eq!(sq.derivative(2), 2.0);
        assert_eq!(sq.derivative(3), 0.0);
        let diff = &sq - &t;
        assert_eq!((&diff + &t).derivative(2), 2.0);
    }
}
