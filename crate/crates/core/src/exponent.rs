//! Critical exponent of `L u = |∂_t^ℓ u|^p` as the maximum of
//! `h(η) = (n+η)/(n+η−g(η))₊`, where `g` is the lower envelope of the
//! scaling lines `(j−ℓ)η + ω_j`.
//!
//! Everything on the main path is exact rational arithmetic. `h` is monotone
//! on every envelope piece, so the maximum is attained at `0`, a breakpoint,
//! or `η = ∞`.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::{json, Value};

use crate::operator::{fractional_part_s, index_set_i, weight_exponent_q, OperatorSpec};
use crate::rational::{ExtendedRational, Rational};

/// The scaling line `(j−ℓ)η + ω_j` of one active term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnvelopeLine {
    pub slope: Rational,
    pub intercept: Rational,
    pub source_j: i64,
}

impl EnvelopeLine {
    pub fn at(&self, eta: &Rational) -> Rational {
        &self.slope * eta + &self.intercept
    }
}

/// One piece of the envelope: `line` is active on `[start, next start]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnvelopePiece {
    pub start: Rational,
    pub line: EnvelopeLine,
}

/// Lower envelope of the scaling lines on `[0, ∞]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Envelope {
    pieces: Vec<EnvelopePiece>,
    lines: Vec<EnvelopeLine>,
    n: u32,
    ell: i64,
}

impl Envelope {
    pub fn pieces(&self) -> &[EnvelopePiece] {
        &self.pieces
    }

    /// All active lines, including those never on the envelope.
    pub fn lines(&self) -> &[EnvelopeLine] {
        &self.lines
    }

    /// `(η_k, j_k)` pairs.
    pub fn breakpoints(&self) -> Vec<(Rational, i64)> {
        self.pieces.iter().map(|p| (p.start.clone(), p.line.source_j)).collect()
    }

    pub fn first_j(&self) -> i64 {
        self.pieces[0].line.source_j
    }

    pub fn last_j(&self) -> i64 {
        self.pieces.last().expect("envelope is never empty").line.source_j
    }

    fn piece_at(&self, eta: &Rational) -> &EnvelopePiece {
        self.pieces.iter().rev().find(|p| &p.start <= eta).unwrap_or(&self.pieces[0])
    }

    /// Exact `g(η)`; at `η = ∞` the limit of the last piece.
    ///
    /// Negative `η` is outside the domain; it is evaluated on the first piece.
    pub fn g(&self, eta: &ExtendedRational) -> ExtendedRational {
        match eta {
            ExtendedRational::Finite(e) => ExtendedRational::Finite(self.piece_at(e).line.at(e)),
            ExtendedRational::Infinity => {
                let last = &self.pieces.last().expect("envelope is never empty").line;
                match last.slope.signum() {
                    1 => ExtendedRational::Infinity,
                    -1 => ExtendedRational::NegInfinity,
                    _ => ExtendedRational::Finite(last.intercept.clone()),
                }
            }
            ExtendedRational::NegInfinity => {
                ExtendedRational::Finite(self.pieces[0].line.intercept.clone())
            }
        }
    }

    /// Exact `h(η) = (n+η)/(n+η−g(η))₊` with `1/0 = ∞`.
    pub fn h(&self, eta: &ExtendedRational) -> ExtendedRational {
        let n = Rational::from_integer(self.n as i64);
        match eta {
            ExtendedRational::Finite(e) => {
                let num = &n + e;
                let g = self.piece_at(e).line.at(e);
                let den = &num - &g;
                if den.is_positive() {
                    ExtendedRational::Finite(num / den)
                } else {
                    ExtendedRational::Infinity
                }
            }
            _ => {
                let jm1 = self.last_j();
                if jm1 <= self.ell {
                    ExtendedRational::Finite(Rational::new(1, self.ell + 1 - jm1).expect("positive"))
                } else {
                    ExtendedRational::Infinity
                }
            }
        }
    }

    /// `s_k = sign(n(j_k−ℓ) − ω_{j_k})`, the sign of `h′` on piece `k`.
    pub fn signs(&self) -> Vec<i32> {
        let n = self.n as i64;
        self.pieces
            .iter()
            .map(|p| (Rational::from_integer(n * (p.line.source_j - self.ell)) - &p.line.intercept).signum())
            .collect()
    }
}

/// Build the lower envelope of `{(j−ℓ)η + ω_j : a_j ≠ 0}` on `[0, ∞]`.
pub fn lower_envelope(spec: &OperatorSpec) -> Envelope {
    let ell = spec.ell();
    let lines: Vec<EnvelopeLine> = spec
        .terms()
        .iter()
        .map(|t| EnvelopeLine {
            slope: Rational::from_integer(t.j - ell),
            intercept: t.omega.clone(),
            source_j: t.j,
        })
        .collect();

    // At η = 0 the lowest intercept wins; among ties the smallest slope stays lowest.
    let first = lines
        .iter()
        .min_by(|a, b| a.intercept.cmp(&b.intercept).then(a.slope.cmp(&b.slope)))
        .expect("the leading term is always active")
        .clone();
    let mut pieces = vec![EnvelopePiece { start: Rational::zero(), line: first }];
    loop {
        let cur = &pieces.last().expect("non-empty").line;
        // Next crossing by a line of smaller slope; ties go to the smallest slope.
        let next = lines
            .iter()
            .filter(|l| l.slope < cur.slope)
            .map(|l| ((&l.intercept - &cur.intercept) / (&cur.slope - &l.slope), l))
            .min_by(|(ea, la), (eb, lb)| ea.cmp(eb).then(la.slope.cmp(&lb.slope)));
        match next {
            Some((eta, line)) => {
                let line = line.clone();
                pieces.push(EnvelopePiece { start: eta, line });
            }
            None => break,
        }
    }
    Envelope { pieces, lines, n: spec.n(), ell }
}

pub fn g_eval(env: &Envelope, eta: &ExtendedRational) -> ExtendedRational {
    env.g(eta)
}

pub fn h_eval(spec: &OperatorSpec, eta: &ExtendedRational) -> ExtendedRational {
    lower_envelope(spec).h(eta)
}

/// What the exponent means for nonexistence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// `1 < p_c < ∞`.
    Finite,
    /// `p_c = ∞`.
    Infinite,
    /// `p_c = ∞` reached only with equality `max (g(η) − η) = n`.
    InfiniteBoundary,
    /// `p_c = 1`: no nonexistence result.
    NoResult,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Finite => "finite critical exponent",
            Outcome::Infinite => "no global solutions for any p > 1",
            Outcome::InfiniteBoundary => "no global solutions for any p > 1 (boundary case)",
            Outcome::NoResult => "no nonexistence result",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentReport {
    pub p_c: ExtendedRational,
    pub eta_opt: ExtendedRational,
    pub envelope: Envelope,
    pub signs: Vec<i32>,
    pub j_p: BTreeSet<i64>,
    pub outcome: Outcome,
    pub classification: String,
    pub q: Option<Rational>,
    pub s: Option<Rational>,
    pub index_set: BTreeSet<i64>,
}

impl ExponentReport {
    /// The report document with fixed key order.
    pub fn to_json_value(&self) -> Value {
        let breakpoints: Vec<Value> = self
            .envelope
            .breakpoints()
            .into_iter()
            .map(|(eta, j)| json!([eta.to_string(), j]))
            .collect();
        json!({
            "p_c": self.p_c.to_string(),
            "eta_opt": self.eta_opt.to_string(),
            "breakpoints": breakpoints,
            "signs": self.signs,
            "J_p": self.j_p,
            "q": self.q.as_ref().map(Rational::to_string),
            "s": self.s.as_ref().map(Rational::to_string),
            "I": self.index_set,
            "classification": self.classification,
            "outcome": self.outcome.label(),
        })
    }
}

/// `p_c = max_{η∈[0,∞]} h(η)` together with the optimal scaling and principal part.
pub fn critical_exponent(spec: &OperatorSpec) -> ExponentReport {
    let env = lower_envelope(spec);
    let ell = spec.ell();
    let n = Rational::from_integer(spec.n() as i64);
    let signs = env.signs();

    let (p_c, eta_opt, outcome) = if env.last_j() >= ell + 1 {
        // g(η) − η is eventually non-decreasing and h(∞) = ∞.
        (ExtendedRational::Infinity, ExtendedRational::Infinity, Outcome::Infinite)
    } else {
        // max of g(η) − η over breakpoints; the last slope is negative here.
        let (best_eta, best) = env
            .pieces()
            .iter()
            .map(|p| (p.start.clone(), p.line.at(&p.start) - &p.start))
            .max_by(|(ea, a), (eb, b)| a.cmp(b).then(eb.cmp(ea)))
            .expect("non-empty");
        if best >= n {
            let outcome = if best == n { Outcome::InfiniteBoundary } else { Outcome::Infinite };
            (ExtendedRational::Infinity, ExtendedRational::Finite(best_eta), outcome)
        } else if env.first_j() <= ell {
            (
                ExtendedRational::Finite(Rational::one()),
                ExtendedRational::Finite(Rational::zero()),
                Outcome::NoResult,
            )
        } else {
            let mut best_eta = ExtendedRational::Finite(Rational::zero());
            let mut best_h = env.h(&best_eta);
            let candidates = env
                .pieces()
                .iter()
                .map(|p| ExtendedRational::Finite(p.start.clone()))
                .chain(std::iter::once(ExtendedRational::Infinity));
            for eta in candidates {
                let h = env.h(&eta);
                if h > best_h {
                    best_h = h;
                    best_eta = eta;
                }
            }
            debug_assert_eq!(Some(&best_eta), sign_transition(&env, &signs).as_ref());
            (best_h, best_eta, Outcome::Finite)
        }
    };

    let j_p = principal_part(&env, &eta_opt);
    let mut report = ExponentReport {
        p_c,
        eta_opt,
        envelope: env,
        signs,
        j_p,
        outcome,
        classification: String::new(),
        q: weight_exponent_q(spec).ok(),
        s: fractional_part_s(spec).ok(),
        index_set: index_set_i(spec),
    };
    report.classification = classify(&report, spec).to_string();
    report
}

/// The breakpoint `η_k` with `s_{k−1} = +1` and `s_k = −1`, if any.
fn sign_transition(env: &Envelope, signs: &[i32]) -> Option<ExtendedRational> {
    (1..signs.len())
        .find(|&k| signs[k - 1] == 1 && signs[k] == -1)
        .map(|k| ExtendedRational::Finite(env.pieces()[k].start.clone()))
}

/// `J_p = {j : a_j ≠ 0, g(η̄) = (j−ℓ)η̄ + ω_j}`; at `η̄ = ∞` the last piece.
fn principal_part(env: &Envelope, eta: &ExtendedRational) -> BTreeSet<i64> {
    match eta {
        ExtendedRational::Finite(e) => {
            let g = env.piece_at(e).line.at(e);
            env.lines().iter().filter(|l| l.at(e) == g).map(|l| l.source_j).collect()
        }
        _ => BTreeSet::from([env.last_j()]),
    }
}

/// Label for second-order damped models `∂ₜ² + a₁(−Δ)^{σ₁}∂ₜ + a₀(−Δ)^σ`.
pub fn classify(_report: &ExponentReport, spec: &OperatorSpec) -> &'static str {
    if spec.m() != 2 {
        return "generic";
    }
    let (Some(damping), Some(elastic)) = (spec.term(1), spec.term(0)) else {
        return "generic";
    };
    if damping.omega.is_zero() {
        return "classical-damping";
    }
    // 2σ₁ vs σ, i.e. ω₁ vs ω₀/2
    let lhs = &damping.omega * 2;
    match lhs.cmp(&elastic.omega) {
        std::cmp::Ordering::Less => "effective",
        std::cmp::Ordering::Greater => "noneffective",
        std::cmp::Ordering::Equal => "quasi-homogeneous-limit",
    }
}

/// Result of the floating-point grid search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BruteForce {
    pub p_hat: f64,
    pub eta_hat: f64,
    pub unbounded: bool,
}

const UNBOUNDED_CAP: f64 = 1e6;

/// Maximise `h` on `{0, Δ, …, eta_max}` plus the limit at infinity, computing
/// `g` as a direct minimum over the lines in `f64`.
pub fn brute_force_pc(spec: &OperatorSpec, eta_max: &Rational, steps: usize) -> BruteForce {
    let n = spec.n() as f64;
    let ell = spec.ell() as f64;
    let lines: Vec<(f64, f64)> = spec.terms().iter().map(|t| (t.j as f64 - ell, t.omega.to_f64())).collect();
    let h = |eta: f64| {
        let g = lines.iter().map(|&(s, b)| s * eta + b).fold(f64::INFINITY, f64::min);
        let den = n + eta - g;
        if den <= 0.0 {
            f64::INFINITY
        } else {
            (n + eta) / den
        }
    };
    let eta_max = eta_max.to_f64();
    let steps = steps.max(1);
    let mut best = (h(0.0), 0.0);
    for k in 1..=steps {
        let eta = eta_max * k as f64 / steps as f64;
        let v = h(eta);
        if v > best.0 {
            best = (v, eta);
        }
    }
    let j_min = spec.terms().iter().map(|t| t.j).min().expect("non-empty");
    let at_inf = if j_min <= spec.ell() { 1.0 / (spec.ell() + 1 - j_min) as f64 } else { f64::INFINITY };
    if at_inf > best.0 {
        best = (at_inf, f64::INFINITY);
    }
    if best.0 > UNBOUNDED_CAP {
        return BruteForce { p_hat: f64::INFINITY, eta_hat: best.1, unbounded: true };
    }
    BruteForce { p_hat: best.0, eta_hat: best.1, unbounded: false }
}

/// Scaling exponent `−(j−ℓ)η − ω_j + (n+η)/p′` of term `j` in the Hölder
/// estimate of the test-function argument, with `1/p′ = 1 − 1/p`.
pub fn holder_exponents(spec: &OperatorSpec, eta: &Rational, p: &Rational) -> Vec<(i64, Rational)> {
    let n = Rational::from_integer(spec.n() as i64);
    let inv_p_prime = Rational::one() - p.recip();
    spec.terms()
        .iter()
        .map(|t| {
            let e = -(Rational::from_integer(t.j - spec.ell()) * eta) - &t.omega + (&n + eta) * &inv_p_prime;
            (t.j, e)
        })
        .collect()
}
