//! Exact data model of the evolution operator
//! `L = Σ_{j=0}^{m} a_j (−Δ)^{ω_j/2} ∂_t^j` with power nonlinearity `|∂_t^ℓ u|^p`,
//! together with the initial-data descriptors.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// How spatial orders are interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `ω_j = 2σ_j` for fractional powers `(−Δ)^{σ_j}`.
    #[default]
    Fractional,
    /// `ω_j = r_j`, the order of an integer spatial derivative.
    Integer,
}

/// One term `a_j (−Δ)^{ω_j/2} ∂_t^j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OperatorTerm {
    pub j: i64,
    pub a: Rational,
    pub omega: Rational,
}

impl OperatorTerm {
    pub fn new(j: i64, a: Rational, omega: Rational) -> Self {
        OperatorTerm { j, a, omega }
    }

    /// The fractional power `σ_j = ω_j / 2`.
    pub fn sigma(&self) -> Rational {
        &self.omega / 2
    }
}

/// A validated operator. Only terms with `a_j ≠ 0` are kept and the leading
/// term `(j = m, a = 1, ω = 0)` is always present.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawOperator")]
pub struct OperatorSpec {
    n: u32,
    m: i64,
    ell: i64,
    mode: Mode,
    terms: Vec<OperatorTerm>,
}

impl OperatorSpec {
    pub fn new(n: i64, m: i64, ell: i64, mode: Mode, terms: Vec<OperatorTerm>) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidOperator(format!("dimension n = {n} must be positive")));
        }
        if m < 1 {
            return Err(Error::InvalidOperator(format!("order m = {m} must be positive")));
        }
        if ell < 0 || ell > m - 1 {
            return Err(Error::EllOutOfRange { ell, max: m - 1 });
        }
        let mut by_j: BTreeMap<i64, OperatorTerm> = BTreeMap::new();
        for t in terms {
            if t.j < 0 || t.j > m {
                return Err(Error::TermOutOfRange { j: t.j, m });
            }
            if t.omega.is_negative() {
                return Err(Error::NegativeOrder { j: t.j, omega: t.omega.to_string() });
            }
            if mode == Mode::Integer && !t.omega.is_integer() {
                return Err(Error::InvalidOperator(format!(
                    "integer mode requires integer spatial order, got {} for j = {}",
                    t.omega, t.j
                )));
            }
            if by_j.contains_key(&t.j) {
                return Err(Error::DuplicateTerm(t.j));
            }
            by_j.insert(t.j, t);
        }
        match by_j.get(&m) {
            Some(lead) if lead.a != Rational::one() || !lead.omega.is_zero() => {
                return Err(Error::InvalidOperator(format!(
                    "leading term j = m = {m} must have a = 1 and omega = 0"
                )));
            }
            Some(_) => {}
            None => {
                by_j.insert(m, OperatorTerm::new(m, Rational::one(), Rational::zero()));
            }
        }
        let terms = by_j.into_values().filter(|t| !t.a.is_zero()).collect();
        Ok(OperatorSpec { n: n as u32, m, ell, mode, terms })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn ell(&self) -> i64 {
        self.ell
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Active terms sorted by increasing `j`.
    pub fn terms(&self) -> &[OperatorTerm] {
        &self.terms
    }

    pub fn term(&self, j: i64) -> Option<&OperatorTerm> {
        self.terms.iter().find(|t| t.j == j)
    }

    /// `a_j`, zero when the term is absent.
    pub fn coefficient(&self, j: i64) -> Rational {
        self.term(j).map(|t| t.a.clone()).unwrap_or_else(Rational::zero)
    }

    /// Whether some active term is a non-integer fractional power, the
    /// standing hypothesis of the nonexistence theorem.
    pub fn has_fractional_term(&self) -> bool {
        self.mode == Mode::Fractional && self.terms.iter().any(|t| !t.sigma().is_integer())
    }

    pub fn max_omega(&self) -> Rational {
        self.terms.iter().map(|t| t.omega.clone()).max().unwrap_or_else(Rational::zero)
    }

    /// Parse the canonical JSON document.
    pub fn from_json(document: &str) -> Result<Self> {
        let raw: RawOperator = serde_json::from_str(document)?;
        raw.into_spec()
    }

    /// Canonical JSON, with the leading term written out.
    pub fn to_json(&self) -> String {
        let raw = RawOperatorOut {
            n: self.n as i64,
            m: self.m,
            ell: self.ell,
            mode: self.mode,
            terms: self
                .terms
                .iter()
                .map(|t| RawTermOut { j: t.j, a: t.a.to_string(), omega: t.omega.to_string() })
                .collect(),
        };
        serde_json::to_string(&raw).expect("operator serialization is infallible")
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalField {
    Text(String),
    Int(i64),
}

impl RationalField {
    fn parse(self) -> Result<Rational> {
        match self {
            RationalField::Text(s) => s.parse(),
            RationalField::Int(i) => Ok(Rational::from_integer(i)),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    j: i64,
    a: RationalField,
    omega: RationalField,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    n: i64,
    m: i64,
    ell: i64,
    #[serde(default)]
    mode: Mode,
    terms: Vec<RawTerm>,
}

impl TryFrom<RawOperator> for OperatorSpec {
    type Error = Error;

    fn try_from(raw: RawOperator) -> Result<Self> {
        raw.into_spec()
    }
}

impl RawOperator {
    fn into_spec(self) -> Result<OperatorSpec> {
        let terms = self
            .terms
            .into_iter()
            .map(|t| Ok(OperatorTerm::new(t.j, t.a.parse()?, t.omega.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        OperatorSpec::new(self.n, self.m, self.ell, self.mode, terms)
    }
}

#[derive(Serialize)]
struct RawTermOut {
    j: i64,
    a: String,
    omega: String,
}

#[derive(Serialize)]
struct RawOperatorOut {
    n: i64,
    m: i64,
    ell: i64,
    mode: Mode,
    terms: Vec<RawTermOut>,
}

/// `s = min{σ_j − ⌊σ_j⌋ : σ_j ∉ ℤ, a_j ≠ 0}`.
pub fn fractional_part_s(spec: &OperatorSpec) -> Result<Rational> {
    if spec.mode() != Mode::Fractional {
        return Err(Error::NoFractionalTerm);
    }
    spec.terms()
        .iter()
        .map(OperatorTerm::sigma)
        .filter(|s| !s.is_integer())
        .map(|s| s.fract_floor())
        .min()
        .ok_or(Error::NoFractionalTerm)
}

/// The weight exponent `q = n + 2s`.
pub fn weight_exponent_q(spec: &OperatorSpec) -> Result<Rational> {
    let s = fractional_part_s(spec)?;
    Ok(Rational::from_integer(spec.n() as i64) + s * 2)
}

/// `I = {j ∈ [ℓ, m−1] : ω_{j+1} = 0, a_{j+1} ≠ 0}`.
pub fn index_set_i(spec: &OperatorSpec) -> BTreeSet<i64> {
    (spec.ell()..spec.m())
        .filter(|&j| spec.term(j + 1).is_some_and(|t| t.omega.is_zero()))
        .collect()
}

/// Shape of a sampled initial datum, centred at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// `A exp(−|x|²/(2w²))`.
    Gaussian { amplitude: f64, width: f64 },
    /// `A (x₁/w) exp(−|x|²/(2w²))`, odd in the first coordinate.
    OddGaussian { amplitude: f64, width: f64 },
    /// `A exp(1 − 1/(1 − |x/r|²))` inside the ball of radius `r`, zero outside.
    Bump { amplitude: f64, radius: f64 },
}

impl Shape {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match *self {
            Shape::Gaussian { amplitude, width } => amplitude * (-r2 / (2.0 * width * width)).exp(),
            Shape::OddGaussian { amplitude, width } => {
                amplitude * (x[0] / width) * (-r2 / (2.0 * width * width)).exp()
            }
            Shape::Bump { amplitude, radius } => {
                let z = r2 / (radius * radius);
                if z >= 1.0 {
                    0.0
                } else {
                    amplitude * (1.0 - 1.0 / (1.0 - z)).exp()
                }
            }
        }
    }

    /// `∫_{ℝⁿ} u dx`.
    pub fn integral(&self, n: u32) -> f64 {
        let nf = n as f64;
        match *self {
            Shape::Gaussian { amplitude, width } => {
                amplitude * (2.0 * std::f64::consts::PI).powf(nf / 2.0) * width.powf(nf)
            }
            Shape::OddGaussian { .. } => 0.0,
            Shape::Bump { amplitude, radius } => {
                // Radial integral |S^{n−1}| ∫₀^r ρ^{n−1} e^{1−1/(1−ρ²/r²)} dρ.
                let sphere = crate::special::sphere_area(n);
                let f = |rho: f64| {
                    let z = rho * rho / (radius * radius);
                    if z >= 1.0 {
                        0.0
                    } else {
                        rho.powf(nf - 1.0) * (1.0 - 1.0 / (1.0 - z)).exp()
                    }
                };
                let v = crate::quad::integrate(f, 0.0, radius, 1e-13, 1e-12)
                    .map(|r| r.value)
                    .unwrap_or(f64::NAN);
                amplitude * sphere * v
            }
        }
    }
}

/// A single initial datum `u_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Datum {
    Zero,
    /// A sampled profile; `shape` is absent when only the integral is known.
    Profile {
        name: String,
        #[serde(default)]
        shape: Option<Shape>,
        #[serde(default)]
        integral: Option<f64>,
        /// Whether `u ∈ L¹(⟨x⟩^q dx)`.
        #[serde(default = "default_true")]
        weighted_integrable: bool,
    },
}

fn default_true() -> bool {
    true
}

impl Datum {
    /// A profile whose integral is derived from its shape.
    pub fn shaped(name: &str, shape: Shape, n: u32) -> Datum {
        let integral = Some(shape.integral(n));
        Datum::Profile { name: name.to_string(), shape: Some(shape), integral, weighted_integrable: true }
    }

    pub fn integral(&self) -> Option<f64> {
        match self {
            Datum::Zero => Some(0.0),
            Datum::Profile { integral, .. } => *integral,
        }
    }

    pub fn shape(&self) -> Option<&Shape> {
        match self {
            Datum::Zero => None,
            Datum::Profile { shape, .. } => shape.as_ref(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.shape().map_or(0.0, |s| s.eval(x))
    }
}

/// Initial data `u_j = ∂_t^j u(0)` for `j ∈ [ℓ, m−1]`; lower orders vanish.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataSpec {
    ell: i64,
    m: i64,
    data: BTreeMap<i64, Datum>,
}

impl DataSpec {
    pub fn new(spec: &OperatorSpec) -> Self {
        DataSpec { ell: spec.ell(), m: spec.m(), data: BTreeMap::new() }
    }

    /// Set `u_j`. Orders below `ℓ` only accept [`Datum::Zero`].
    pub fn with(mut self, j: i64, datum: Datum) -> Result<Self> {
        if j < 0 || j > self.m - 1 {
            return Err(Error::Domain(format!("datum index j = {j} outside [0, {}]", self.m - 1)));
        }
        if j < self.ell {
            if datum != Datum::Zero {
                return Err(Error::Domain(format!(
                    "u_{j} must vanish for j < ell = {}",
                    self.ell
                )));
            }
            return Ok(self);
        }
        self.data.insert(j, datum);
        Ok(self)
    }

    pub fn get(&self, j: i64) -> &Datum {
        static ZERO: Datum = Datum::Zero;
        self.data.get(&j).unwrap_or(&ZERO)
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn ell(&self) -> i64 {
        self.ell
    }
}

/// Outcome of the sign condition `Σ_{j∈I} a_{j+1} ∫u_j dx > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SignCheck {
    pub value: f64,
    pub positive: bool,
}

pub fn check_sign_condition(spec: &OperatorSpec, data: &DataSpec) -> Result<SignCheck> {
    let mut value = 0.0;
    for j in index_set_i(spec) {
        let integral = data.get(j).integral().ok_or(Error::MissingIntegral(j as usize))?;
        value += spec.coefficient(j + 1).to_f64() * integral;
    }
    Ok(SignCheck { value, positive: value > 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn frac_spec(n: i64, m: i64, ell: i64, terms: &[(i64, &str, &str)]) -> OperatorSpec {
        let terms = terms.iter().map(|&(j, a, w)| OperatorTerm::new(j, r(a), r(w))).collect();
        OperatorSpec::new(n, m, ell, Mode::Fractional, terms).unwrap()
    }

    #[test]
    fn parses_heat_and_adds_leading_term() {
        let spec =
            OperatorSpec::from_json(r#"{"n":1,"m":1,"ell":0,"terms":[{"j":0,"a":"1","omega":"2"}]}"#)
                .unwrap();
        assert_eq!(spec.terms().len(), 2);
        assert_eq!(spec.term(1).unwrap().omega, Rational::zero());
        assert_eq!(spec.term(0).unwrap().sigma(), r("1"));
        assert_eq!(spec.mode(), Mode::Fractional);
    }

    #[test]
    fn parses_damped_example() {
        let spec = OperatorSpec::from_json(
            r#"{"n":3,"m":2,"ell":0,"terms":[{"j":1,"a":"1","omega":"1"},{"j":0,"a":"1","omega":"4"}]}"#,
        )
        .unwrap();
        assert_eq!(spec.term(1).unwrap().sigma(), r("1/2"));
        assert_eq!(spec.term(0).unwrap().sigma(), r("2"));
    }

    #[test]
    fn parse_errors() {
        let neg = OperatorSpec::from_json(r#"{"n":1,"m":1,"ell":0,"terms":[{"j":0,"a":"1","omega":"-1"}]}"#);
        assert!(matches!(neg, Err(Error::NegativeOrder { .. })));
        let dup = OperatorSpec::from_json(
            r#"{"n":1,"m":2,"ell":0,"terms":[{"j":0,"a":"1","omega":"1"},{"j":0,"a":"2","omega":"1"}]}"#,
        );
        assert!(matches!(dup, Err(Error::DuplicateTerm(0))));
        let ell = OperatorSpec::from_json(r#"{"n":1,"m":1,"ell":1,"terms":[]}"#);
        assert!(matches!(ell, Err(Error::EllOutOfRange { .. })));
        let bad = OperatorSpec::from_json(r#"{"n":1,"m":1,"ell":0,"terms":[{"j":0,"a":"1/0","omega":"1"}]}"#);
        assert!(matches!(bad, Err(Error::MalformedRational(_))));
        let lead = OperatorSpec::from_json(r#"{"n":1,"m":1,"ell":0,"terms":[{"j":1,"a":"2","omega":"0"}]}"#);
        assert!(matches!(lead, Err(Error::InvalidOperator(_))));
        let int = OperatorSpec::from_json(
            r#"{"n":1,"m":1,"ell":0,"mode":"integer","terms":[{"j":0,"a":"1","omega":"1/2"}]}"#,
        );
        assert!(matches!(int, Err(Error::InvalidOperator(_))));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let spec = frac_spec(2, 2, 0, &[(1, "0", "1"), (0, "1", "3")]);
        assert!(spec.term(1).is_none());
        assert_eq!(spec.terms().len(), 2);
    }

    #[test]
    fn s_and_q() {
        let spec = frac_spec(3, 2, 0, &[(1, "1", "3"), (0, "1", "4")]);
        assert_eq!(fractional_part_s(&spec).unwrap(), r("1/2"));
        assert_eq!(weight_exponent_q(&spec).unwrap(), r("4"));
        let spec = frac_spec(2, 2, 0, &[(1, "1", "5/2"), (0, "1", "7")]);
        assert_eq!(fractional_part_s(&spec).unwrap(), r("1/4"));
        let spec = frac_spec(2, 1, 0, &[(0, "1", "5/2")]);
        assert_eq!(weight_exponent_q(&spec).unwrap(), r("5/2"));
        let spec = frac_spec(1, 2, 0, &[(1, "1", "2"), (0, "1", "4")]);
        assert!(matches!(fractional_part_s(&spec), Err(Error::NoFractionalTerm)));
        let spec = frac_spec(1, 1, 0, &[(0, "1", "1")]);
        assert_eq!(weight_exponent_q(&spec).unwrap(), r("2"));
    }

    #[test]
    fn index_set() {
        let heat = frac_spec(1, 1, 0, &[(0, "1", "2")]);
        assert_eq!(index_set_i(&heat), BTreeSet::from([0]));
        let effective = frac_spec(3, 2, 0, &[(1, "1", "1"), (0, "1", "4")]);
        assert_eq!(index_set_i(&effective), BTreeSet::from([1]));
        let classical = frac_spec(3, 2, 0, &[(1, "1", "0"), (0, "1", "3")]);
        assert_eq!(index_set_i(&classical), BTreeSet::from([0, 1]));
    }

    #[test]
    fn sign_condition() {
        let heat = frac_spec(1, 1, 0, &[(0, "1", "2")]);
        let opaque = |v: f64| Datum::Profile {
            name: "u".into(),
            shape: None,
            integral: Some(v),
            weighted_integrable: true,
        };
        let data = DataSpec::new(&heat).with(0, opaque(1.0)).unwrap();
        assert_eq!(check_sign_condition(&heat, &data).unwrap(), SignCheck { value: 1.0, positive: true });
        let data = DataSpec::new(&heat).with(0, opaque(0.0)).unwrap();
        assert_eq!(check_sign_condition(&heat, &data).unwrap(), SignCheck { value: 0.0, positive: false });

        let classical = frac_spec(3, 2, 0, &[(1, "1", "0"), (0, "1", "3")]);
        let data = DataSpec::new(&classical).with(0, opaque(-2.0)).unwrap().with(1, opaque(3.0)).unwrap();
        assert_eq!(check_sign_condition(&classical, &data).unwrap().value, 1.0);

        let missing = Datum::Profile { name: "u".into(), shape: None, integral: None, weighted_integrable: true };
        let data = DataSpec::new(&heat).with(0, missing).unwrap();
        assert!(matches!(check_sign_condition(&heat, &data), Err(Error::MissingIntegral(0))));
    }

    #[test]
    fn data_below_ell_must_vanish() {
        let spec = frac_spec(1, 2, 1, &[(1, "1", "1/2"), (0, "1", "2")]);
        let g = Datum::shaped("g", Shape::Gaussian { amplitude: 1.0, width: 1.0 }, 1);
        assert!(DataSpec::new(&spec).with(0, g.clone()).is_err());
        assert!(DataSpec::new(&spec).with(0, Datum::Zero).is_ok());
        assert!(DataSpec::new(&spec).with(1, g).is_ok());
    }

    #[test]
    fn shape_integrals() {
        let g = Shape::Gaussian { amplitude: 2.0, width: 0.5 };
        assert!((g.integral(1) - 2.0 * (2.0 * std::f64::consts::PI).sqrt() * 0.5).abs() < 1e-14);
        assert_eq!(Shape::OddGaussian { amplitude: 1.0, width: 1.0 }.integral(2), 0.0);
        // ∫_{-1}^{1} e^{1-1/(1-x²)} dx ≈ 0.443993816168079 · e
        let b = Shape::Bump { amplitude: 1.0, radius: 1.0 }.integral(1);
        assert!((b - 0.443_993_816_168_079_4 * std::f64::consts::E).abs() < 1e-10, "{b}");
    }

    #[test]
    fn json_round_trip_fixture() {
        let spec = frac_spec(2, 3, 1, &[(2, "-3/4", "1/3"), (0, "5", "7/2")]);
        assert_eq!(OperatorSpec::from_json(&spec.to_json()).unwrap(), spec);
    }
}
