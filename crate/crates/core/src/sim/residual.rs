use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fraclap::{singular_quadrature_apply, GridFunction, PolyDecayFunction};
use crate::operator::{index_set_i, OperatorSpec};
use crate::rational::Rational;
use crate::testfn::TestFunctionFamily;

use super::solver::{SimRun, Snapshot};

/// Relative spread allowed between consecutive snapshot gaps.
const UNIFORM_GAP: f64 = 1e-6;

/// `A_j φ_R = a_j (−Δ)^{ω_j/2} ⟨·/R⟩^{−q}` sampled on the grid of `like`.
fn weighted_test_function(
    like: &GridFunction,
    spec: &OperatorSpec,
    j: i64,
    q: &Rational,
    r: f64,
) -> Result<Vec<f64>> {
    let term = spec.term(j).expect("caller checks the term exists");
    let a = term.a.to_f64();
    let sigma = term.sigma().to_f64();
    let phi = PolyDecayFunction::new(q.clone(), spec.n())?.with_scale(r)?;
    let dim = like.dim();
    let points = like.points();

    // the weight is radial, so evaluate once per distinct |x|²
    let mut radii: HashMap<u64, f64> = HashMap::new();
    let keys: Vec<u64> = (0..like.values().len())
        .map(|idx| {
            let mut rest = idx;
            let mut r2 = 0.0;
            for _ in 0..dim {
                let c = like.coord(rest % points);
                r2 += c * c;
                rest /= points;
            }
            radii.entry(r2.to_bits()).or_insert(r2);
            r2.to_bits()
        })
        .collect();
    let distinct: Vec<(u64, f64)> = radii.into_iter().collect();
    let values: Vec<(u64, f64)> = distinct
        .par_iter()
        .map(|&(key, r2)| {
            let mut x = vec![0.0; dim];
            x[0] = r2.sqrt();
            singular_quadrature_apply(&phi, sigma, &x).map(|v| (key, a * v))
        })
        .collect::<Result<_>>()?;
    let table: HashMap<u64, f64> = values.into_iter().collect();
    Ok(keys.iter().map(|k| table[k]).collect())
}

fn pairing(f: &GridFunction, w: &[f64]) -> f64 {
    let cell = f.spacing().powi(f.dim() as i32);
    f.values().iter().zip(w).map(|(a, b)| a * b).sum::<f64>() * cell
}

fn derivative_field(s: &Snapshot, order: i64) -> Result<&GridFunction> {
    match order {
        0 => Ok(&s.u),
        1 => s.ut.as_ref().ok_or_else(|| Error::InsufficientSnapshots(format!("snapshot at t = {} lacks u_t", s.t))),
        _ => Err(Error::Domain(format!("time derivative of order {order} is not stored"))),
    }
}

/// Trapezoid rule on the uniform snapshot times.
fn time_integral(times: &[f64], values: &[f64]) -> f64 {
    let mut acc = 0.0;
    for k in 1..times.len() {
        acc += 0.5 * (times[k] - times[k - 1]) * (values[k] + values[k - 1]);
    }
    acc
}

/// Both sides of the weak formulation tested against `ψ_R(t)φ_R(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakIdentity {
    pub lhs: f64,
    /// `(j, (−1)^{j−ℓ} ∫ψ_R^{(j−ℓ)} ∫ v A_jφ_R)` for every active term.
    pub terms: Vec<(i64, f64)>,
    /// `(j, ∫u_j A_{j+1}φ_R)` for `j ∈ [ℓ, m−1]`.
    pub data_terms: Vec<(i64, f64)>,
}

impl WeakIdentity {
    pub fn rhs(&self) -> f64 {
        self.terms.iter().map(|t| t.1).sum::<f64>() - self.data_terms.iter().map(|t| t.1).sum::<f64>()
    }

    /// `|LHS − RHS|` over the total magnitude of all contributions.
    pub fn residual(&self) -> f64 {
        let scale = self.lhs.abs()
            + self.terms.iter().map(|t| t.1.abs()).sum::<f64>()
            + self.data_terms.iter().map(|t| t.1.abs()).sum::<f64>();
        (self.lhs - self.rhs()).abs() / (scale + f64::MIN_POSITIVE)
    }
}

/// Evaluate both sides of the weak identity from the stored snapshots; the
/// recorded right-hand side samples stand in for `|∂_t^ℓ u|^p`.
pub fn weak_identity(run: &SimRun, spec: &OperatorSpec, fam: &TestFunctionFamily, q: &Rational) -> Result<WeakIdentity> {
    let snaps = &run.snapshots;
    if fam.m() as i64 != spec.m() {
        return Err(Error::Domain(format!("test family has m = {}, operator has m = {}", fam.m(), spec.m())));
    }
    let support = fam.support_end();
    let inside = snaps.iter().take_while(|s| s.t <= support * (1.0 + 1e-12)).count();
    if snaps.first().is_none_or(|s| s.t.abs() > 1e-12) {
        return Err(Error::InsufficientSnapshots("no snapshot at t = 0".into()));
    }
    if snaps.last().is_none_or(|s| s.t < support * (1.0 - 1e-12)) {
        return Err(Error::InsufficientSnapshots(format!("snapshots end before the test function support {support}")));
    }
    if inside < 9 {
        return Err(Error::InsufficientSnapshots(format!("{inside} snapshots inside the support, need at least 9")));
    }
    let snaps = &snaps[..inside.min(snaps.len())];
    let gap = snaps[1].t - snaps[0].t;
    if snaps.windows(2).any(|w| ((w[1].t - w[0].t) - gap).abs() > UNIFORM_GAP * gap) {
        return Err(Error::InsufficientSnapshots("snapshot times are not uniformly spaced".into()));
    }
    let times: Vec<f64> = snaps.iter().map(|s| s.t).collect();
    let grid = &snaps[0].u;
    let r = fam.r();
    let ell = spec.ell();

    let psi = |order: i64| -> Result<Vec<f64>> { times.iter().map(|&t| fam.scaled_psi(order as i32, t)).collect() };

    let phi = weighted_test_function(grid, spec, spec.m(), q, r)?;
    let psi0 = psi(0)?;
    let forcing: Vec<f64> = snaps.iter().map(|s| pairing(&s.forcing, &phi)).collect();
    let lhs = time_integral(&times, &forcing.iter().zip(&psi0).map(|(a, b)| a * b).collect::<Vec<_>>());

    let mut weights: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for t in spec.terms() {
        let w = if t.j == spec.m() { phi.clone() } else { weighted_test_function(grid, spec, t.j, q, r)? };
        weights.insert(t.j, w);
    }

    let mut terms = Vec::new();
    for (&j, w) in &weights {
        let order = j - ell;
        let dpsi = psi(order)?;
        let inner: Vec<f64> = snaps
            .iter()
            .zip(&dpsi)
            .map(|(s, d)| Ok(d * pairing(derivative_field(s, ell)?, w)))
            .collect::<Result<_>>()?;
        let sign = if order.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        terms.push((j, sign * time_integral(&times, &inner)));
    }

    let mut data_terms = Vec::new();
    for j in ell..spec.m() {
        if let Some(w) = weights.get(&(j + 1)) {
            data_terms.push((j, pairing(derivative_field(&snaps[0], j)?, w)));
        }
    }
    Ok(WeakIdentity { lhs, terms, data_terms })
}

/// Relative defect of the weak identity, see [`WeakIdentity::residual`].
pub fn weak_residual(run: &SimRun, spec: &OperatorSpec, fam: &TestFunctionFamily, q: &Rational) -> Result<f64> {
    Ok(weak_identity(run, spec, fam, q)?.residual())
}

/// `Σ_{j∈I} a_{j+1} ∫ u_j dx` by the rectangle rule, `data[j] = u_j`.
pub fn sign_functional(spec: &OperatorSpec, data: &BTreeMap<i64, GridFunction>) -> f64 {
    index_set_i(spec)
        .into_iter()
        .filter_map(|j| data.get(&j).map(|g| spec.coefficient(j + 1).to_f64() * g.integral()))
        .sum()
}
