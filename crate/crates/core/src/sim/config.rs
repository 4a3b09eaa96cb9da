use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fraclap::GridFunction;
use crate::operator::{DataSpec, Datum, OperatorSpec};

fn default_threshold() -> f64 {
    1e6
}

fn default_cfl() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

/// One pseudo-spectral run of `L u = |∂_t^ℓ u|^p` on a periodic cube.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub operator: OperatorSpec,
    pub p: f64,
    pub half_width: f64,
    pub points: usize,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_threshold")]
    pub blowup_threshold: f64,
    /// `u_j = ∂_t^j u(0)`, keyed by `j`.
    #[serde(default)]
    pub data: BTreeMap<i64, Datum>,
    /// When false the right-hand side is dropped.
    #[serde(default = "yes")]
    pub nonlinear: bool,
    /// Store full snapshots every this much time.
    #[serde(default)]
    pub snapshot_interval: Option<f64>,
    /// Re-run blow-ups with `dt/2` to check the blow-up time.
    #[serde(default = "yes")]
    pub confirm_blowup: bool,
    /// `c` in `dt ≤ c·h^{max ω}`.
    #[serde(default = "default_cfl")]
    pub cfl_constant: f64,
}

impl SimConfig {
    pub fn new(operator: OperatorSpec, p: f64, half_width: f64, points: usize, dt: f64, t_end: f64) -> Self {
        SimConfig {
            operator,
            p,
            half_width,
            points,
            dt,
            t_end,
            blowup_threshold: default_threshold(),
            data: BTreeMap::new(),
            nonlinear: true,
            snapshot_interval: None,
            confirm_blowup: true,
            cfl_constant: default_cfl(),
        }
    }

    pub fn with_datum(mut self, j: i64, datum: Datum) -> Self {
        self.data.insert(j, datum);
        self
    }

    pub fn dim(&self) -> usize {
        self.operator.n() as usize
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn data_spec(&self) -> Result<DataSpec> {
        self.data
            .iter()
            .try_fold(DataSpec::new(&self.operator), |d, (&j, datum)| d.with(j, datum.clone()))
    }

    /// Largest `dt` allowed by `dt ≤ c·h^{max ω}`.
    pub fn max_dt(&self) -> f64 {
        self.cfl_constant * self.spacing().powf(self.operator.max_omega().to_f64())
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.operator.m();
        if !(1..=2).contains(&m) {
            return Err(Error::Domain(format!("simulation supports m ∈ {{1, 2}}, got m = {m}")));
        }
        if !(1..=3).contains(&self.dim()) {
            return Err(Error::Domain(format!("simulation supports n ∈ {{1, 2, 3}}, got n = {}", self.dim())));
        }
        if !(self.p > 1.0) || !self.p.is_finite() {
            return Err(Error::Domain(format!("p must exceed 1, got {}", self.p)));
        }
        if !(self.half_width > 0.0) || self.points < 4 {
            return Err(Error::Domain("grid needs a positive half-width and at least 4 points".into()));
        }
        if !(self.dt > 0.0) || !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::Domain("dt and t_end must be positive".into()));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(Error::Domain("blow-up threshold must be positive".into()));
        }
        if let Some(dt_snap) = self.snapshot_interval {
            if !(dt_snap > 0.0) {
                return Err(Error::Domain("snapshot interval must be positive".into()));
            }
        }
        if self.dt > self.max_dt() {
            return Err(Error::UnstableStep(format!(
                "dt = {} exceeds the cap {:.3e} = c·h^max ω",
                self.dt,
                self.max_dt()
            )));
        }
        for (&j, datum) in &self.data {
            if matches!(datum, Datum::Profile { shape: None, .. }) {
                return Err(Error::Domain(format!("datum u_{j} has no shape to sample")));
            }
        }
        self.data_spec()?;
        Ok(())
    }

    /// `u_j` sampled on the grid.
    pub fn sample_datum(&self, j: i64) -> Result<GridFunction> {
        let datum = self.data.get(&j).cloned().unwrap_or(Datum::Zero);
        GridFunction::from_fn(self.dim(), self.points, self.half_width, |x| datum.eval(x))
    }
}
