use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::exponent::critical_exponent;
use crate::rational::ExtendedRational;

use super::config::SimConfig;
use super::solver::{simulate, Verdict};

/// One `p` of a sweep. `error` is set instead of a verdict when the run failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub verdict: Option<Verdict>,
    pub blowup_time: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    /// Critical exponent of the operator, for annotation.
    pub p_c: String,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Verdict ranks are non-decreasing in `p` (blow-up, then inconclusive,
    /// then decay). Failed rows are ignored.
    pub fn is_monotone(&self) -> bool {
        is_monotone(self.rows.iter().filter_map(|r| r.verdict.as_ref()))
    }

    /// Whether the last blow-up row lies below `p_c` and every row above
    /// `p_c` avoids blow-up.
    pub fn brackets(&self, p_c: f64) -> bool {
        let blowups: Vec<f64> = self.rows.iter().filter(|r| r.verdict.as_ref().is_some_and(Verdict::is_blowup)).map(|r| r.p).collect();
        !blowups.is_empty() && blowups.iter().all(|&p| p <= p_c)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,verdict,blowup_time\n");
        for r in &self.rows {
            let verdict = r.verdict.as_ref().map_or("error", Verdict::label);
            let t = r.blowup_time.map(|t| format!("{t:?}")).unwrap_or_default();
            out.push_str(&format!("{:?},{verdict},{t}\n", r.p));
        }
        out
    }
}

pub fn is_monotone<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> bool {
    let ranks: Vec<u8> = verdicts.into_iter().map(Verdict::rank).collect();
    ranks.windows(2).all(|w| w[0] <= w[1])
}

/// Run `config` once per `p` (in parallel on up to `jobs` threads) with
/// identical data. Rows at `p = p_c` are reported inconclusive without a run.
pub fn sweep_p(config: &SimConfig, p_values: &[f64], jobs: usize) -> Result<SweepTable> {
    let report = critical_exponent(&config.operator);
    let p_c = report.p_c.to_f64();
    let run_row = |&p: &f64| -> SweepRow {
        if matches!(report.p_c, ExtendedRational::Finite(_)) && (p - p_c).abs() <= 1e-12 * p_c {
            let verdict = Verdict::Inconclusive { reason: "p equals the critical exponent".into() };
            return SweepRow { p, verdict: Some(verdict), blowup_time: None, error: None };
        }
        let mut cfg = config.clone();
        cfg.p = p;
        match simulate(&cfg) {
            Ok(run) => SweepRow { p, blowup_time: run.verdict.blowup_time(), verdict: Some(run.verdict), error: None },
            Err(e) => {
                log::warn!("sweep row p = {p} failed: {e}");
                SweepRow { p, verdict: None, blowup_time: None, error: Some(e.to_string()) }
            }
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| crate::error::Error::Domain(format!("thread pool: {e}")))?;
    let rows = pool.install(|| p_values.par_iter().map(run_row).collect());
    Ok(SweepTable { p_c: report.p_c.to_string(), rows })
}
