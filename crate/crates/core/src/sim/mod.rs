//! Pseudo-spectral runs of the model equations on a periodic box, sweeps in
//! `p`, and the weak-formulation residual.

mod config;
mod residual;
mod solver;
mod sweep;

pub use config::SimConfig;
pub use residual::{sign_functional, weak_identity, weak_residual, WeakIdentity};
pub use solver::{companion_exp, simulate, SimRun, Snapshot, Verdict};
pub use sweep::{is_monotone, sweep_p, SweepRow, SweepTable};
