//! Critical exponents for evolution operators with fractional Laplacians,
//! with numerical checks of the fractional-Laplacian estimates behind them.

pub mod error;
pub mod exponent;
pub mod fraclap;
pub mod operator;
pub mod quad;
pub mod rational;
pub mod sim;
pub mod special;
pub mod testfn;

pub use error::{Error, ErrorKind, Result};
pub use exponent::{critical_exponent, lower_envelope, ExponentReport};
pub use operator::{DataSpec, Datum, Mode, OperatorSpec, OperatorTerm, Shape};
pub use rational::{ExtendedRational, Rational};
