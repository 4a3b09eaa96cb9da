use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed rational `{0}`")]
    MalformedRational(String),

    #[error("duplicate term for time-derivative order j = {0}")]
    DuplicateTerm(i64),

    #[error("nonlinearity index ell = {ell} outside [0, {max}]")]
    EllOutOfRange { ell: i64, max: i64 },

    #[error("term j = {j} outside [0, m = {m}]")]
    TermOutOfRange { j: i64, m: i64 },

    #[error("negative spatial order {omega} for term j = {j}")]
    NegativeOrder { j: i64, omega: String },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("operator has no non-integer fractional term with nonzero coefficient")]
    NoFractionalTerm,

    #[error("missing integral for datum u_{0}")]
    MissingIntegral(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance {tol:e} within {budget} subdivisions")]
    QuadratureBudget { tol: f64, budget: usize },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("unstable time step: {0}")]
    UnstableStep(String),

    #[error("insufficient snapshot density: {0}")]
    InsufficientSnapshots(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
    NumericalBudget,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io(_) => ErrorKind::Io,
            Error::QuadratureBudget { .. } | Error::NonFinite(_) | Error::UnstableStep(_) => {
                ErrorKind::NumericalBudget
            }
            _ => ErrorKind::Validation,
        }
    }

    /// Stable machine-readable tag for the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedRational(_) => "malformed_rational",
            Error::DuplicateTerm(_) => "duplicate_term",
            Error::EllOutOfRange { .. } => "ell_out_of_range",
            Error::TermOutOfRange { .. } => "term_out_of_range",
            Error::NegativeOrder { .. } => "negative_order",
            Error::InvalidOperator(_) => "invalid_operator",
            Error::NoFractionalTerm => "no_fractional_term",
            Error::MissingIntegral(_) => "missing_integral",
            Error::Domain(_) => "domain",
            Error::QuadratureBudget { .. } => "quadrature_budget",
            Error::NonFinite(_) => "non_finite",
            Error::UnstableStep(_) => "unstable_step",
            Error::InsufficientSnapshots(_) => "insufficient_snapshots",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}
