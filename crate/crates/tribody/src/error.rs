use thiserror::Error;

/// Failure modes shared by every module. `op` names the failing operation as
/// `module::operation` so front ends can report where a run broke.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: argument outside the oscillation domain: {detail}")]
    Regime { op: &'static str, detail: String },
    #[error("{op}: no convergence after {terms} terms")]
    NonConvergence { op: &'static str, terms: usize },
    #[error("{op}: pole at {at}")]
    Pole { op: &'static str, at: String },
    #[error("{op}: domain error: {detail}")]
    Domain { op: &'static str, detail: String },
    #[error("{op}: quadrature did not converge (last {last:e}, previous {previous:e})")]
    Quadrature {
        op: &'static str,
        last: f64,
        previous: f64,
    },
    #[error("{op}: unsupported configuration: {detail}")]
    Unsupported { op: &'static str, detail: String },
    #[error("{op}: kinematic singularity: {detail}")]
    Kinematics { op: &'static str, detail: String },
    #[error("{op}: singular denominator {value:e}")]
    Singular { op: &'static str, value: f64 },
    #[error("config: {0}")]
    Config(String),
}

impl Error {
    /// The `module::operation` tag, or `config` for parse failures.
    pub fn op(&self) -> &'static str {
        match self {
            Error::Regime { op, .. }
            | Error::NonConvergence { op, .. }
            | Error::Pole { op, .. }
            | Error::Domain { op, .. }
            | Error::Quadrature { op, .. }
            | Error::Unsupported { op, .. }
            | Error::Kinematics { op, .. }
            | Error::Singular { op, .. } => op,
            Error::Config(_) => "config",
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Regime { .. } => "regime",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Pole { .. } => "pole",
            Error::Domain { .. } => "domain",
            Error::Quadrature { .. } => "quadrature",
            Error::Unsupported { .. } => "unsupported",
            Error::Kinematics { .. } => "kinematics",
            Error::Singular { .. } => "singular",
            Error::Config(_) => "config_parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
