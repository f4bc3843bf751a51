use thiserror::Error;

/// Errors raised by the model, solver, geometry and percolation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {value} outside the domain of {what}")]
    Domain { what: &'static str, value: f64 },

    #[error("symbol index {index} out of range for alphabet of size {size}")]
    UnknownSymbol { index: usize, size: usize },

    #[error("invalid value at `{path}`: {message}")]
    Invalid { path: String, message: String },

    #[error("normalization could not be bracketed: {0}")]
    NoSolution(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("energy target is not attainable: {0}")]
    Infeasible(String),

    #[error("cutoff set changes inside the finite-difference stencil around theta = {theta:?}")]
    NonSmooth { theta: Vec<f64> },

    #[error("escort normalizer vanishes")]
    DegenerateEscort,

    #[error("size cap exceeded: requested {requested}, maximum {max}")]
    CapExceeded { requested: usize, max: usize },
}

impl Error {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors that describe malformed input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Invalid { .. }
                | Error::UnknownSymbol { .. }
                | Error::Domain { .. }
                | Error::CapExceeded { .. }
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::UnknownSymbol { .. } => "unknown_symbol",
            Error::Invalid { .. } => "invalid",
            Error::NoSolution(_) => "no_solution",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Infeasible(_) => "infeasible",
            Error::NonSmooth { .. } => "non_smooth",
            Error::DegenerateEscort => "degenerate_escort",
            Error::CapExceeded { .. } => "cap_exceeded",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
