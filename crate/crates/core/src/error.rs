use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter failed its precondition before any computation started.
    #[error("invalid parameter: {0}")]
    Validation(String),

    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("eigensolver failed at phase grid point ({m1}, {m2}): {source}")]
    GridPoint {
        m1: usize,
        m2: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("flux {p}/{q}: {source}")]
    Flux {
        p: u64,
        q: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("Van Hove divergence at lambda = 0")]
    VanHoveDivergence,

    #[error("lambda = {0} lies outside the spectrum [-4, 4]")]
    OutOfBand(f64),

    #[error("order {order} unsupported (maximum {max})")]
    UnsupportedOrder { order: u32, max: u32 },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NoConvergence { .. } | Error::Inconsistent(_) => true,
            Error::GridPoint { source, .. } | Error::Flux { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
