use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter fell outside its admissible set.
    #[error("invalid parameter `{name}` = {value}: must satisfy {bound}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        bound: String,
    },

    /// An argument fell outside the envelope an operation supports.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or iteration failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Adaptive quadrature could not reach its tolerance.
    #[error("quadrature did not converge: estimate {estimate}, error estimate {error_estimate:e} (tolerance {tolerance:e})")]
    Quadrature {
        estimate: f64,
        error_estimate: f64,
        tolerance: f64,
    },

    /// A search ran out of budget before producing the requested number of hits.
    #[error("search exhausted at p = {p_max} with {} of {requested} indices found", found.len())]
    Exhausted {
        found: Vec<u64>,
        requested: usize,
        p_max: u64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, bound: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            value,
            bound: bound.into(),
        }
    }

    /// True for errors caused by bad input rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::Domain(_) | Error::Unsupported(_)
        )
    }
}
