use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The one-step problem has more than one minimizer at `y`.
    #[error("non-unique minimizer at Y = {y}: both {lower} and {upper} are optimal")]
    NonUniqueMinimizer { y: Rational, lower: u64, upper: u64 },

    #[error("no period detected within {steps} steps")]
    PeriodNotFound { steps: usize },

    #[error("annulus has {cells} cells, more than the allowed {max}")]
    AnnulusTooLarge { cells: usize, max: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
