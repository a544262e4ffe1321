use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::ivp::Trajectory;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid scheme: {0}")]
    InvalidScheme(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(&'static str),

    /// Aberth iteration exhausted its budget. `best` holds the last iterate set.
    #[error("root finder did not converge after {iterations} iterations (worst scaled residual {worst_residual:e})")]
    NoConvergence {
        iterations: usize,
        worst_residual: f64,
        best: Vec<Complex64>,
    },

    /// A non-finite state appeared at `step`. `partial` holds every finite state before it.
    #[error("integration blew up at step {step}")]
    BlowUp { step: usize, partial: Box<Trajectory> },

    #[error("region scan has no admissible grid points")]
    EmptyGrid,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
