//! Brute-force optimizers for cross-checking the model builder and the
//! solver on tiny instances.
//!
//! [`enumerate_domain`] works on allocations and judges them with the
//! allocation checker; [`enumerate_model`] works on a built model and has
//! its own row arithmetic. Neither calls into the solver.

mod domain;
mod model;

use thiserror::Error;

pub use domain::{enumerate_domain, Caps, DomainOptimum};
pub use model::{enumerate_model, ModelOptimum, DEFAULT_BINARY_CAP};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{what} is {value}, above the limit {limit}")]
    TooLarge { what: String, value: usize, limit: usize },
    #[error("variable `{var}` is not a lower-envelope auxiliary: {reason}")]
    NotEnvelope { var: String, reason: String },
}

fn too_large(what: &str, value: usize, limit: usize) -> Result<(), OracleError> {
    if value > limit {
        return Err(OracleError::TooLarge {
            what: what.to_string(),
            value,
            limit,
        });
    }
    Ok(())
}
