use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite state produced at step {step}")]
    NumericalBlowup { step: usize },

    #[error("matrix is not symmetric positive definite ({context}); smallest eigenvalue {smallest_eigenvalue:e}")]
    NotSpd {
        context: String,
        smallest_eigenvalue: f64,
    },

    #[error("matrix is not symmetric: max |A - A^T| = {asymmetry:e} (allowed {allowed:e})")]
    NotSymmetric { asymmetry: f64, allowed: f64 },

    #[error("observation network is empty; saddle point formulations need p >= 1")]
    EmptyObservations,

    #[error("dense assembly of dimension {dim} exceeds the cap of {cap}")]
    SizeCap { dim: usize, cap: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    EigenNonConvergence { sweeps: usize },

    #[error("negative Gram eigenvalue {value:e} beyond tolerance")]
    NegativeGram { value: f64 },

    #[error("solver breakdown at iteration {iteration}: {reason}")]
    Breakdown { iteration: usize, reason: String },

    #[error("negative curvature p^T A p = {curvature:e} at iteration {iteration}; operator is not SPD")]
    NegativeCurvature { iteration: usize, curvature: f64 },

    #[error("observation chain is not nested at step {step}")]
    NotNested { step: usize },

    #[error("unknown observation network id {0:?} (expected one of a, b, c, d, e, f)")]
    UnknownNetwork(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension {
            context,
            expected,
            got,
        })
    }
}
