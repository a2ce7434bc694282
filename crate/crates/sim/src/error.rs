use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] qecnet_core::Error),

    #[error("dense integration refused: dimension {dim} exceeds the limit {limit}")]
    DimensionGuard { dim: usize, limit: usize },

    #[error("step {dt} exceeds the stability bound {bound:.3e}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("trace drifted by {drift:.3e} at t = {t:.4}; reduce dt")]
    TraceDrift { drift: f64, t: f64 },

    #[error("forced jump at t = {t:.6} found zero total jump weight")]
    ZeroJumpWeight { t: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
