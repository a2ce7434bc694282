use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Uniform grid `t_k = t_max·k/(n_points − 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_points: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(SimError::InvalidInput(format!("n_points must be >= 2, got {n_points}")));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(SimError::InvalidInput(format!("t_max must be > 0, got {t_max}")));
        }
        Ok(TimeGrid { t_max, n_points })
    }

    pub fn spacing(&self) -> f64 {
        self.t_max / (self.n_points - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        self.t_max * k as f64 / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.point(k)).collect()
    }

    /// Number of equal substeps per interval so that none exceeds `dt`.
    pub fn substeps(&self, dt: f64) -> usize {
        ((self.spacing() / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }
}
