use num_complex::Complex64 as C64;
use qecnet_core::{CsrMatrix, OperatorSum, Site, SiteSpace};

use crate::active::{expectation, ActiveVec};
use crate::error::Result;

/// A Hermitian operator compiled on the model's space, with a label for output.
#[derive(Clone, Debug)]
pub struct Observable {
    pub label: String,
    pub matrix: CsrMatrix,
}

impl Observable {
    pub fn new(label: impl Into<String>, op: &OperatorSum, space: &SiteSpace) -> Result<Self> {
        Ok(Observable { label: label.into(), matrix: op.to_matrix(space)? })
    }

    /// `⟨ψ|O|ψ⟩/⟨ψ|ψ⟩`.
    pub fn on_state(&self, psi: &[C64]) -> f64 {
        let norm: f64 = psi.iter().map(|v| v.norm_sqr()).sum();
        self.matrix.expectation(psi).re / norm
    }

    pub(crate) fn on_active(&self, psi: &ActiveVec) -> f64 {
        expectation(&self.matrix, psi).re / psi.norm_sqr()
    }

    /// `Tr(Oρ)` for a row-major dense `ρ`.
    pub fn on_density(&self, rho: &[C64]) -> f64 {
        let n = self.matrix.nrows();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for (j, v) in self.matrix.row(i) {
                acc += v * rho[j * n + i];
            }
        }
        acc.re
    }
}

/// `Tr(Fρ_t)` for the fidelity projector `F`.
pub fn fidelity_observable(f: &OperatorSum, space: &SiteSpace) -> Result<Observable> {
    Observable::new("fidelity", f, space)
}

/// `Π⁻` population of a relay.
pub fn relay_minus_population(relay: usize, space: &SiteSpace) -> Result<Observable> {
    Observable::new(format!("relay{relay}_minus"), &OperatorSum::pi_minus(Site::relay(relay)), space)
}
