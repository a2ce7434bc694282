#![allow(dead_code)]

use num_complex::Complex64 as C64;
use qecnet_core::slh::MasterEquation;
use qecnet_core::{OperatorSum, Site, SiteSpace};

pub fn qubit() -> Site {
    Site::memory(1, 1)
}

pub fn one_qubit_model(h: OperatorSum, collapse: Vec<OperatorSum>) -> MasterEquation {
    MasterEquation { hamiltonian: h, collapse_ops: collapse, space: SiteSpace::new([qubit()]) }
}

/// `|Y+⟩ = (|0⟩ + i|1⟩)/√2` with index 0 the `Z = +1` state.
pub fn y_plus() -> Vec<C64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![C64::new(r, 0.0), C64::new(0.0, r)]
}

pub fn y_plus_projector() -> OperatorSum {
    (&OperatorSum::identity() + &OperatorSum::y(qubit())).scale(0.5)
}

pub fn pauli_channels(gamma: f64) -> Vec<OperatorSum> {
    let g = gamma.sqrt();
    vec![OperatorSum::x(qubit()).scale(g), OperatorSum::y(qubit()).scale(g), OperatorSum::z(qubit()).scale(g)]
}

/// Fraction of points where `|a − b| ≤ k·σ` (points with `σ = 0` need
/// `|a − b| ≤ 1e-9`).
pub fn fraction_within(mean: &[f64], stderr: &[f64], reference: &[f64], k: f64) -> f64 {
    let ok = mean.iter().zip(stderr).zip(reference).filter(|((m, s), r)| (*m - *r).abs() <= (k * *s).max(1e-9)).count();
    ok as f64 / mean.len() as f64
}
