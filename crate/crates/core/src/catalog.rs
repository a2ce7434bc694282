//! Idealized device models: drives, beamsplitters, probe reflections on the
//! memory qubits, set-reset and routing relays, Raman feedback and error
//! channels.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{LocalOp, OperatorSum, Pauli};
use crate::sites::Site;
use crate::slh::{concat_all, SLHTriple};

/// Drive and rate parameters shared by the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentParams {
    /// Probe coherent amplitude.
    pub alpha: f64,
    /// Feedback beam amplitude; cancels out of the ideal Raman rule.
    pub beta: f64,
    /// Feedback Rabi strength.
    pub omega: f64,
    /// Per-qubit rate of each error type.
    pub gamma: f64,
}

impl ComponentParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("omega", self.omega), ("gamma", self.gamma)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be finite and > 0, got {}", self.beta)));
        }
        Ok(())
    }
}

impl Default for ComponentParams {
    fn default() -> Self {
        ComponentParams { alpha: 100.0 / 8.0, beta: 1.0, omega: 100.0, gamma: 0.1 }
    }
}

pub fn identity(n: usize) -> SLHTriple {
    assert!(n >= 1, "identity needs at least one channel");
    SLHTriple::identity(n)
}

/// Coherent cw input `W^γ = (1, γ, 0)`.
pub fn drive(amplitude: impl Into<C64>) -> SLHTriple {
    SLHTriple::new(
        vec![vec![OperatorSum::identity()]],
        vec![OperatorSum::scalar(amplitude.into())],
        OperatorSum::zero(),
    )
    .expect("single channel")
}

/// Port and sign convention of a 50/50 beamsplitter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamsplitterOrientation {
    /// `(1/√2)[[1, 1], [-1, 1]]`
    #[default]
    Default,
    /// `-(1/√2)[[1, 1], [-1, 1]]`
    Negated,
    /// Input ports exchanged: `(1/√2)[[1, 1], [1, -1]]`
    SwapInputs,
    /// Output ports exchanged: `(1/√2)[[-1, 1], [1, 1]]`
    SwapOutputs,
}

impl BeamsplitterOrientation {
    pub fn matrix(self) -> [[f64; 2]; 2] {
        let r = FRAC_1_SQRT_2;
        match self {
            BeamsplitterOrientation::Default => [[r, r], [-r, r]],
            BeamsplitterOrientation::Negated => [[-r, -r], [r, -r]],
            BeamsplitterOrientation::SwapInputs => [[r, r], [r, -r]],
            BeamsplitterOrientation::SwapOutputs => [[-r, r], [r, r]],
        }
    }
}

pub fn beamsplitter(orientation: BeamsplitterOrientation) -> SLHTriple {
    let m = orientation.matrix();
    let s: Vec<Vec<C64>> = m.iter().map(|row| row.iter().map(|&v| C64::new(v, 0.0)).collect()).collect();
    SLHTriple::passive(&s).expect("2x2")
}

/// Basis in which a probe reflection picks up its conditional π phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProbeAxis {
    Z,
    X,
}

impl ProbeAxis {
    pub fn pauli(self) -> Pauli {
        match self {
            ProbeAxis::Z => Pauli::Z,
            ProbeAxis::X => Pauli::X,
        }
    }
}

/// Ideal conditional reflection off memory qubit `site`: `(P_site, 0, 0)`.
pub fn probe_qubit(site: Site, axis: ProbeAxis) -> Result<SLHTriple> {
    if !site.is_memory() {
        return Err(Error::InvalidSite(format!("probe reflection needs a memory qubit, got {site}")));
    }
    SLHTriple::new(vec![vec![axis.pauli().on(site)]], vec![OperatorSum::zero()], OperatorSum::zero())
}

fn relay_site(relay_index: usize) -> Result<Site> {
    if (1..=4).contains(&relay_index) {
        Ok(Site::relay(relay_index))
    } else {
        Err(Error::InvalidSite(format!("relay index {relay_index} outside 1..=4")))
    }
}

/// Set-reset control of a relay:
/// `S = [[σ^{+-}, Π⁻], [−Π⁺, −σ^{-+}]]`, no coupling, no Hamiltonian.
///
/// Power on port 1 latches the relay into `|+⟩`, power on port 2 into `|-⟩`.
pub fn relay_set_reset(relay_index: usize) -> Result<SLHTriple> {
    let r = relay_site(relay_index)?;
    SLHTriple::new(
        vec![
            vec![OperatorSum::sigma_pm(r), OperatorSum::pi_minus(r)],
            vec![-OperatorSum::pi_plus(r), -OperatorSum::sigma_mp(r)],
        ],
        vec![OperatorSum::zero(), OperatorSum::zero()],
        OperatorSum::zero(),
    )
}

/// Output phase convention of a routing relay.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouterPhase {
    /// `S = [[Π⁺, Π⁻], [Π⁻, Π⁺]]`
    #[default]
    Standard,
    /// `S = [[−Π⁺, Π⁻], [Π⁻, Π⁺]]`: π phase on the `|+⟩`-routed output of port 1.
    FlippedPlus,
}

/// Feedback routing by a relay: port 1 exits on output 1 when the relay is
/// in `|+⟩` and on output 2 when in `|-⟩`.
pub fn relay_router(relay_index: usize, phase: RouterPhase) -> Result<SLHTriple> {
    let r = relay_site(relay_index)?;
    let plus = match phase {
        RouterPhase::Standard => OperatorSum::pi_plus(r),
        RouterPhase::FlippedPlus => -OperatorSum::pi_plus(r),
    };
    SLHTriple::new(
        vec![vec![plus, OperatorSum::pi_minus(r)], vec![OperatorSum::pi_minus(r), OperatorSum::pi_plus(r)]],
        vec![OperatorSum::zero(), OperatorSum::zero()],
        OperatorSum::zero(),
    )
}

fn check_relay_diagonal(f: &OperatorSum, name: &str) -> Result<()> {
    for term in f.terms() {
        for &(site, op) in &term.factors {
            let diagonal = matches!(op, LocalOp::PiPlus | LocalOp::PiMinus | LocalOp::Z);
            if !site.is_relay() || !diagonal {
                return Err(Error::NotRelayDiagonal(format!("{name} has factor {} on {site}", op.name())));
            }
        }
    }
    Ok(())
}

/// Effective Hamiltonian of a qubit illuminated by two Raman branch fields
/// with operator amplitudes `f1`, `f2`:
/// `(2Ω/β²)·Herm[f1† f2]·P_site`, `Herm[A] = (A + A†)/2`.
///
/// This is the strong-drive, weak-branch-coupling limit, in which the
/// branch couplings themselves drop out of the dissipator.
pub fn raman_pair(
    site: Site,
    axis: Pauli,
    f1: &OperatorSum,
    f2: &OperatorSum,
    omega: f64,
    beta: f64,
) -> Result<OperatorSum> {
    if !site.is_memory() {
        return Err(Error::InvalidSite(format!("Raman target must be a memory qubit, got {site}")));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
    }
    check_relay_diagonal(f1, "f1")?;
    check_relay_diagonal(f2, "f2")?;
    let overlap = &f1.adjoint() * f2;
    let herm = (&overlap + &overlap.adjoint()).scale(0.5);
    Ok((&herm * &axis.on(site)).scale(2.0 * omega / (beta * beta)))
}

/// Error channels `(1, √Γ·P_{i,j}, 0)` for each requested Pauli type over all
/// nine memory qubits, type-major then row-major.
pub fn error_channels(gamma: f64, types: &[Pauli]) -> Result<SLHTriple> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {gamma}")));
    }
    if types.is_empty() {
        return Err(Error::InvalidParameter("at least one error type is required".into()));
    }
    let root = gamma.sqrt();
    let blocks: Vec<SLHTriple> = types
        .iter()
        .flat_map(|&p| Site::all_memory().map(move |s| (p, s)))
        .map(|(p, s)| {
            SLHTriple::new(vec![vec![OperatorSum::identity()]], vec![p.on(s).scale(root)], OperatorSum::zero())
                .expect("single channel")
        })
        .collect();
    concat_all(&blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sites::SiteSpace;
    use crate::slh::{check_unitary, series, series_chain};

    #[test]
    fn beamsplitters_are_unitary() {
        for o in [
            BeamsplitterOrientation::Default,
            BeamsplitterOrientation::Negated,
            BeamsplitterOrientation::SwapInputs,
            BeamsplitterOrientation::SwapOutputs,
        ] {
            assert!(check_unitary(beamsplitter(o).s()).unwrap().max() < 1e-15, "{o:?}");
        }
    }

    #[test]
    fn beamsplitter_splits_a_drive() {
        let a = 3.0;
        let input = concat_all([&drive(2f64.sqrt() * a), &drive(0.0)]).unwrap();
        let out = series(&beamsplitter(BeamsplitterOrientation::Default), &input).unwrap();
        assert!(out.l()[0].approx_eq(&OperatorSum::scalar(a), 1e-12));
        assert!(out.l()[1].approx_eq(&OperatorSum::scalar(-a), 1e-12));
    }

    #[test]
    fn beamsplitter_squared() {
        // B◁B = [[0, 1], [-1, 0]]
        let b = beamsplitter(BeamsplitterOrientation::Default);
        let bb = series(&b, &b).unwrap();
        let expect = [[0.0, 1.0], [-1.0, 0.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(bb.s()[i][j].approx_eq(&OperatorSum::scalar(expect[i][j]), 1e-15), "({i},{j})");
            }
        }
    }

    #[test]
    fn zero_drive_is_identity() {
        assert_eq!(drive(0.0), identity(1));
    }

    #[test]
    fn probe_chain_is_column_parity() {
        let sites = [Site::memory(1, 2), Site::memory(2, 2), Site::memory(3, 2)];
        let probes: Vec<SLHTriple> = sites.iter().map(|&s| probe_qubit(s, ProbeAxis::Z).unwrap()).collect();
        let chain = series_chain(&probes).unwrap();
        let parity = OperatorSum::product_of(sites.iter().map(|&s| (s, LocalOp::Z)));
        assert!(chain.s()[0][0].approx_eq(&parity, 0.0));
        assert!(check_unitary(chain.s()).unwrap().max() < 1e-15);

        let a = 1.7;
        let driven = series(&chain, &drive(2f64.sqrt() * a)).unwrap();
        assert!(driven.l()[0].approx_eq(&parity.scale(2f64.sqrt() * a), 1e-12));
    }

    #[test]
    fn probe_on_relay_is_rejected() {
        assert!(probe_qubit(Site::relay(1), ProbeAxis::Z).is_err());
    }

    #[test]
    fn relay_set_reset_is_unitary_and_latches() {
        for r in 1..=4 {
            let g = relay_set_reset(r).unwrap();
            assert!(check_unitary(g.s()).unwrap().max() < 1e-12);
        }
        // No-error sector: only port 1 is lit with √2α.
        let a = 2.5;
        let r = Site::relay(1);
        let fed =
            series(&relay_set_reset(1).unwrap(), &concat_all([&drive(2f64.sqrt() * a), &drive(0.0)]).unwrap()).unwrap();
        assert!(fed.l()[0].approx_eq(&OperatorSum::sigma_pm(r).scale(2f64.sqrt() * a), 1e-12));
        assert!(fed.l()[1].approx_eq(&OperatorSum::pi_plus(r).scale(-(2f64.sqrt()) * a), 1e-12));
        // Both dissipators vanish on |+⟩: L1|+⟩ = 0 and |+⟩ is an eigenvector of L2.
        let space = SiteSpace::new([r]);
        let plus = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let l1 = fed.l()[0].to_matrix(&space).unwrap().matvec(&plus);
        assert!(l1.iter().all(|v| v.norm() < 1e-15));
        let l2 = fed.l()[1].to_matrix(&space).unwrap().matvec(&plus);
        assert!(l2[1].norm() < 1e-15);
    }

    #[test]
    fn router_routes_by_relay_state() {
        let g = relay_router(2, RouterPhase::Standard).unwrap();
        assert!(check_unitary(g.s()).unwrap().max() < 1e-12);
        assert!(check_unitary(relay_router(2, RouterPhase::FlippedPlus).unwrap().s()).unwrap().max() < 1e-12);
        let beta = 0.8;
        let fed = series(&g, &concat_all([&drive(beta), &drive(0.0)]).unwrap()).unwrap();
        let space = SiteSpace::new([Site::relay(2)]);
        let plus = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let minus = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let out = |k: usize, state: &[C64]| {
            let v = fed.l()[k].to_matrix(&space).unwrap().matvec(state);
            v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
        };
        assert!((out(0, &plus) - beta).abs() < 1e-15 && out(1, &plus) < 1e-15);
        assert!(out(0, &minus) < 1e-15 && (out(1, &minus) - beta).abs() < 1e-15);
    }

    #[test]
    fn raman_pair_examples() {
        let (omega, beta) = (7.0, 3.0);
        let r1 = Site::relay(1);
        let r2 = Site::relay(2);
        let s = FRAC_1_SQRT_2;

        let f1 = OperatorSum::pi_minus(r1).scale(-beta * s);
        let f2 = OperatorSum::pi_minus(r2).scale(-beta * s);
        let h = raman_pair(Site::memory(3, 2), Pauli::X, &f1, &f2, omega, beta).unwrap();
        let expect = (&(&OperatorSum::pi_minus(r1) * &OperatorSum::pi_minus(r2)) * &OperatorSum::x(Site::memory(3, 2)))
            .scale(omega);
        assert!(h.approx_eq(&expect, 1e-12));

        let f1 = OperatorSum::pi_minus(r1).scale(beta * s);
        let f2 = OperatorSum::pi_plus(r2).scale(beta);
        let h = raman_pair(Site::memory(3, 1), Pauli::X, &f1, &f2, omega, beta).unwrap();
        let expect = (&(&OperatorSum::pi_minus(r1) * &OperatorSum::pi_plus(r2)) * &OperatorSum::x(Site::memory(3, 1)))
            .scale(2f64.sqrt() * omega);
        assert!(h.approx_eq(&expect, 1e-12));
        assert!(h.is_hermitian());

        // Swapping the branches leaves the Hamiltonian unchanged.
        let swapped = raman_pair(Site::memory(3, 1), Pauli::X, &f2, &f1, omega, beta).unwrap();
        assert!(swapped.approx_eq(&h, 1e-12));

        let off = raman_pair(Site::memory(3, 1), Pauli::X, &OperatorSum::zero(), &f2, omega, beta).unwrap();
        assert!(off.is_zero());
    }

    #[test]
    fn raman_pair_rejects_non_diagonal_fields() {
        let f = OperatorSum::sigma_pm(Site::relay(1));
        let err = raman_pair(Site::memory(1, 1), Pauli::Z, &f, &f, 1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::NotRelayDiagonal(_)));
        let g = OperatorSum::z(Site::memory(2, 2));
        assert!(raman_pair(Site::memory(1, 1), Pauli::Z, &g, &g, 1.0, 1.0).is_err());
    }

    #[test]
    fn error_channel_counts() {
        let all = error_channels(0.1, &Pauli::ERROR_ORDER).unwrap();
        assert_eq!(all.n_channels(), 27);
        assert!(all.l()[0].approx_eq(&OperatorSum::x(Site::memory(1, 1)).scale(0.1f64.sqrt()), 1e-15));
        assert!(all.l()[26].approx_eq(&OperatorSum::y(Site::memory(3, 3)).scale(0.1f64.sqrt()), 1e-15));
        let off = error_channels(0.0, &Pauli::ERROR_ORDER).unwrap();
        assert!(off.l().iter().all(OperatorSum::is_zero));
        assert!(error_channels(-1.0, &Pauli::ERROR_ORDER).is_err());
    }
}
