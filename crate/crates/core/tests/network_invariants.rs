use proptest::prelude::*;
use qecnet_core::catalog::{probe_qubit, raman_pair, ProbeAxis};
use qecnet_core::code::{gauge_and_logical_operators, stabilizer_generators};
use qecnet_core::network::{
    build_full_network, build_network_parts, build_reduced_column_network, compare_master_equations, NetworkParams,
    Topology,
};
use qecnet_core::slh::{concat_all, extract_master_equation, series_chain};
use qecnet_core::{CsrMatrix, LocalOp, OperatorSum, Pauli, Site, SiteSpace};

fn commutator_norm(a: &OperatorSum, b: &OperatorSum, space: &SiteSpace) -> f64 {
    (&(a * b) - &(b * a)).to_matrix(space).unwrap().max_abs()
}

#[test]
fn probe_couplings_commute_with_code_operators() {
    let params = NetworkParams::default();
    let parts = build_network_parts(&params).unwrap();
    let ops = gauge_and_logical_operators().unwrap();
    let mut checks: Vec<OperatorSum> = stabilizer_generators().iter().map(|s| s.to_operator()).collect();
    checks.push(ops.x_l.to_operator());
    checks.push(ops.z_l.to_operator());
    for probe in [&parts.probe_z, &parts.probe_x] {
        let space = probe.support().union(&SiteSpace::memory());
        for c in &checks {
            for l in probe.l() {
                assert!(commutator_norm(l, c, &space) < 1e-12);
            }
        }
    }
}

#[test]
fn column_chain_scattering_is_a_column_product() {
    let col = |c: usize| {
        let stages: Vec<_> = (1..=3).map(|r| probe_qubit(Site::memory(r, c), ProbeAxis::Z).unwrap()).collect();
        series_chain(&stages).unwrap().s()[0][0].clone()
    };
    let s2 = col(2);
    let want = OperatorSum::product_of((1..=3).map(|r| (Site::memory(r, 2), LocalOp::Z)));
    let space = SiteSpace::memory();
    assert!(s2.to_matrix(&space).unwrap().max_abs_diff(&want.to_matrix(&space).unwrap()) < 1e-15);
    // A single column product anticommutes with X_L; the parity of two commutes.
    let ops = gauge_and_logical_operators().unwrap();
    let xl = ops.x_l.to_operator();
    assert!(commutator_norm(&s2, &xl, &space) > 1.0);
    let parity = &col(1) * &s2;
    assert!(commutator_norm(&parity, &xl, &space) < 1e-12);
    assert!(commutator_norm(&parity, &ops.z_l.to_operator(), &space) < 1e-12);
}

#[test]
fn total_decay_rate_is_state_independent() {
    for (alpha, gamma) in [(12.5, 0.1), (3.0, 0.7), (0.0, 0.2)] {
        let params = NetworkParams { alpha, gamma, ..NetworkParams::default() };
        let me = build_full_network(&params).unwrap();
        let (_, ls) = me.compile().unwrap();
        let dim = me.space.dim();
        let mut total = CsrMatrix::zeros(dim, dim);
        for l in &ls {
            total = total.add(&l.adjoint().matmul(l));
        }
        let rate = 8.0 * alpha * alpha + 27.0 * gamma;
        let want = CsrMatrix::identity(dim).scale(rate.into());
        assert!(total.max_abs_diff(&want) < 1e-9 * rate.max(1.0), "alpha={alpha} gamma={gamma}");
    }
}

#[test]
fn concatenation_order_does_not_change_the_model() {
    let params = NetworkParams::default();
    let parts = build_network_parts(&params).unwrap();
    let errors = parts.errors.clone().unwrap();
    let a = build_full_network(&params).unwrap();
    let g = concat_all([&errors, &parts.probe_x, &parts.probe_z]).unwrap().with_added_hamiltonian(&parts.feedback);
    let b = extract_master_equation(&g).on_space(SiteSpace::full());
    let report = compare_master_equations(&a, &b).unwrap();
    assert!(report.max_residual() < 1e-12);
    assert_ne!(report.pairing, (0..35).collect::<Vec<_>>());
}

#[test]
fn topologies_agree_on_reduced_and_full_models() {
    let grid = NetworkParams::default();
    let zig = NetworkParams { topology: Topology::Zigzag, ..grid.clone() };
    let a = build_reduced_column_network(&grid).unwrap();
    let b = build_reduced_column_network(&zig).unwrap();
    assert_eq!(a.space.dim(), 32);
    assert!(compare_master_equations(&a, &b).unwrap().max_residual() < 1e-12);
}

#[test]
fn feedback_hamiltonian_is_hermitian_and_relay_gated() {
    let parts = build_network_parts(&NetworkParams::default()).unwrap();
    let h = parts.feedback.to_matrix(&SiteSpace::full()).unwrap();
    assert!(h.max_abs_diff(&h.adjoint()) < 1e-12);
    // With every relay in |+⟩ no correction is applied.
    let all_plus = (1..=4).fold(OperatorSum::identity(), |acc, r| &acc * &OperatorSum::pi_plus(Site::relay(r)));
    let gated = &parts.feedback * &all_plus;
    assert!(gated.to_matrix(&SiteSpace::full()).unwrap().max_abs() < 1e-12);
}

fn relay_amplitude() -> impl Strategy<Value = OperatorSum> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 1usize..=4).prop_map(|(a, b, c, r)| {
        let r = Site::relay(r);
        &(&OperatorSum::pi_plus(r).scale(a) + &OperatorSum::pi_minus(r).scale(num_complex::Complex64::new(0.0, b)))
            + &OperatorSum::scalar(num_complex::Complex64::new(c, 0.0))
    })
}

proptest! {
    #[test]
    fn raman_coupling_is_symmetric_and_hermitian(f1 in relay_amplitude(), f2 in relay_amplitude(), omega in 0.0..200.0f64) {
        let q = Site::memory(2, 3);
        let space = SiteSpace::new([q, Site::relay(1), Site::relay(2), Site::relay(3), Site::relay(4)]);
        let h12 = raman_pair(q, Pauli::X, &f1, &f2, omega, 1.0).unwrap().to_matrix(&space).unwrap();
        let h21 = raman_pair(q, Pauli::X, &f2, &f1, omega, 1.0).unwrap().to_matrix(&space).unwrap();
        prop_assert!(h12.max_abs_diff(&h21) < 1e-12);
        prop_assert!(h12.max_abs_diff(&h12.adjoint()) < 1e-12);
    }
}

#[test]
fn raman_rejects_non_diagonal_amplitudes() {
    let q = Site::memory(1, 1);
    let bad = OperatorSum::sigma_pm(Site::relay(1));
    assert!(raman_pair(q, Pauli::Z, &bad, &OperatorSum::identity(), 1.0, 1.0).is_err());
    assert!(raman_pair(Site::relay(2), Pauli::Z, &OperatorSum::identity(), &OperatorSum::identity(), 1.0, 1.0).is_err());
}
