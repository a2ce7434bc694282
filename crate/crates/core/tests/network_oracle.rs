use qecnet_core::catalog::ProbeAxis;
use qecnet_core::code::CodewordSpec;
use qecnet_core::network::{
    build_full_network, build_network_parts, build_probe_network, build_zigzag_probe, compare_master_equations,
    generator_norm_on_pure_state, reference_master_equation, GaugeEntry, NetworkParams, ProbeLayout, Topology,
};
use qecnet_core::slh::{check_unitary, extract_master_equation};
use qecnet_core::{LocalOp, OperatorSum, Pauli, Site, SiteSpace};

#[test]
fn composed_network_equals_reference() {
    let params = NetworkParams::default();
    let built = build_full_network(&params).unwrap();
    let reference = reference_master_equation(&params).unwrap();
    assert_eq!(built.collapse_ops.len(), 35);
    assert!(built.hamiltonian.is_hermitian());
    let report = compare_master_equations(&built, &reference).unwrap();
    assert!(report.max_residual() < 1e-10, "{report:?}");
    // Composition is exact, so the pairing is the identity.
    assert_eq!(report.pairing, (0..35).collect::<Vec<_>>());
    assert!(built.hamiltonian.approx_eq(&reference.hamiltonian, 1e-12));
}

#[test]
fn self_comparison_is_zero() {
    let me = reference_master_equation(&NetworkParams::default()).unwrap();
    assert_eq!(compare_master_equations(&me, &me).unwrap().max_residual(), 0.0);
}

#[test]
fn global_channel_phase_is_quotiented() {
    let a = reference_master_equation(&NetworkParams::default()).unwrap();
    let mut b = a.clone();
    b.collapse_ops[3] = -&b.collapse_ops[3];
    b.collapse_ops[12] = b.collapse_ops[12].scale(num_complex::Complex64::new(0.0, 1.0));
    b.collapse_ops.swap(0, 20);
    let report = compare_master_equations(&a, &b).unwrap();
    assert!(report.max_residual() < 1e-12, "{report:?}");
    assert_eq!(report.pairing[0], 20);
}

#[test]
fn wrong_gauge_is_detected() {
    let params =
        NetworkParams { gauge: vec![GaugeEntry { site: Site::memory(3, 3), pauli: Pauli::Z }], ..Default::default() };
    let built = build_full_network(&params).unwrap();
    let reference = reference_master_equation(&NetworkParams::default()).unwrap();
    let report = compare_master_equations(&built, &reference).unwrap();
    assert!(report.hamiltonian_residual > 1.0, "{report:?}");
}

#[test]
fn relay_z_gauge_is_the_odd_parity_sign() {
    // Reading the odd-parity operator as P − 1 instead of 1 − P is the same
    // model seen through Z on every relay.
    let params = NetworkParams::default();
    let gauge = (1..=4).map(|r| GaugeEntry { site: Site::relay(r), pauli: Pauli::Z }).collect();
    let built = build_full_network(&NetworkParams { gauge, ..params.clone() }).unwrap();
    let mut flipped = reference_master_equation(&params).unwrap();
    let k = params.alpha / 2f64.sqrt();
    let parities = [
        column_parity(1, 2, LocalOp::Z),
        column_parity(3, 2, LocalOp::Z),
        column_parity(1, 2, LocalOp::X),
        column_parity(3, 2, LocalOp::X),
    ];
    for (i, p) in parities.iter().enumerate() {
        let r = Site::relay(i + 1);
        let odd = p - &OperatorSum::identity();
        let even = &OperatorSum::identity() + p;
        flipped.collapse_ops[2 * i] =
            (&(&OperatorSum::pi_minus(r) * &odd) + &(&OperatorSum::sigma_pm(r) * &even)).scale(k);
        flipped.collapse_ops[2 * i + 1] =
            -(&(&OperatorSum::sigma_mp(r) * &odd) + &(&OperatorSum::pi_plus(r) * &even)).scale(k);
    }
    assert!(compare_master_equations(&built, &flipped).unwrap().max_residual() < 1e-10);
    let plain = build_full_network(&params).unwrap();
    assert!(compare_master_equations(&plain, &flipped).unwrap().collapse_residual > 1.0);
}

/// `Z`-type: columns `a`, `b`; `X`-type: rows `a`, `b`.
fn column_parity(a: usize, b: usize, op: LocalOp) -> OperatorSum {
    let sites = (1..=3).flat_map(|k| match op {
        LocalOp::Z => [Site::memory(k, a), Site::memory(k, b)],
        _ => [Site::memory(a, k), Site::memory(b, k)],
    });
    OperatorSum::product_of(sites.map(|s| (s, op)))
}

#[test]
fn zigzag_matches_grid() {
    let grid = build_full_network(&NetworkParams::default()).unwrap();
    let zz = build_full_network(&NetworkParams { topology: Topology::Zigzag, ..Default::default() }).unwrap();
    assert!(compare_master_equations(&grid, &zz).unwrap().max_residual() < 1e-10);
    for axis in [ProbeAxis::Z, ProbeAxis::X] {
        let a = extract_master_equation(&build_zigzag_probe(axis, 2.0).unwrap()).on_space(SiteSpace::full());
        let b = extract_master_equation(&build_probe_network(&ProbeLayout::grid(axis), 2.0).unwrap())
            .on_space(SiteSpace::full());
        assert!(compare_master_equations(&a, &b).unwrap().max_residual() < 1e-10);
    }
}

#[test]
fn composed_stages_are_unitary() {
    let parts = build_network_parts(&NetworkParams::default()).unwrap();
    for g in [&parts.probe_z, &parts.probe_x] {
        assert!(check_unitary(g.s()).unwrap().max() < 1e-12);
    }
}

#[test]
fn codeword_is_steady_without_errors() {
    let params = NetworkParams { gamma: 0.0, ..Default::default() };
    let me = build_full_network(&params).unwrap();
    let (h, ls) = me.compile().unwrap();
    let psi = CodewordSpec::bacon_shor().unwrap().initial_state().unwrap();
    let norm = generator_norm_on_pure_state(&h, &ls, &psi);
    assert!(norm < 1e-10, "{norm}");
    // Negative control: with errors switched on the state moves.
    let noisy = build_full_network(&NetworkParams::default()).unwrap();
    let (h, ls) = noisy.compile().unwrap();
    assert!(generator_norm_on_pure_state(&h, &ls, &psi) > 0.1);
}
