mod common;

use common::*;
use num_complex::Complex64 as C64;
use qecnet_core::code::CodewordSpec;
use qecnet_core::network::{build_reduced_column_network, NetworkParams};
use qecnet_core::slh::MasterEquation;
use qecnet_core::{OperatorSum, Site, SiteSpace};
use qecnet_sim::dense::dense_step_bound;
use qecnet_sim::{integrate_dense, pure_density, Observable, SimError, TimeGrid};

#[test]
fn bare_qubit_matches_analytic_fidelity() {
    let me = one_qubit_model(OperatorSum::zero(), pauli_channels(0.1));
    let grid = TimeGrid::new(5.0, 51).unwrap();
    let f = Observable::new("fidelity", &y_plus_projector(), &me.space).unwrap();
    let out = integrate_dense(&me, &pure_density(&y_plus()), &grid, None, &[f]).unwrap();
    for (t, v) in out.times.iter().zip(&out.values[0]) {
        assert!((v - qecnet_core::code::bare_qubit_fidelity(0.1, *t)).abs() < 1e-6);
    }
    assert!(out.max_trace_drift < 1e-8);
    assert!(out.max_hermiticity_deviation < 1e-8);
    assert!(out.final_min_eigenvalue > -1e-6);
}

#[test]
fn hamiltonian_evolution_keeps_purity() {
    let a = Site::memory(1, 1);
    let b = Site::memory(2, 2);
    let h = &(&OperatorSum::x(a).scale(0.9) + &(&OperatorSum::z(a) * &OperatorSum::z(b)).scale(0.4))
        + &OperatorSum::y(b).scale(-0.3);
    let me = MasterEquation { hamiltonian: h, collapse_ops: vec![], space: SiteSpace::new([a, b]) };
    let psi = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    let rho = evolve(&me, &psi, 4.0, 1e-3);
    let purity: f64 =
        (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| (rho[i * 4 + j] * rho[j * 4 + i]).re).sum();
    assert!((purity - 1.0).abs() < 1e-8);
}

/// Final density matrix, read back through elementary observables.
fn evolve(me: &MasterEquation, psi: &[C64], t: f64, dt: f64) -> Vec<C64> {
    let n = psi.len();
    let grid = TimeGrid::new(t, 2).unwrap();
    let mut obs = Vec::new();
    // Re and Im parts of ρ_ij from Tr(Oρ) with O = |j⟩⟨i| + h.c. and i(|j⟩⟨i| − h.c.).
    for i in 0..n {
        for j in 0..n {
            let mut m = vec![C64::new(0.0, 0.0); n * n];
            m[j * n + i] += 0.5;
            m[i * n + j] += 0.5;
            obs.push(Observable { label: format!("re{i}{j}"), matrix: qecnet_core::CsrMatrix::from_dense(n, n, &m) });
            let mut m = vec![C64::new(0.0, 0.0); n * n];
            m[j * n + i] += C64::new(0.0, -0.5);
            m[i * n + j] += C64::new(0.0, 0.5);
            obs.push(Observable { label: format!("im{i}{j}"), matrix: qecnet_core::CsrMatrix::from_dense(n, n, &m) });
        }
    }
    let out = integrate_dense(me, &pure_density(psi), &grid, Some(dt), &obs).unwrap();
    (0..n * n).map(|k| C64::new(out.values[2 * k][1], out.values[2 * k + 1][1])).collect()
}

#[test]
fn rk4_converges_at_fourth_order() {
    let a = Site::memory(1, 1);
    let b = Site::memory(1, 2);
    let h = &OperatorSum::x(a).scale(1.1) + &(&OperatorSum::z(a) * &OperatorSum::x(b)).scale(0.7);
    let me = MasterEquation {
        hamiltonian: h,
        collapse_ops: vec![OperatorSum::sigma_pm(a).scale(0.8), OperatorSum::z(b).scale(0.5)],
        space: SiteSpace::new([a, b]),
    };
    let psi = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    let grid = TimeGrid::new(1.0, 2).unwrap();
    let obs = [Observable::new("p", &(&OperatorSum::z(a) + &OperatorSum::y(a)), &me.space).unwrap()];
    let run = |dt: f64| integrate_dense(&me, &pure_density(&psi), &grid, Some(dt), &obs).unwrap().values[0][1];
    let reference = run(1.0 / 1600.0);
    let dts = [1.0 / 25.0, 1.0 / 50.0, 1.0 / 100.0];
    let errs: Vec<f64> = dts.iter().map(|&dt| (run(dt) - reference).abs()).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 3.5, "observed order {order} from errors {errs:?}");
    }
}

#[test]
fn reduced_column_model_is_steady_without_errors() {
    let params = NetworkParams { gamma: 0.0, ..NetworkParams::default() };
    let me = build_reduced_column_network(&params).unwrap();
    let spec = CodewordSpec::column();
    let f = Observable::new("fidelity", &spec.fidelity_operator(), &me.space).unwrap();
    let grid = TimeGrid::new(1.0, 11).unwrap();
    let out = integrate_dense(&me, &pure_density(&spec.initial_state().unwrap()), &grid, None, &[f]).unwrap();
    assert!(out.values[0].iter().all(|v| (v - 1.0).abs() < 1e-8));
}

#[test]
fn guards_reject_large_problems_and_steps() {
    let me = one_qubit_model(OperatorSum::zero(), pauli_channels(0.1));
    let grid = TimeGrid::new(1.0, 3).unwrap();
    let bound = dense_step_bound(&me).unwrap();
    let err = integrate_dense(&me, &pure_density(&y_plus()), &grid, Some(2.0 * bound), &[]);
    assert!(matches!(err, Err(SimError::StepTooLarge { .. })));

    let sites: Vec<Site> = Site::all_memory().chain([Site::relay(1), Site::relay(2)]).collect();
    let big = MasterEquation { hamiltonian: OperatorSum::zero(), collapse_ops: vec![], space: SiteSpace::new(sites) };
    let err = integrate_dense(&big, &[], &grid, None, &[]);
    assert!(matches!(err, Err(SimError::DimensionGuard { dim: 2048, limit: 1024 })));
}
