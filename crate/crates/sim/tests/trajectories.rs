mod common;

use common::*;
use num_complex::Complex64 as C64;
use qecnet_core::{OperatorSum, Site, SiteSpace};
use qecnet_sim::{
    integrate_dense, pure_density, run_ensemble, run_trajectory, CompiledGenerator, Observable, SimError, TimeGrid,
};

#[test]
fn without_collapse_operators_evolution_is_unitary() {
    // H = ω Z on |+x⟩: ⟨X⟩ = cos(2ωt).
    let omega = 1.7;
    let me = one_qubit_model(OperatorSum::z(qubit()).scale(omega), vec![]);
    let gen = CompiledGenerator::from_master_equation(&me).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let psi = vec![C64::new(r, 0.0), C64::new(r, 0.0)];
    let grid = TimeGrid::new(3.0, 31).unwrap();
    let x = Observable::new("x", &OperatorSum::x(qubit()), &me.space).unwrap();
    for (dt, tol) in [(None, 1e-4), (Some(1e-3), 1e-10)] {
        let out = run_trajectory(&gen, &psi, &grid, dt, 5, std::slice::from_ref(&x)).unwrap();
        assert!(out.jumps.is_empty());
        for (t, v) in out.times.iter().zip(&out.samples[0]) {
            assert!((v - (2.0 * omega * t).cos()).abs() < tol, "t = {t}");
        }
    }
}

#[test]
fn dephasing_decays_at_twice_the_rate() {
    let gamma: f64 = 0.5;
    let me = one_qubit_model(OperatorSum::zero(), vec![OperatorSum::z(qubit()).scale(gamma.sqrt())]);
    let gen = CompiledGenerator::from_master_equation(&me).unwrap();
    let grid = TimeGrid::new(3.0, 31).unwrap();
    let y = Observable::new("y", &OperatorSum::y(qubit()), &me.space).unwrap();
    let est = run_ensemble(&gen, &y_plus(), &grid, None, 2000, 17, 2, &[y]).unwrap();
    let want: Vec<f64> = grid.points().iter().map(|t| (-2.0 * gamma * t).exp()).collect();
    let o = &est.observables[0];
    assert!(fraction_within(&o.mean, &o.stderr, &want, 3.0) >= 0.95);
}

#[test]
fn waiting_times_are_exponential() {
    // Kolmogorov-Smirnov against 1 − e^{−Γτ} at the 1% level.
    let gamma: f64 = 1.3;
    let me = one_qubit_model(OperatorSum::zero(), vec![OperatorSum::z(qubit()).scale(gamma.sqrt())]);
    let gen = CompiledGenerator::from_master_equation(&me).unwrap();
    let grid = TimeGrid::new(10_000.0 / gamma, 2).unwrap();
    let out = run_trajectory(&gen, &y_plus(), &grid, None, 2024, &[]).unwrap();
    let mut waits: Vec<f64> = out.jumps.windows(2).map(|w| w[1].time - w[0].time).collect();
    waits.insert(0, out.jumps[0].time);
    assert!(waits.len() > 9_000, "only {} jumps", waits.len());
    waits.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = waits.len() as f64;
    let d = waits
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let f = 1.0 - (-gamma * w).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    assert!(d < 1.628 / n.sqrt(), "KS statistic {d}");
    assert!(out.jumps.iter().all(|j| j.channel == 1));
}

#[test]
fn state_dependent_decay_matches_dense_solution() {
    // Amplitude damping from |1⟩ plus a drive: exercises the non-constant
    // jump rate path.
    let gamma: f64 = 0.8;
    let me =
        one_qubit_model(OperatorSum::x(qubit()).scale(0.6), vec![OperatorSum::sigma_pm(qubit()).scale(gamma.sqrt())]);
    let gen = CompiledGenerator::from_master_equation(&me).unwrap();
    assert!(gen.decay_shift > 0.0);
    let psi = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    let grid = TimeGrid::new(4.0, 41).unwrap();
    let pop = Observable::new("excited", &OperatorSum::pi_minus(qubit()), &me.space).unwrap();
    let dense = integrate_dense(&me, &pure_density(&psi), &grid, None, std::slice::from_ref(&pop)).unwrap();
    let est = run_ensemble(&gen, &psi, &grid, None, 3000, 99, 1, &[pop]).unwrap();
    let o = &est.observables[0];
    assert!(fraction_within(&o.mean, &o.stderr, &dense.values[0], 3.0) >= 0.95);
    // Without drive the excited population is e^{−γt}.
    let me0 = one_qubit_model(OperatorSum::zero(), vec![OperatorSum::sigma_pm(qubit()).scale(gamma.sqrt())]);
    let pop0 = Observable::new("excited", &OperatorSum::pi_minus(qubit()), &me0.space).unwrap();
    let d0 = integrate_dense(&me0, &pure_density(&psi), &grid, None, &[pop0]).unwrap();
    for (t, v) in d0.times.iter().zip(&d0.values[0]) {
        assert!((v - (-gamma * t).exp()).abs() < 1e-6);
    }
}

#[test]
fn bare_qubit_trajectories_match_analytic_curve() {
    let me = one_qubit_model(OperatorSum::zero(), pauli_channels(0.1));
    let gen = CompiledGenerator::from_master_equation(&me).unwrap();
    let grid = TimeGrid::new(5.0, 51).unwrap();
    let f = Observable::new("fidelity", &y_plus_projector(), &me.space).unwrap();
    let est = run_ensemble(&gen, &y_plus(), &grid, None, 2000, 3, 1, &[f]).unwrap();
    let want: Vec<f64> = grid.points().iter().map(|t| 0.5 * (1.0 + (-0.4 * t).exp())).collect();
    let o = &est.observables[0];
    assert!(fraction_within(&o.mean, &o.stderr, &want, 3.0) >= 0.95);
}

#[test]
fn ensembles_are_independent_of_worker_count() {
    let me = one_qubit_model(OperatorSum::x(qubit()).scale(0.3), pauli_channels(0.4));
    let gen = CompiledGenerator::from_master_equation(&me).unwrap();
    let grid = TimeGrid::new(2.0, 11).unwrap();
    let f = Observable::new("fidelity", &y_plus_projector(), &me.space).unwrap();
    let obs = [f];
    let a = run_ensemble(&gen, &y_plus(), &grid, None, 64, 42, 1, &obs).unwrap();
    let b = run_ensemble(&gen, &y_plus(), &grid, None, 64, 42, 8, &obs).unwrap();
    assert_eq!(a, b);
    let c = run_ensemble(&gen, &y_plus(), &grid, None, 64, 43, 1, &obs).unwrap();
    assert_ne!(a.observables, c.observables);

    let single = run_ensemble(&gen, &y_plus(), &grid, None, 1, 42, 4, &obs).unwrap();
    let traj = run_trajectory(&gen, &y_plus(), &grid, None, 42, &obs).unwrap();
    assert_eq!(single.observables[0].mean, traj.samples[0]);
    assert!(single.observables[0].stderr.iter().all(|&s| s == 0.0));
}

#[test]
fn jump_log_is_consistent() {
    let me = one_qubit_model(OperatorSum::zero(), pauli_channels(1.0));
    let gen = CompiledGenerator::from_master_equation(&me).unwrap();
    let grid = TimeGrid::new(20.0, 3).unwrap();
    let out = run_trajectory(&gen, &y_plus(), &grid, None, 8, &[]).unwrap();
    assert!(out.jumps.len() > 20);
    assert!(out.jumps.iter().all(|j| (1..=3).contains(&j.channel)));
    assert!(out.jumps.windows(2).all(|w| w[0].time <= w[1].time));
    assert!(out.jumps.last().unwrap().time <= 20.0);
}

#[test]
fn invalid_inputs_are_rejected() {
    let me = one_qubit_model(OperatorSum::zero(), pauli_channels(0.1));
    let gen = CompiledGenerator::from_master_equation(&me).unwrap();
    let grid = TimeGrid::new(1.0, 3).unwrap();
    let bad = vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
    assert!(matches!(run_trajectory(&gen, &bad, &grid, None, 0, &[]), Err(SimError::InvalidInput(_))));
    assert!(TimeGrid::new(1.0, 1).is_err());
    assert!(run_ensemble(&gen, &y_plus(), &grid, None, 0, 0, 1, &[]).is_err());
    let space = SiteSpace::new([qubit(), Site::memory(1, 2)]);
    let wrong = Observable::new("zz", &OperatorSum::z(Site::memory(1, 2)), &space);
    assert!(wrong.is_ok());
}
