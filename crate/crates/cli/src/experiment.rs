//! Curve sweeps: feedback strength (`fig3`), error type (`fig4`) and custom runs.

use std::time::Instant;

use qecnet_core::code::CodewordSpec;
use qecnet_core::network::{build_full_network, compare_master_equations, reference_master_equation, NetworkParams};
use qecnet_core::{Pauli, SiteSpace};
use qecnet_sim::trajectory::effective_dt;
use qecnet_sim::{
    fidelity_observable, relay_minus_population, run_ensemble, CompiledGenerator, EnsembleEstimate, Observable,
    TimeGrid,
};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const FIDELITY: &str = "fidelity";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Fig3,
    Fig4,
    Custom,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Custom => "custom",
        }
    }
}

impl std::str::FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig3" => Ok(Experiment::Fig3),
            "fig4" => Ok(Experiment::Fig4),
            "custom" => Ok(Experiment::Custom),
            other => Err(CliError::Config(format!("unknown experiment `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub label: String,
    pub params: NetworkParams,
    /// Feedback switched off (`Ω = 0`) as a reference curve.
    pub no_feedback: bool,
}

fn omega_label(omega: f64) -> String {
    format!("omega_{omega}")
}

/// The curves an experiment runs, in output order.
pub fn curve_specs(experiment: Experiment, cfg: &RunConfig) -> Result<Vec<CurveSpec>> {
    let base = cfg.network_params()?;
    let curve = |label: &str, params: NetworkParams| CurveSpec { label: label.into(), params, no_feedback: false };
    Ok(match experiment {
        Experiment::Fig3 => cfg
            .fig3
            .omegas
            .iter()
            .map(|&omega| {
                let params = NetworkParams {
                    omega,
                    alpha: omega / 8.0,
                    error_types: Pauli::ERROR_ORDER.to_vec(),
                    ..base.clone()
                };
                curve(&omega_label(omega), params)
            })
            .collect(),
        Experiment::Fig4 => {
            let with = |types: &[Pauli]| NetworkParams { error_types: types.to_vec(), ..base.clone() };
            vec![
                curve("x_only", with(&[Pauli::X])),
                curve("z_only", with(&[Pauli::Z])),
                curve("y_only", with(&[Pauli::Y])),
                curve("all_errors", with(&Pauli::ERROR_ORDER)),
                CurveSpec {
                    label: "no_feedback".into(),
                    params: NetworkParams { omega: 0.0, ..with(&Pauli::ERROR_ORDER) },
                    no_feedback: true,
                },
            ]
        }
        Experiment::Custom => vec![curve("custom", base)],
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveResult {
    pub spec: CurveSpec,
    pub estimate: EnsembleEstimate,
    pub dt: f64,
    /// Residual of the composed model against the hand-written one.
    pub oracle_residual: f64,
    pub wall_time_s: f64,
}

impl CurveResult {
    pub fn fidelity(&self) -> (&[f64], &[f64]) {
        let o = self.estimate.observable(FIDELITY).expect("fidelity is always recorded");
        (&o.mean, &o.stderr)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentResult {
    pub experiment: Experiment,
    pub config: RunConfig,
    pub times: Vec<f64>,
    pub bare_qubit: Vec<f64>,
    pub curves: Vec<CurveResult>,
    pub wall_time_s: f64,
}

impl ExperimentResult {
    pub fn curve(&self, label: &str) -> Option<&CurveResult> {
        self.curves.iter().find(|c| c.spec.label == label)
    }

    /// Grid index closest to `t`.
    pub fn index_of(&self, t: f64) -> usize {
        let mut best = 0;
        for (k, &s) in self.times.iter().enumerate() {
            if (s - t).abs() < (self.times[best] - t).abs() {
                best = k;
            }
        }
        best
    }
}

pub fn observables(space: &SiteSpace) -> Result<Vec<Observable>> {
    let spec = CodewordSpec::bacon_shor()?;
    let mut obs = vec![fidelity_observable(&spec.fidelity_operator(), space)?];
    for r in 1..=4 {
        obs.push(relay_minus_population(r, space)?);
    }
    Ok(obs)
}

pub fn run_curve(spec: &CurveSpec, cfg: &RunConfig) -> Result<CurveResult> {
    let start = Instant::now();
    let sim = &cfg.simulation;
    let me = build_full_network(&spec.params)?;
    let oracle_residual = compare_master_equations(&me, &reference_master_equation(&spec.params)?)?.max_residual();
    let gen = CompiledGenerator::from_master_equation(&me)?;
    let psi0 = CodewordSpec::bacon_shor()?.initial_state()?;
    let grid = TimeGrid::new(sim.t_max, sim.n_points)?;
    let dt = effective_dt(&gen, &grid, sim.dt)?;
    let obs = observables(&me.space)?;
    let estimate = run_ensemble(&gen, &psi0, &grid, Some(dt), sim.n_traj, sim.master_seed, sim.workers, &obs)?;
    Ok(CurveResult { spec: spec.clone(), estimate, dt, oracle_residual, wall_time_s: start.elapsed().as_secs_f64() })
}

/// Runs every curve of `experiment`. All curves share the master seed.
pub fn run_experiment(experiment: Experiment, cfg: &RunConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let grid = TimeGrid::new(cfg.simulation.t_max, cfg.simulation.n_points)?;
    let times = grid.points();
    let bare_qubit = times.iter().map(|&t| qecnet_core::code::bare_qubit_fidelity(cfg.model.gamma, t)).collect();
    let curves = curve_specs(experiment, cfg)?.iter().map(|s| run_curve(s, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult {
        experiment,
        config: cfg.clone(),
        times,
        bare_qubit,
        curves,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
