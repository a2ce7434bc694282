use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SimError};
use crate::generator::CompiledGenerator;
use crate::grid::TimeGrid;
use crate::observable::Observable;
use crate::trajectory::{run_trajectory_indexed, TrajectoryResult};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObservableEstimate {
    pub label: String,
    pub mean: Vec<f64>,
    /// Sample standard deviation over `√N` (zero for a single trajectory).
    pub stderr: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleEstimate {
    pub times: Vec<f64>,
    pub n_traj: usize,
    pub master_seed: u64,
    pub observables: Vec<ObservableEstimate>,
    pub total_jumps: u64,
    pub total_steps: u64,
}

impl EnsembleEstimate {
    pub fn observable(&self, label: &str) -> Option<&ObservableEstimate> {
        self.observables.iter().find(|o| o.label == label)
    }
}

/// Runs `n` trajectories, trajectory `k` on RNG stream `k` of `master_seed`,
/// over a pool of `workers` threads. Results are reduced in trajectory order,
/// so the estimate does not depend on the worker count.
#[allow(clippy::too_many_arguments)]
pub fn run_ensemble(
    gen: &CompiledGenerator,
    psi0: &[C64],
    grid: &TimeGrid,
    dt: Option<f64>,
    n: usize,
    master_seed: u64,
    workers: usize,
    observables: &[Observable],
) -> Result<EnsembleEstimate> {
    if n == 0 {
        return Err(SimError::InvalidInput("at least one trajectory is required".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| SimError::InvalidInput(format!("thread pool: {e}")))?;
    let runs: Vec<TrajectoryResult> = pool.install(|| {
        (0..n as u64)
            .into_par_iter()
            .map(|k| run_trajectory_indexed(gen, psi0, grid, dt, master_seed, k, observables))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(reduce(&runs, grid, master_seed, observables))
}

fn reduce(
    runs: &[TrajectoryResult],
    grid: &TimeGrid,
    master_seed: u64,
    observables: &[Observable],
) -> EnsembleEstimate {
    let n = runs.len();
    let estimates = observables
        .iter()
        .enumerate()
        .map(|(o, obs)| {
            let mut mean = vec![0.0; grid.n_points];
            for run in runs {
                mean.iter_mut().zip(&run.samples[o]).for_each(|(m, x)| *m += x);
            }
            mean.iter_mut().for_each(|m| *m /= n as f64);
            let mut stderr = vec![0.0; grid.n_points];
            if n > 1 {
                for run in runs {
                    stderr.iter_mut().zip(&run.samples[o]).zip(&mean).for_each(|((s, x), m)| *s += (x - m).powi(2));
                }
                stderr.iter_mut().for_each(|s| *s = (*s / (n - 1) as f64).sqrt() / (n as f64).sqrt());
            }
            ObservableEstimate { label: obs.label.clone(), mean, stderr }
        })
        .collect();
    EnsembleEstimate {
        times: grid.points(),
        n_traj: n,
        master_seed,
        observables: estimates,
        total_jumps: runs.iter().map(|r| r.jumps.len() as u64).sum(),
        total_steps: runs.iter().map(|r| r.steps as u64).sum(),
    }
}
