use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::active::ActiveVec;
use crate::error::{Result, SimError};
use crate::generator::CompiledGenerator;
use crate::grid::TimeGrid;
use crate::observable::Observable;

const TAYLOR_ORDER: usize = 4;
/// Jump-time location accuracy in norm², relative to the threshold when it is below 1.
const BISECTION_TOL: f64 = 1e-10;
/// Amplitudes below `√PRUNE_TOL` of the norm are dropped after jumps and at
/// grid points.
const PRUNE_TOL: f64 = 1e-28;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JumpRecord {
    pub time: f64,
    /// 1-based channel number.
    pub channel: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryResult {
    pub times: Vec<f64>,
    /// `samples[o][k]`: observable `o` at grid point `k`.
    pub samples: Vec<Vec<f64>>,
    pub jumps: Vec<JumpRecord>,
    pub seed: u64,
    pub index: u64,
    pub steps: usize,
}

/// Per-trajectory generator: stream `index` of a ChaCha keyed by `seed`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Resolves the step actually taken: `dt` (or the generator default),
/// shrunk so that every grid interval holds a whole number of steps.
pub fn effective_dt(gen: &CompiledGenerator, grid: &TimeGrid, dt: Option<f64>) -> Result<f64> {
    let dt = dt.unwrap_or_else(|| gen.default_dt());
    if !(dt > 0.0) {
        return Err(SimError::InvalidInput(format!("dt must be > 0, got {dt}")));
    }
    Ok(grid.spacing() / grid.substeps(dt) as f64)
}

/// One waiting-time trajectory on stream 0 of `seed`.
pub fn run_trajectory(
    gen: &CompiledGenerator,
    psi0: &[C64],
    grid: &TimeGrid,
    dt: Option<f64>,
    seed: u64,
    observables: &[Observable],
) -> Result<TrajectoryResult> {
    run_trajectory_indexed(gen, psi0, grid, dt, seed, 0, observables)
}

pub(crate) fn run_trajectory_indexed(
    gen: &CompiledGenerator,
    psi0: &[C64],
    grid: &TimeGrid,
    dt: Option<f64>,
    seed: u64,
    index: u64,
    observables: &[Observable],
) -> Result<TrajectoryResult> {
    if psi0.len() != gen.dim() {
        return Err(SimError::InvalidInput(format!("state has length {}, expected {}", psi0.len(), gen.dim())));
    }
    let norm2: f64 = psi0.iter().map(|v| v.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > 1e-10 {
        return Err(SimError::InvalidInput(format!("initial state norm² = {norm2}, expected 1")));
    }
    let h = effective_dt(gen, grid, dt)?;
    let n_sub = grid.substeps(h);
    let mut walker = Walker::new(gen, ActiveVec::from_dense(psi0), trajectory_rng(seed, index));
    let mut samples: Vec<Vec<f64>> = observables.iter().map(|_| Vec::with_capacity(grid.n_points)).collect();
    let record = |psi: &ActiveVec, samples: &mut Vec<Vec<f64>>| {
        for (o, s) in observables.iter().zip(samples.iter_mut()) {
            s.push(o.on_active(psi));
        }
    };
    record(&walker.phi, &mut samples);
    for k in 1..grid.n_points {
        let t0 = grid.point(k - 1);
        for m in 0..n_sub {
            walker.advance(t0 + m as f64 * h, h)?;
        }
        walker.renormalize();
        record(&walker.phi, &mut samples);
    }
    Ok(TrajectoryResult { times: grid.points(), samples, jumps: walker.jumps, seed, index, steps: walker.steps })
}

/// Waiting-time unraveling state. The true unnormalized norm² is
/// `exp(log_w)·‖φ‖²`; a jump fires when it falls to `r`.
struct Walker<'a> {
    gen: &'a CompiledGenerator,
    phi: ActiveVec,
    log_w: f64,
    r: f64,
    rng: ChaCha8Rng,
    /// `v_0 … v_4` of the current step.
    taylor: Vec<ActiveVec>,
    /// Union of the Taylor supports.
    support: ActiveVec,
    trial: ActiveVec,
    jumps: Vec<JumpRecord>,
    steps: usize,
    can_jump: bool,
}

impl<'a> Walker<'a> {
    fn new(gen: &'a CompiledGenerator, phi: ActiveVec, mut rng: ChaCha8Rng) -> Self {
        let r = draw_threshold(&mut rng);
        let dim = phi.val.len();
        Walker {
            gen,
            phi,
            log_w: 0.0,
            r,
            rng,
            taylor: (0..=TAYLOR_ORDER).map(|_| ActiveVec::zeros(dim)).collect(),
            support: ActiveVec::zeros(dim),
            trial: ActiveVec::zeros(dim),
            jumps: Vec::new(),
            steps: 0,
            can_jump: gen.jump_ops.iter().any(|l| l.nnz() > 0),
        }
    }

    /// Folds the accumulated decay into the threshold and normalizes `φ`.
    fn renormalize(&mut self) {
        let n2 = self.phi.norm_sqr();
        self.r /= self.log_w.exp() * n2;
        self.log_w = 0.0;
        self.phi.scale(1.0 / n2.sqrt());
        self.phi.prune(PRUNE_TOL);
    }

    /// `v_0 = φ`, `v_k = A v_{k−1}/k` with `A = −iH_rest`, so that
    /// `φ(s) = Σ s^k v_k` is one RK4 step of size `s`.
    fn expand(&mut self) {
        self.taylor[0].copy_from(&self.phi);
        for k in 1..=TAYLOR_ORDER {
            let (done, rest) = self.taylor.split_at_mut(k);
            self.gen.propagator.apply(&done[k - 1], &mut rest[0]);
            rest[0].scale(1.0 / k as f64);
        }
        self.support.clear();
        for v in &self.taylor {
            for &i in &v.idx {
                self.support.touch(i as usize);
            }
        }
        self.steps += 1;
    }

    /// `trial = φ(s)`.
    fn evaluate(&mut self, s: f64) {
        self.trial.clear();
        for &i in &self.support.idx {
            let i = i as usize;
            let mut acc = self.taylor[TAYLOR_ORDER].val[i];
            for k in (0..TAYLOR_ORDER).rev() {
                acc = acc * s + self.taylor[k].val[i];
            }
            self.trial.set(i, acc);
        }
    }

    /// Coefficients of `‖φ(s)‖² = Σ_m a_m s^m`.
    fn norm_polynomial(&self) -> [f64; 2 * TAYLOR_ORDER + 1] {
        let mut a = [0.0; 2 * TAYLOR_ORDER + 1];
        for &i in &self.support.idx {
            let v: [C64; TAYLOR_ORDER + 1] = std::array::from_fn(|k| self.taylor[k].val[i as usize]);
            for j in 0..=TAYLOR_ORDER {
                a[2 * j] += v[j].norm_sqr();
                for k in j + 1..=TAYLOR_ORDER {
                    a[j + k] += 2.0 * (v[j].re * v[k].re + v[j].im * v[k].im);
                }
            }
        }
        a
    }

    fn accept(&mut self, factor: f64) {
        std::mem::swap(&mut self.phi, &mut self.trial);
        if factor != 1.0 {
            self.phi.scale(factor);
        }
    }

    fn advance(&mut self, t_start: f64, h: f64) -> Result<()> {
        let c = self.gen.decay_shift;
        self.expand();
        self.evaluate(h);
        let end = (self.log_w - c * h).exp() * self.trial.norm_sqr();
        if !self.can_jump || end > self.r {
            self.accept(1.0);
            self.log_w -= c * h;
            return Ok(());
        }
        // A jump falls inside this step. Within the current expansion
        // norm²(s) = exp(log_w − c(s − s0))·scale2·p(s) on [s0, span].
        let mut t0 = t_start;
        let mut span = h;
        let mut poly = self.norm_polynomial();
        let mut s0 = 0.0;
        let mut scale2 = 1.0;
        loop {
            let p = |s: f64| poly.iter().rev().fold(0.0, |acc, &a| acc * s + a);
            let (log_w, r) = (self.log_w, self.r);
            let norm_at = |s: f64| (log_w - c * (s - s0)).exp() * scale2 * p(s);
            if norm_at(span) > r {
                self.evaluate(span);
                self.accept(scale2.sqrt());
                self.log_w -= c * (span - s0);
                return Ok(());
            }
            let (mut lo, mut hi) = (s0, span);
            while hi - lo > 1e-15 * span {
                let mid = 0.5 * (lo + hi);
                let f = norm_at(mid) - r;
                if f.abs() < BISECTION_TOL * r.min(1.0) {
                    hi = mid;
                    break;
                }
                if f > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let s_jump = hi;
            let p_jump = p(s_jump);
            self.evaluate(s_jump);
            self.trial.scale(1.0 / self.trial.norm_sqr().sqrt());
            let t_jump = t0 + s_jump;
            let eigen = self.jump(t_jump)?;
            self.log_w = 0.0;
            self.r = draw_threshold(&mut self.rng);
            if eigen {
                // L_jψ ∝ ψ: keep the expansion, rescaled to unit norm at s_jump.
                scale2 = 1.0 / p_jump;
                s0 = s_jump;
                continue;
            }
            t0 = t_jump;
            span -= s_jump;
            if span <= 0.0 {
                return Ok(());
            }
            self.expand();
            poly = self.norm_polynomial();
            s0 = 0.0;
            scale2 = 1.0;
        }
    }

    /// Applies a randomly selected jump to the normalized state in `trial`,
    /// leaving the normalized result in `phi`. Returns whether the state was
    /// an eigenvector of the jump operator.
    fn jump(&mut self, t: f64) -> Result<bool> {
        let u: f64 = self.rng.random();
        let (total, mut j) = self.gen.weigh_and_select(&self.trial, u);
        if !(total > 0.0) {
            return Err(SimError::ZeroJumpWeight { t });
        }
        self.gen.jump_columns[j].apply(&self.trial, &mut self.phi);
        let mut n2 = self.phi.norm_sqr();
        if !(n2 > 0.0) {
            // Rounding at a partial-sum boundary; fall back to a linear scan.
            let w: Vec<f64> = self
                .gen
                .jump_columns
                .iter()
                .map(|l| {
                    l.apply(&self.trial, &mut self.phi);
                    self.phi.norm_sqr()
                })
                .collect();
            let mut target = u * w.iter().sum::<f64>();
            j = w
                .iter()
                .position(|&x| {
                    target -= x;
                    target < 0.0 && x > 0.0
                })
                .or_else(|| w.iter().rposition(|&x| x > 0.0))
                .ok_or(SimError::ZeroJumpWeight { t })?;
            self.gen.jump_columns[j].apply(&self.trial, &mut self.phi);
            n2 = self.phi.norm_sqr();
        }
        self.jumps.push(JumpRecord { time: t, channel: j + 1 });
        let overlap = self.trial.dot(&self.phi);
        let eigen = n2 - overlap.norm_sqr() <= 1e-13 * n2;
        self.phi.scale(1.0 / n2.sqrt());
        self.phi.prune(PRUNE_TOL);
        Ok(eigen)
    }
}

/// `r` uniform in `(0, 1]`.
fn draw_threshold(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}
