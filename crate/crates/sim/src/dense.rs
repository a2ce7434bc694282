use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use qecnet_core::slh::MasterEquation;
use qecnet_core::CsrMatrix;
use serde::Serialize;

use crate::error::{Result, SimError};
use crate::grid::TimeGrid;
use crate::observable::Observable;

/// Largest Hilbert-space dimension accepted by the dense solver.
pub const DENSE_DIM_LIMIT: usize = 1 << 10;
const TRACE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenseResult {
    pub times: Vec<f64>,
    /// `values[o][k]`.
    pub values: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    pub dt: f64,
    pub max_trace_drift: f64,
    pub max_hermiticity_deviation: f64,
    pub final_min_eigenvalue: f64,
}

struct DenseGenerator {
    n: usize,
    h_eff: CsrMatrix,
    jumps: Vec<CsrMatrix>,
}

/// `A·B` for sparse `A`, dense row-major `B`.
fn sparse_dense(a: &CsrMatrix, b: &[C64], n: usize, out: &mut [C64]) {
    out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
    for i in 0..n {
        let row = &mut out[i * n..(i + 1) * n];
        for (k, v) in a.row(i) {
            let src = &b[k * n..(k + 1) * n];
            row.iter_mut().zip(src).for_each(|(o, s)| *o += v * s);
        }
    }
}

fn adjoint_into(a: &[C64], n: usize, out: &mut [C64]) {
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j].conj();
        }
    }
}

impl DenseGenerator {
    /// `dρ/dt` for Hermitian `ρ`: `−iXρ + (−iXρ)† + Σ L(Lρ)†` with `X = H_eff`.
    fn apply(&self, rho: &[C64], out: &mut [C64], tmp: &mut [C64], tmp2: &mut [C64]) {
        let n = self.n;
        let mi = C64::new(0.0, -1.0);
        sparse_dense(&self.h_eff, rho, n, tmp);
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = mi * tmp[i * n + j] + (mi * tmp[j * n + i]).conj();
            }
        }
        for l in &self.jumps {
            sparse_dense(l, rho, n, tmp);
            adjoint_into(tmp, n, tmp2);
            sparse_dense(l, tmp2, n, tmp);
            out.iter_mut().zip(tmp.iter()).for_each(|(o, v)| *o += v);
        }
    }

    /// Crude operator-norm bound of the Liouvillian.
    fn norm_estimate(&self) -> f64 {
        let col_sum = |m: &CsrMatrix| m.adjoint().row_sum_norm();
        2.0 * self.h_eff.row_sum_norm() + self.jumps.iter().map(|l| l.row_sum_norm() * col_sum(l)).sum::<f64>()
    }
}

/// Stability bound `0.5/‖L‖` for the Liouvillian of `me`.
pub fn dense_step_bound(me: &MasterEquation) -> Result<f64> {
    Ok(0.5 / build(me)?.norm_estimate().max(1e-300))
}

fn build(me: &MasterEquation) -> Result<DenseGenerator> {
    let n = me.space.dim();
    if n > DENSE_DIM_LIMIT {
        return Err(SimError::DimensionGuard { dim: n, limit: DENSE_DIM_LIMIT });
    }
    let (h, jumps) = me.compile()?;
    let k = jumps.iter().fold(CsrMatrix::zeros(n, n), |acc, l| acc.add(&l.adjoint().matmul(l)));
    let h_eff = h.linear_combination(C64::new(1.0, 0.0), &k, C64::new(0.0, -0.5));
    Ok(DenseGenerator { n, h_eff, jumps })
}

/// Fixed-step RK4 on `ρ`, recording `Tr(Oρ)` at the grid points.
pub fn integrate_dense(
    me: &MasterEquation,
    rho0: &[C64],
    grid: &TimeGrid,
    dt: Option<f64>,
    observables: &[Observable],
) -> Result<DenseResult> {
    let gen = build(me)?;
    let n = gen.n;
    if rho0.len() != n * n {
        return Err(SimError::InvalidInput(format!("ρ0 has {} entries, expected {}", rho0.len(), n * n)));
    }
    let bound = 0.5 / gen.norm_estimate().max(1e-300);
    let dt = match dt {
        Some(dt) if dt > bound => return Err(SimError::StepTooLarge { dt, bound }),
        Some(dt) if !(dt > 0.0) => return Err(SimError::InvalidInput(format!("dt must be > 0, got {dt}"))),
        Some(dt) => dt,
        None => bound,
    };
    let n_sub = grid.substeps(dt);
    let h = grid.spacing() / n_sub as f64;

    let mut rho = rho0.to_vec();
    let trace0 = trace(&rho, n);
    let mut values: Vec<Vec<f64>> = observables.iter().map(|o| vec![o.on_density(&rho)]).collect();
    let mut max_trace_drift = 0.0f64;
    let mut max_herm = hermiticity_deviation(&rho, n);

    let zero = || vec![C64::new(0.0, 0.0); n * n];
    let (mut k1, mut k2, mut k3, mut k4) = (zero(), zero(), zero(), zero());
    let (mut stage, mut tmp, mut tmp2) = (zero(), zero(), zero());
    for k in 1..grid.n_points {
        for _ in 0..n_sub {
            gen.apply(&rho, &mut k1, &mut tmp, &mut tmp2);
            axpy_into(&rho, &k1, 0.5 * h, &mut stage);
            gen.apply(&stage, &mut k2, &mut tmp, &mut tmp2);
            axpy_into(&rho, &k2, 0.5 * h, &mut stage);
            gen.apply(&stage, &mut k3, &mut tmp, &mut tmp2);
            axpy_into(&rho, &k3, h, &mut stage);
            gen.apply(&stage, &mut k4, &mut tmp, &mut tmp2);
            for i in 0..n * n {
                rho[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        let drift = (trace(&rho, n) - trace0).norm();
        max_trace_drift = max_trace_drift.max(drift);
        if drift > TRACE_TOL {
            return Err(SimError::TraceDrift { drift, t: grid.point(k) });
        }
        max_herm = max_herm.max(hermiticity_deviation(&rho, n));
        for (o, v) in observables.iter().zip(values.iter_mut()) {
            v.push(o.on_density(&rho));
        }
    }
    let m = DMatrix::from_row_slice(n, n, &rho);
    let hermitian = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let final_min_eigenvalue = hermitian.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DenseResult {
        times: grid.points(),
        values,
        labels: observables.iter().map(|o| o.label.clone()).collect(),
        dt: h,
        max_trace_drift,
        max_hermiticity_deviation: max_herm,
        final_min_eigenvalue,
    })
}

fn axpy_into(x: &[C64], y: &[C64], a: f64, out: &mut [C64]) {
    out.iter_mut().zip(x.iter().zip(y)).for_each(|(o, (x, y))| *o = x + a * y);
}

fn trace(rho: &[C64], n: usize) -> C64 {
    (0..n).map(|i| rho[i * n + i]).sum()
}

fn hermiticity_deviation(rho: &[C64], n: usize) -> f64 {
    let mut m = 0.0f64;
    for i in 0..n {
        for j in i..n {
            m = m.max((rho[i * n + j] - rho[j * n + i].conj()).norm());
        }
    }
    m
}

/// `|ψ⟩⟨ψ|` in row-major layout.
pub fn pure_density(psi: &[C64]) -> Vec<C64> {
    let n = psi.len();
    let mut rho = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            rho[i * n + j] = psi[i] * psi[j].conj();
        }
    }
    rho
}
