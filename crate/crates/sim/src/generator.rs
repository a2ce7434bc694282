use num_complex::Complex64 as C64;
use qecnet_core::slh::MasterEquation;
use qecnet_core::{CsrMatrix, SiteSpace};

use crate::active::{expectation, ActiveVec, ColumnMatrix};
use crate::error::{Result, SimError};

/// `⟨ψ|W|ψ⟩` for a Hermitian weight operator; diagonal ones skip the
/// sparse structure.
enum Weight {
    Diagonal(Vec<f64>),
    Sparse(CsrMatrix),
}

impl Weight {
    fn new(m: CsrMatrix) -> Self {
        if m.is_diagonal() {
            Weight::Diagonal(m.diagonal().iter().map(|v| v.re).collect())
        } else {
            Weight::Sparse(m)
        }
    }

    fn expectation(&self, psi: &ActiveVec) -> f64 {
        match self {
            Weight::Diagonal(d) => psi.idx.iter().map(|&i| d[i as usize] * psi.val[i as usize].norm_sqr()).sum(),
            Weight::Sparse(m) => expectation(m, psi).re,
        }
    }
}

enum JumpNode {
    Leaf(usize),
    Split { left_weight: Weight, left: Box<JumpNode>, right: Box<JumpNode> },
}

impl JumpNode {
    fn build(lo: usize, hi: usize, ktk: &[CsrMatrix], dim: usize) -> JumpNode {
        if hi - lo == 1 {
            return JumpNode::Leaf(lo);
        }
        let mid = lo + (hi - lo) / 2;
        let left_weight = ktk[lo..mid].iter().fold(CsrMatrix::zeros(dim, dim), |acc, k| acc.add(k));
        JumpNode::Split {
            left_weight: Weight::new(left_weight),
            left: Box::new(Self::build(lo, mid, ktk, dim)),
            right: Box::new(Self::build(mid, hi, ktk, dim)),
        }
    }
}

/// A master equation compiled for unraveling.
///
/// The decay operator `K = Σ L_j†L_j` is split as `c·I + R` with
/// `c = Tr K / dim`. The scalar part is integrated exactly, so the state is
/// propagated with `H_rest = H − (i/2)R`, which equals `H` whenever the total
/// jump rate is state independent.
pub struct CompiledGenerator {
    pub hamiltonian: CsrMatrix,
    pub jump_ops: Vec<CsrMatrix>,
    pub space: SiteSpace,
    /// `c` in `K = c·I + R`.
    pub decay_shift: f64,
    /// `H_rest`.
    pub h_rest: CsrMatrix,
    total_weight: CsrMatrix,
    /// `−i·H_rest` by columns.
    pub(crate) propagator: ColumnMatrix,
    pub(crate) jump_columns: Vec<ColumnMatrix>,
    total: Weight,
    tree: Option<JumpNode>,
}

impl CompiledGenerator {
    pub fn from_master_equation(me: &MasterEquation) -> Result<Self> {
        let (h, ls) = me.compile()?;
        Self::from_matrices(h, ls, me.space.clone())
    }

    pub fn from_matrices(hamiltonian: CsrMatrix, jump_ops: Vec<CsrMatrix>, space: SiteSpace) -> Result<Self> {
        let dim = space.dim();
        if hamiltonian.nrows() != dim || hamiltonian.ncols() != dim {
            return Err(SimError::InvalidInput(format!("H is not {dim}x{dim}")));
        }
        if let Some(bad) = jump_ops.iter().position(|l| l.nrows() != dim || l.ncols() != dim) {
            return Err(SimError::InvalidInput(format!("collapse operator {bad} is not {dim}x{dim}")));
        }
        let ktk: Vec<CsrMatrix> = jump_ops.iter().map(|l| l.adjoint().matmul(l)).collect();
        let total_weight = ktk.iter().fold(CsrMatrix::zeros(dim, dim), |acc, k| acc.add(k));
        let decay_shift = total_weight.trace().re / dim as f64;
        let residual = total_weight.sub(&CsrMatrix::identity(dim).scale(C64::new(decay_shift, 0.0)));
        let h_rest = if residual.max_abs() <= 1e-12 * decay_shift.max(1.0) {
            hamiltonian.clone()
        } else {
            hamiltonian.linear_combination(C64::new(1.0, 0.0), &residual, C64::new(0.0, -0.5))
        };
        let propagator = ColumnMatrix::new(&h_rest.scale(C64::new(0.0, -1.0)));
        let jump_columns = jump_ops.iter().map(ColumnMatrix::new).collect();
        let tree = (!jump_ops.is_empty()).then(|| JumpNode::build(0, jump_ops.len(), &ktk, dim));
        Ok(CompiledGenerator {
            hamiltonian,
            jump_ops,
            space,
            decay_shift,
            h_rest,
            total: Weight::new(total_weight.clone()),
            total_weight,
            propagator,
            jump_columns,
            tree,
        })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn n_channels(&self) -> usize {
        self.jump_ops.len()
    }

    /// `H_eff = H − (i/2)Σ L_j†L_j`.
    pub fn h_eff(&self) -> CsrMatrix {
        self.hamiltonian.linear_combination(C64::new(1.0, 0.0), &self.total_weight, C64::new(0.0, -0.5))
    }

    /// Default trajectory step `0.1/‖H_rest‖_∞`.
    pub fn default_dt(&self) -> f64 {
        let norm = self.h_rest.row_sum_norm();
        if norm > 0.0 {
            0.1 / norm
        } else {
            f64::INFINITY
        }
    }

    /// `Σ_j ‖L_j ψ‖²`.
    pub fn total_jump_weight(&self, psi: &[C64]) -> f64 {
        self.total.expectation(&ActiveVec::from_dense(psi))
    }

    /// `‖L_j ψ‖²` for every channel.
    pub fn channel_weights(&self, psi: &[C64]) -> Vec<f64> {
        self.jump_ops.iter().map(|l| l.matvec(psi).iter().map(|v| v.norm_sqr()).sum()).collect()
    }

    /// Picks channel `j` with probability `‖L_jψ‖²/Σ‖L_kψ‖²` given `u`
    /// uniform in `[0, 1)`.
    pub fn select_channel(&self, psi: &[C64], u: f64) -> usize {
        self.weigh_and_select(&ActiveVec::from_dense(psi), u).1
    }

    /// Returns `(Σ_j ‖L_jψ‖², selected channel)`, descending a tree of
    /// precompiled partial sums of `L_j†L_j`.
    pub(crate) fn weigh_and_select(&self, psi: &ActiveVec, u: f64) -> (f64, usize) {
        let total = self.total.expectation(psi);
        let mut node = self.tree.as_ref().expect("no collapse operators");
        let mut target = u * total;
        loop {
            match node {
                JumpNode::Leaf(j) => return (total, *j),
                JumpNode::Split { left_weight, left, right } => {
                    let w = left_weight.expectation(psi);
                    if target < w {
                        node = left;
                    } else {
                        target -= w;
                        node = right;
                    }
                }
            }
        }
    }
}
