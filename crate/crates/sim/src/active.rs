//! State vectors that track their structural support, and column-major
//! operators that act on them in time proportional to that support.

use num_complex::Complex64 as C64;
use qecnet_core::CsrMatrix;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Dense storage plus the list of possibly nonzero indices. Entries outside
/// `idx` are exactly zero.
#[derive(Clone, Debug)]
pub(crate) struct ActiveVec {
    pub val: Vec<C64>,
    pub idx: Vec<u32>,
    mark: Vec<bool>,
}

impl ActiveVec {
    pub fn zeros(dim: usize) -> Self {
        ActiveVec { val: vec![ZERO; dim], idx: Vec::new(), mark: vec![false; dim] }
    }

    pub fn from_dense(v: &[C64]) -> Self {
        let mut out = Self::zeros(v.len());
        for (i, &x) in v.iter().enumerate() {
            if x != ZERO {
                out.set(i, x);
            }
        }
        out
    }

    #[cfg(test)]
    pub fn to_dense(&self) -> Vec<C64> {
        self.val.clone()
    }

    pub fn clear(&mut self) {
        for &i in &self.idx {
            self.val[i as usize] = ZERO;
            self.mark[i as usize] = false;
        }
        self.idx.clear();
    }

    #[inline]
    pub fn touch(&mut self, i: usize) {
        if !self.mark[i] {
            self.mark[i] = true;
            self.idx.push(i as u32);
        }
    }

    pub fn set(&mut self, i: usize, v: C64) {
        self.touch(i);
        self.val[i] = v;
    }

    pub fn copy_from(&mut self, other: &ActiveVec) {
        self.clear();
        for &i in &other.idx {
            self.set(i as usize, other.val[i as usize]);
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.idx.iter().map(|&i| self.val[i as usize].norm_sqr()).sum()
    }

    pub fn scale(&mut self, s: f64) {
        for &i in &self.idx {
            self.val[i as usize] *= s;
        }
    }

    pub fn dot(&self, other: &ActiveVec) -> C64 {
        self.idx.iter().map(|&i| self.val[i as usize].conj() * other.val[i as usize]).sum()
    }

    /// Drops entries with `|v|² ≤ tol·‖v‖²`.
    pub fn prune(&mut self, tol: f64) {
        let cut = tol * self.norm_sqr();
        let (val, mark) = (&mut self.val, &mut self.mark);
        self.idx.retain(|&i| {
            let i = i as usize;
            if val[i].norm_sqr() <= cut {
                val[i] = ZERO;
                mark[i] = false;
                false
            } else {
                true
            }
        });
    }
}

/// Column-compressed copy of a sparse operator.
pub(crate) struct ColumnMatrix {
    colptr: Vec<usize>,
    rows: Vec<u32>,
    vals: Vec<C64>,
}

impl ColumnMatrix {
    pub fn new(m: &CsrMatrix) -> Self {
        let n = m.ncols();
        let mut count = vec![0usize; n + 1];
        for (_, j, _) in m.triplets() {
            count[j + 1] += 1;
        }
        for j in 0..n {
            count[j + 1] += count[j];
        }
        let colptr = count.clone();
        let mut fill = count;
        let mut rows = vec![0u32; m.nnz()];
        let mut vals = vec![ZERO; m.nnz()];
        for (i, j, v) in m.triplets() {
            let k = fill[j];
            rows[k] = i as u32;
            vals[k] = v;
            fill[j] += 1;
        }
        ColumnMatrix { colptr, rows, vals }
    }

    /// `y = A x`, touching only the columns in the support of `x`.
    pub fn apply(&self, x: &ActiveVec, y: &mut ActiveVec) {
        y.clear();
        for &j in &x.idx {
            let xj = x.val[j as usize];
            for k in self.colptr[j as usize]..self.colptr[j as usize + 1] {
                let i = self.rows[k] as usize;
                y.touch(i);
                y.val[i] += self.vals[k] * xj;
            }
        }
    }
}

/// `⟨ψ|A|ψ⟩` restricted to the rows in the support of `ψ`.
pub(crate) fn expectation(a: &CsrMatrix, psi: &ActiveVec) -> C64 {
    let mut acc = ZERO;
    for &i in &psi.idx {
        let row: C64 = a.row(i as usize).map(|(j, v)| v * psi.val[j]).sum();
        acc += psi.val[i as usize].conj() * row;
    }
    acc
}
