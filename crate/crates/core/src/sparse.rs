//! Row-compressed complex sparse matrices.
//!
//! Column indices inside a row are strictly increasing, so two matrices
//! built from the same operator always have identical storage.

use num_complex::Complex64 as C64;

/// Entries with modulus at or below this are not stored.
pub const DROP_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    data: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), data: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal_from(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn diagonal_from(diag: &[C64]) -> Self {
        Self::from_triplets(
            diag.len(),
            diag.len(),
            diag.iter().enumerate().map(|(i, &v)| (i as u32, i as u32, v)).collect(),
        )
    }

    /// Builds from unsorted `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(u32, u32, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut data = Vec::with_capacity(triplets.len());
        let mut iter = triplets.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if r2 == r && c2 == c {
                    v += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            if v.norm() > DROP_TOL {
                indices.push(c);
                data.push(v);
                indptr[r as usize + 1] += 1;
            }
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix { nrows, ncols, indptr, indices, data }
    }

    /// Builds from a dense row-major array.
    pub fn from_dense(nrows: usize, ncols: usize, dense: &[C64]) -> Self {
        assert_eq!(dense.len(), nrows * ncols);
        let triplets = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() > DROP_TOL)
            .map(|(k, &v)| ((k / ncols) as u32, (k % ncols) as u32, v))
            .collect();
        Self::from_triplets(nrows, ncols, triplets)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[a..b].iter().map(|&c| c as usize).zip(self.data[a..b].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        match self.indices[a..b].binary_search(&(j as u32)) {
            Ok(k) => self.data[a + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.nrows * self.ncols];
        for (i, j, v) in self.triplets() {
            out[i * self.ncols + j] = v;
        }
        out
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (a, b) = (self.indptr[i], self.indptr[i + 1]);
            let mut acc = C64::new(0.0, 0.0);
            for (&c, &v) in self.indices[a..b].iter().zip(&self.data[a..b]) {
                acc += v * x[c as usize];
            }
            *yi = acc;
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    /// `<x|A|x>`.
    pub fn expectation(&self, x: &[C64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (i, xi) in x.iter().enumerate() {
            let (a, b) = (self.indptr[i], self.indptr[i + 1]);
            let mut row = C64::new(0.0, 0.0);
            for (&c, &v) in self.indices[a..b].iter().zip(&self.data[a..b]) {
                row += v * x[c as usize];
            }
            acc += xi.conj() * row;
        }
        acc
    }

    pub fn adjoint(&self) -> CsrMatrix {
        let triplets = self.triplets().map(|(i, j, v)| (j as u32, i as u32, v.conj())).collect();
        Self::from_triplets(self.ncols, self.nrows, triplets)
    }

    pub fn scale(&self, s: C64) -> CsrMatrix {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out.prune()
    }

    fn prune(self) -> CsrMatrix {
        if self.data.iter().all(|v| v.norm() > DROP_TOL) {
            return self;
        }
        let triplets = self.triplets().map(|(i, j, v)| (i as u32, j as u32, v)).collect();
        Self::from_triplets(self.nrows, self.ncols, triplets)
    }

    /// `a·self + b·other`.
    pub fn linear_combination(&self, a: C64, other: &CsrMatrix, b: C64) -> CsrMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let triplets = self
            .triplets()
            .map(|(i, j, v)| (i as u32, j as u32, a * v))
            .chain(other.triplets().map(|(i, j, v)| (i as u32, j as u32, b * v)))
            .collect();
        Self::from_triplets(self.nrows, self.ncols, triplets)
    }

    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        self.linear_combination(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &CsrMatrix) -> CsrMatrix {
        self.linear_combination(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    /// Sparse product `self · other`.
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut triplets = Vec::new();
        let mut acc = vec![C64::new(0.0, 0.0); other.ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut seen = vec![false; other.ncols];
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !seen[j] {
                        seen[j] = true;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            for &j in &touched {
                triplets.push((i as u32, j as u32, acc[j]));
                acc[j] = C64::new(0.0, 0.0);
                seen[j] = false;
            }
            touched.clear();
        }
        Self::from_triplets(self.nrows, other.ncols, triplets)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |self - other|` over all entries.
    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        self.max_abs_diff_scaled(other, C64::new(1.0, 0.0))
    }

    /// `max |self - s·other|` over all entries, by a merge walk of the rows.
    pub fn max_abs_diff_scaled(&self, other: &CsrMatrix, s: C64) -> f64 {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            let mut a = self.row(i).peekable();
            let mut b = other.row(i).peekable();
            loop {
                let d = match (a.peek().copied(), b.peek().copied()) {
                    (None, None) => break,
                    (Some((_, va)), None) => {
                        a.next();
                        va
                    }
                    (None, Some((_, vb))) => {
                        b.next();
                        s * vb
                    }
                    (Some((ja, va)), Some((jb, vb))) => {
                        if ja == jb {
                            a.next();
                            b.next();
                            va - s * vb
                        } else if ja < jb {
                            a.next();
                            va
                        } else {
                            b.next();
                            -(s * vb)
                        }
                    }
                };
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Frobenius inner product `Σ conj(self_ij) other_ij`.
    pub fn frobenius_inner(&self, other: &CsrMatrix) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.nrows {
            let mut b = other.row(i).peekable();
            for (ja, va) in self.row(i) {
                while let Some(&(jb, _)) = b.peek() {
                    if jb < ja {
                        b.next();
                    } else {
                        break;
                    }
                }
                if let Some(&(jb, vb)) = b.peek() {
                    if jb == ja {
                        acc += va.conj() * vb;
                    }
                }
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced infinity norm (largest absolute row sum).
    pub fn row_sum_norm(&self) -> f64 {
        (0..self.nrows).map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        self.triplets().all(|(i, j, _)| i == j)
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }
}
