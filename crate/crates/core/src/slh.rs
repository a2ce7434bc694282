//! Gough-James circuit algebra on `(S, L, H)` triples with operator-valued
//! entries.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::OperatorSum;
use crate::sites::{Site, SiteSpace};
use crate::sparse::CsrMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct SLHTriple {
    /// Row-major `n×n` scattering matrix.
    s: Vec<Vec<OperatorSum>>,
    l: Vec<OperatorSum>,
    h: OperatorSum,
}

impl SLHTriple {
    pub fn new(s: Vec<Vec<OperatorSum>>, l: Vec<OperatorSum>, h: OperatorSum) -> Result<Self> {
        let n = l.len();
        if n == 0 {
            return Err(Error::InvalidParameter("an SLH triple needs at least one channel".into()));
        }
        if s.len() != n || s.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidParameter(format!("scattering matrix must be {n}x{n}")));
        }
        Ok(SLHTriple { s, l, h })
    }

    /// `(S, 0, 0)` with scalar entries.
    pub fn passive(s: &[Vec<C64>]) -> Result<Self> {
        let n = s.len();
        let s = s.iter().map(|row| row.iter().map(|&v| OperatorSum::scalar(v)).collect()).collect();
        Self::new(s, vec![OperatorSum::zero(); n], OperatorSum::zero())
    }

    pub fn identity(n: usize) -> Self {
        let s = (0..n)
            .map(|i| (0..n).map(|j| if i == j { OperatorSum::identity() } else { OperatorSum::zero() }).collect())
            .collect();
        SLHTriple { s, l: vec![OperatorSum::zero(); n], h: OperatorSum::zero() }
    }

    pub fn n_channels(&self) -> usize {
        self.l.len()
    }

    pub fn s(&self) -> &[Vec<OperatorSum>] {
        &self.s
    }

    pub fn l(&self) -> &[OperatorSum] {
        &self.l
    }

    pub fn h(&self) -> &OperatorSum {
        &self.h
    }

    /// Adds a Hamiltonian term without touching the field couplings.
    pub fn with_added_hamiltonian(mut self, h: &OperatorSum) -> Self {
        self.h = &self.h + h;
        self
    }

    /// Every site the triple acts on.
    pub fn support(&self) -> SiteSpace {
        SiteSpace::new(
            self.s.iter().flatten().chain(self.l.iter()).chain(std::iter::once(&self.h)).flat_map(|op| op.sites()),
        )
    }

    /// Conjugates every entry by `u` (assumed unitary): `X → u X u†`.
    pub fn conjugated(&self, u: &OperatorSum) -> Self {
        let ud = u.adjoint();
        let conj = |x: &OperatorSum| &(u * x) * &ud;
        SLHTriple {
            s: self.s.iter().map(|row| row.iter().map(conj).collect()).collect(),
            l: self.l.iter().map(conj).collect(),
            h: conj(&self.h),
        }
    }
}

/// `Im[A] = (A − A†)/2i` for an operator-valued scalar.
pub fn operator_im(a: &OperatorSum) -> OperatorSum {
    (a - &a.adjoint()).scale(C64::new(0.0, -0.5))
}

/// Series product `g2 ◁ g1`: the outputs of `g1` feed the inputs of `g2`.
pub fn series(g2: &SLHTriple, g1: &SLHTriple) -> Result<SLHTriple> {
    let n = g1.n_channels();
    if g2.n_channels() != n {
        return Err(Error::ChannelMismatch {
            left: "g2 (downstream)".into(),
            left_channels: g2.n_channels(),
            right: "g1 (upstream)".into(),
            right_channels: n,
        });
    }
    let s: Vec<Vec<OperatorSum>> =
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &g2.s[i][k] * &g1.s[k][j]).sum()).collect()).collect();
    let s2_l1: Vec<OperatorSum> = (0..n).map(|i| (0..n).map(|k| &g2.s[i][k] * &g1.l[k]).sum()).collect();
    let l: Vec<OperatorSum> = g2.l.iter().zip(&s2_l1).map(|(a, b)| a + b).collect();
    let cross: OperatorSum = g2.l.iter().zip(&s2_l1).map(|(l2, x)| &l2.adjoint() * x).sum();
    let h = &(&g1.h + &g2.h) + &operator_im(&cross);
    Ok(SLHTriple { s, l, h })
}

/// Folds a chain `g_k ◁ … ◁ g_1` given in upstream-first order.
pub fn series_chain<'a>(stages: impl IntoIterator<Item = &'a SLHTriple>) -> Result<SLHTriple> {
    let mut it = stages.into_iter();
    let first = it.next().ok_or_else(|| Error::InvalidParameter("empty series chain".into()))?.clone();
    it.try_fold(first, |acc, g| series(g, &acc))
}

/// Concatenation `g2 ⊞ g1`; channels of `g2` come first.
pub fn concat(g2: &SLHTriple, g1: &SLHTriple) -> SLHTriple {
    let (n2, n1) = (g2.n_channels(), g1.n_channels());
    let n = n2 + n1;
    let mut s = vec![vec![OperatorSum::zero(); n]; n];
    for i in 0..n2 {
        for j in 0..n2 {
            s[i][j] = g2.s[i][j].clone();
        }
    }
    for i in 0..n1 {
        for j in 0..n1 {
            s[n2 + i][n2 + j] = g1.s[i][j].clone();
        }
    }
    let l = g2.l.iter().chain(&g1.l).cloned().collect();
    SLHTriple { s, l, h: &g2.h + &g1.h }
}

/// Concatenates blocks left to right (first block gets the lowest channels).
pub fn concat_all<'a>(blocks: impl IntoIterator<Item = &'a SLHTriple>) -> Result<SLHTriple> {
    let mut it = blocks.into_iter();
    let first = it.next().ok_or_else(|| Error::InvalidParameter("empty concatenation".into()))?.clone();
    Ok(it.fold(first, |acc, g| concat(&acc, g)))
}

/// A bijection on channel indices; `map[new] = old`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelPermutation {
    map: Vec<usize>,
}

impl ChannelPermutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &m in &map {
            if m >= map.len() || std::mem::replace(&mut seen[m], true) {
                return Err(Error::InvalidPermutation(format!("{map:?} is not a bijection on 0..{}", map.len())));
            }
        }
        Ok(ChannelPermutation { map })
    }

    pub fn identity(n: usize) -> Self {
        ChannelPermutation { map: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (new, &old) in self.map.iter().enumerate() {
            inv[old] = new;
        }
        ChannelPermutation { map: inv }
    }
}

/// Relabels channels: new output `i` is old output `outputs[i]`, new input
/// `j` is old input `inputs[j]`.
pub fn permute_channels(g: &SLHTriple, outputs: &ChannelPermutation, inputs: &ChannelPermutation) -> Result<SLHTriple> {
    let n = g.n_channels();
    if outputs.len() != n || inputs.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "permutation sizes ({}, {}) do not match {n} channels",
            outputs.len(),
            inputs.len()
        )));
    }
    let s = (0..n).map(|i| (0..n).map(|j| g.s[outputs.map[i]][inputs.map[j]].clone()).collect()).collect();
    let l = (0..n).map(|i| g.l[outputs.map[i]].clone()).collect();
    Ok(SLHTriple { s, l, h: g.h.clone() })
}

/// Embeds `g` into `total` channels, its channel `k` landing on
/// `positions[k]`; identity elsewhere. Realizes the padding operator as a
/// concatenation followed by a channel permutation.
pub fn pad(g: &SLHTriple, positions: &[usize], total: usize) -> Result<SLHTriple> {
    let k = g.n_channels();
    if positions.len() != k || total < k {
        return Err(Error::InvalidPermutation(format!("cannot place {k} channels at {positions:?} of {total}")));
    }
    let padded = if total > k { concat(g, &SLHTriple::identity(total - k)) } else { g.clone() };
    // map[new] = old: positions get g's channels in order, the rest get the identity block.
    let mut map = vec![usize::MAX; total];
    for (old, &new) in positions.iter().enumerate() {
        if new >= total || map[new] != usize::MAX {
            return Err(Error::InvalidPermutation(format!("bad padding positions {positions:?}")));
        }
        map[new] = old;
    }
    let mut filler = k..total;
    for slot in map.iter_mut().filter(|m| **m == usize::MAX) {
        *slot = filler.next().unwrap();
    }
    let perm = ChannelPermutation::new(map)?;
    permute_channels(&padded, &perm, &perm)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnitarityReport {
    /// `max |Σ_k S_ik S_jk† − δ_ij|`.
    pub row_residual: f64,
    /// `max |Σ_k S_ki† S_kj − δ_ij|`.
    pub column_residual: f64,
}

impl UnitarityReport {
    pub fn max(&self) -> f64 {
        self.row_residual.max(self.column_residual)
    }
}

/// Compiles both unitarity identities on the support of `s` and reports the
/// largest entry deviation.
pub fn check_unitary(s: &[Vec<OperatorSum>]) -> Result<UnitarityReport> {
    let n = s.len();
    let space = SiteSpace::new(s.iter().flatten().flat_map(|op| op.sites()));
    let id = CsrMatrix::identity(space.dim());
    let zero = CsrMatrix::zeros(space.dim(), space.dim());
    let deviation = |acc: OperatorSum, diag: bool| -> Result<f64> {
        let m = acc.to_matrix(&space)?;
        Ok(m.max_abs_diff(if diag { &id } else { &zero }))
    };
    let mut row_residual = 0.0f64;
    let mut column_residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let rows: OperatorSum = (0..n).map(|k| &s[i][k] * &s[j][k].adjoint()).sum();
            let cols: OperatorSum = (0..n).map(|k| &s[k][i].adjoint() * &s[k][j]).sum();
            row_residual = row_residual.max(deviation(rows, i == j)?);
            column_residual = column_residual.max(deviation(cols, i == j)?);
        }
    }
    Ok(UnitarityReport { row_residual, column_residual })
}

/// Closed-loop Lindblad model `ρ̇ = −i[H,ρ] + Σ_j (L_j ρ L_j† − ½{L_j†L_j, ρ})`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MasterEquation {
    pub hamiltonian: OperatorSum,
    pub collapse_ops: Vec<OperatorSum>,
    #[serde(serialize_with = "serialize_space")]
    pub space: SiteSpace,
}

fn serialize_space<S: serde::Serializer>(space: &SiteSpace, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(space.sites())
}

impl MasterEquation {
    /// Widens the Hilbert space the equation lives on.
    pub fn on_space(mut self, space: SiteSpace) -> Self {
        self.space = self.space.union(&space);
        self
    }

    pub fn nonzero_collapse_count(&self) -> usize {
        self.collapse_ops.iter().filter(|l| !l.is_zero()).count()
    }

    /// `U ρ U†` frame change for a unitary `u` built from the declared gauge.
    pub fn conjugated(&self, u: &OperatorSum) -> Self {
        let ud = u.adjoint();
        let conj = |x: &OperatorSum| &(u * x) * &ud;
        MasterEquation {
            hamiltonian: conj(&self.hamiltonian),
            collapse_ops: self.collapse_ops.iter().map(conj).collect(),
            space: self.space.clone(),
        }
    }

    /// Compiled `(H, [L_j])` on the equation's space.
    pub fn compile(&self) -> Result<(CsrMatrix, Vec<CsrMatrix>)> {
        let h = self.hamiltonian.to_matrix(&self.space)?;
        let ls = self.collapse_ops.iter().map(|l| l.to_matrix(&self.space)).collect::<Result<_>>()?;
        Ok((h, ls))
    }
}

/// Reads off the vacuum-input master equation of a fully composed triple.
/// `S` drops out; couplings keep their channel order.
pub fn extract_master_equation(g: &SLHTriple) -> MasterEquation {
    MasterEquation { hamiltonian: g.h.clone(), collapse_ops: g.l.clone(), space: g.support() }
}

/// Convenience: sites list for error messages and reports.
pub fn describe_sites(space: &SiteSpace) -> String {
    space.sites().iter().map(Site::to_string).collect::<Vec<_>>().join(" ")
}
