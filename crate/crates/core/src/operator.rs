//! Symbolic operators on the site register.
//!
//! An [`OperatorSum`] is a complex-weighted sum of tensor products of
//! named single-site operators. Memory sites usually carry Paulis; relay
//! sites carry the projectors `Π±` and ladders `σ^{+-} = |+⟩⟨-|`,
//! `σ^{-+} = |-⟩⟨+|`, with relay state `|+⟩` as basis index 0. Products of
//! named operators stay inside the named set, so no free-form matrices are
//! ever stored.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sites::{Site, SiteSpace};
use crate::sparse::CsrMatrix;

/// Coefficients at or below this modulus are dropped, and like terms whose
/// coefficients agree within it are treated as equal.
pub const COEFF_TOL: f64 = 1e-12;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocalOp {
    X,
    Y,
    Z,
    /// `|+⟩⟨+|`
    PiPlus,
    /// `|-⟩⟨-|`
    PiMinus,
    /// `|+⟩⟨-|`
    SigmaPM,
    /// `|-⟩⟨+|`
    SigmaMP,
}

impl LocalOp {
    pub const ALL: [LocalOp; 7] =
        [LocalOp::X, LocalOp::Y, LocalOp::Z, LocalOp::PiPlus, LocalOp::PiMinus, LocalOp::SigmaPM, LocalOp::SigmaMP];

    pub fn name(self) -> &'static str {
        match self {
            LocalOp::X => "X",
            LocalOp::Y => "Y",
            LocalOp::Z => "Z",
            LocalOp::PiPlus => "P+",
            LocalOp::PiMinus => "P-",
            LocalOp::SigmaPM => "S+-",
            LocalOp::SigmaMP => "S-+",
        }
    }

    pub fn from_name(name: &str) -> Option<LocalOp> {
        LocalOp::ALL.into_iter().find(|op| op.name() == name)
    }

    pub fn is_pauli(self) -> bool {
        matches!(self, LocalOp::X | LocalOp::Y | LocalOp::Z)
    }

    /// Row-major 2×2 matrix.
    pub fn matrix(self) -> [[C64; 2]; 2] {
        match self {
            LocalOp::X => [[ZERO, ONE], [ONE, ZERO]],
            LocalOp::Y => [[ZERO, -I], [I, ZERO]],
            LocalOp::Z => [[ONE, ZERO], [ZERO, -ONE]],
            LocalOp::PiPlus => [[ONE, ZERO], [ZERO, ZERO]],
            LocalOp::PiMinus => [[ZERO, ZERO], [ZERO, ONE]],
            LocalOp::SigmaPM => [[ZERO, ONE], [ZERO, ZERO]],
            LocalOp::SigmaMP => [[ZERO, ZERO], [ONE, ZERO]],
        }
    }

    pub fn adjoint(self) -> LocalOp {
        match self {
            LocalOp::SigmaPM => LocalOp::SigmaMP,
            LocalOp::SigmaMP => LocalOp::SigmaPM,
            other => other,
        }
    }

    /// Image of basis state `|bit⟩`: `Some((new_bit, amplitude))`, or `None`
    /// when the operator annihilates it.
    #[inline]
    pub fn act(self, bit: usize) -> Option<(usize, C64)> {
        match (self, bit) {
            (LocalOp::X, b) => Some((1 - b, ONE)),
            (LocalOp::Y, 0) => Some((1, I)),
            (LocalOp::Y, _) => Some((0, -I)),
            (LocalOp::Z, 0) => Some((0, ONE)),
            (LocalOp::Z, _) => Some((1, -ONE)),
            (LocalOp::PiPlus, 0) => Some((0, ONE)),
            (LocalOp::PiMinus, 1) => Some((1, ONE)),
            (LocalOp::SigmaPM, 1) => Some((0, ONE)),
            (LocalOp::SigmaMP, 0) => Some((1, ONE)),
            _ => None,
        }
    }

    fn unit(row: usize, col: usize) -> LocalOp {
        match (row, col) {
            (0, 0) => LocalOp::PiPlus,
            (1, 1) => LocalOp::PiMinus,
            (0, 1) => LocalOp::SigmaPM,
            _ => LocalOp::SigmaMP,
        }
    }
}

/// Single-qubit Pauli label, used where only Paulis are allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
    /// Channel order of the error block: bit flips, phase flips, then both.
    pub const ERROR_ORDER: [Pauli; 3] = [Pauli::X, Pauli::Z, Pauli::Y];

    pub fn local(self) -> LocalOp {
        match self {
            Pauli::X => LocalOp::X,
            Pauli::Y => LocalOp::Y,
            Pauli::Z => LocalOp::Z,
        }
    }

    pub fn on(self, site: Site) -> OperatorSum {
        OperatorSum::op(site, self.local())
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.local().name())
    }
}

impl std::str::FromStr for Pauli {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            other => Err(Error::InvalidParameter(format!("unknown Pauli {other:?}"))),
        }
    }
}

/// `a·b` as a short sum of `(coefficient, factor)`; `None` is the identity.
fn local_product(a: LocalOp, b: LocalOp) -> Vec<(C64, Option<LocalOp>)> {
    use LocalOp::*;
    if a.is_pauli() && b.is_pauli() {
        return vec![match (a, b) {
            (X, X) | (Y, Y) | (Z, Z) => (ONE, None),
            (X, Y) => (I, Some(Z)),
            (Y, X) => (-I, Some(Z)),
            (Y, Z) => (I, Some(X)),
            (Z, Y) => (-I, Some(X)),
            (Z, X) => (I, Some(Y)),
            (X, Z) => (-I, Some(Y)),
            _ => unreachable!(),
        }];
    }
    let (ma, mb) = (a.matrix(), b.matrix());
    let mut out = Vec::with_capacity(4);
    for r in 0..2 {
        for c in 0..2 {
            let v = ma[r][0] * mb[0][c] + ma[r][1] * mb[1][c];
            if v != ZERO {
                out.push((v, Some(LocalOp::unit(r, c))));
            }
        }
    }
    out
}

/// A coefficient times a tensor product of single-site factors (identity
/// on absent sites). Factors are sorted by site with no repeats.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorTerm {
    pub coeff: C64,
    pub factors: Vec<(Site, LocalOp)>,
}

impl TensorTerm {
    fn adjoint(&self) -> TensorTerm {
        TensorTerm {
            coeff: self.coeff.conj(),
            factors: self.factors.iter().map(|&(s, op)| (s, op.adjoint())).collect(),
        }
    }

    fn product(&self, other: &TensorTerm) -> Vec<TensorTerm> {
        let mut partial: Vec<(C64, Vec<(Site, LocalOp)>)> =
            vec![(self.coeff * other.coeff, Vec::with_capacity(self.factors.len() + other.factors.len()))];
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.factors, &other.factors);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
            if take_a {
                partial.iter_mut().for_each(|(_, f)| f.push(a[i]));
                i += 1;
            } else if take_b {
                partial.iter_mut().for_each(|(_, f)| f.push(b[j]));
                j += 1;
            } else {
                let site = a[i].0;
                let local = local_product(a[i].1, b[j].1);
                let mut next = Vec::with_capacity(partial.len() * local.len());
                for (c, f) in &partial {
                    for &(lc, lop) in &local {
                        let mut f2 = f.clone();
                        if let Some(op) = lop {
                            f2.push((site, op));
                        }
                        next.push((c * lc, f2));
                    }
                }
                partial = next;
                i += 1;
                j += 1;
            }
        }
        partial.into_iter().map(|(coeff, factors)| TensorTerm { coeff, factors }).collect()
    }
}

/// Sum of tensor terms, always held in canonical form.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OperatorSum {
    terms: Vec<TensorTerm>,
}

impl OperatorSum {
    pub fn zero() -> Self {
        OperatorSum { terms: Vec::new() }
    }

    pub fn identity() -> Self {
        Self::scalar(ONE)
    }

    pub fn scalar(c: impl Into<C64>) -> Self {
        Self::from_terms(vec![TensorTerm { coeff: c.into(), factors: Vec::new() }])
    }

    pub fn op(site: Site, op: LocalOp) -> Self {
        Self::from_terms(vec![TensorTerm { coeff: ONE, factors: vec![(site, op)] }])
    }

    pub fn x(site: Site) -> Self {
        Self::op(site, LocalOp::X)
    }

    pub fn y(site: Site) -> Self {
        Self::op(site, LocalOp::Y)
    }

    pub fn z(site: Site) -> Self {
        Self::op(site, LocalOp::Z)
    }

    pub fn pi_plus(site: Site) -> Self {
        Self::op(site, LocalOp::PiPlus)
    }

    pub fn pi_minus(site: Site) -> Self {
        Self::op(site, LocalOp::PiMinus)
    }

    pub fn sigma_pm(site: Site) -> Self {
        Self::op(site, LocalOp::SigmaPM)
    }

    pub fn sigma_mp(site: Site) -> Self {
        Self::op(site, LocalOp::SigmaMP)
    }

    /// Ordered product of single-site factors (repeated sites multiply).
    pub fn product_of(factors: impl IntoIterator<Item = (Site, LocalOp)>) -> Self {
        factors.into_iter().fold(Self::identity(), |acc, (s, op)| &acc * &Self::op(s, op))
    }

    /// Canonicalizes an arbitrary list of terms.
    pub fn from_terms(terms: Vec<TensorTerm>) -> Self {
        let terms = terms
            .into_iter()
            .map(|t| {
                let mut sorted = t.factors.clone();
                sorted.sort_by_key(|&(s, _)| s);
                let distinct = sorted.windows(2).all(|w| w[0].0 != w[1].0);
                if distinct && sorted == t.factors {
                    vec![t]
                } else {
                    // Unsorted or repeated sites: rebuild by ordered multiplication.
                    let mut acc = vec![TensorTerm { coeff: t.coeff, factors: Vec::new() }];
                    for f in t.factors {
                        let single = TensorTerm { coeff: ONE, factors: vec![f] };
                        acc = acc.iter().flat_map(|a| a.product(&single)).collect();
                    }
                    acc
                }
            })
            .flatten()
            .collect();
        OperatorSum { terms: canonicalize(terms) }
    }

    pub fn terms(&self) -> &[TensorTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: impl Into<C64>) -> Self {
        let c = c.into();
        Self::from_canonical_scaled(self, c)
    }

    fn from_canonical_scaled(a: &OperatorSum, c: C64) -> Self {
        OperatorSum {
            terms: canonicalize(
                a.terms.iter().map(|t| TensorTerm { coeff: t.coeff * c, factors: t.factors.clone() }).collect(),
            ),
        }
    }

    pub fn adjoint(&self) -> Self {
        OperatorSum { terms: canonicalize(self.terms.iter().map(TensorTerm::adjoint).collect()) }
    }

    pub fn multiply(&self, other: &OperatorSum) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                out.extend(a.product(b));
            }
        }
        OperatorSum { terms: canonicalize(out) }
    }

    pub fn commutator(&self, other: &OperatorSum) -> Self {
        &self.multiply(other) - &other.multiply(self)
    }

    /// Canonical forms equal term by term within `tol`.
    pub fn approx_eq(&self, other: &OperatorSum, tol: f64) -> bool {
        self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|(a, b)| a.factors == b.factors && (a.coeff - b.coeff).norm() <= tol)
    }

    pub fn is_hermitian(&self) -> bool {
        self.approx_eq(&self.adjoint(), COEFF_TOL)
    }

    /// Sites carrying a non-identity factor.
    pub fn sites(&self) -> BTreeSet<Site> {
        self.terms.iter().flat_map(|t| t.factors.iter().map(|&(s, _)| s)).collect()
    }

    pub fn support(&self) -> SiteSpace {
        SiteSpace::new(self.sites())
    }

    /// Compiles to a sparse matrix on `space`.
    pub fn to_matrix(&self, space: &SiteSpace) -> Result<CsrMatrix> {
        let dim = space.dim();
        let mut triplets: Vec<(u32, u32, C64)> = Vec::with_capacity(self.terms.len() * dim);
        for term in &self.terms {
            let shifted: Vec<(usize, LocalOp)> = term
                .factors
                .iter()
                .map(|&(s, op)| space.shift(s).map(|sh| (sh, op)).ok_or(Error::SiteNotInSpace { site: s }))
                .collect::<Result<_>>()?;
            'col: for col in 0..dim {
                let mut row = col;
                let mut amp = term.coeff;
                for &(sh, op) in &shifted {
                    match op.act((col >> sh) & 1) {
                        Some((nb, a)) => {
                            row = (row & !(1 << sh)) | (nb << sh);
                            amp *= a;
                        }
                        None => continue 'col,
                    }
                }
                triplets.push((row as u32, col as u32, amp));
            }
        }
        Ok(CsrMatrix::from_triplets(dim, dim, triplets))
    }
}

fn canonicalize(mut terms: Vec<TensorTerm>) -> Vec<TensorTerm> {
    loop {
        terms.sort_by(|a, b| a.factors.cmp(&b.factors));
        let mut merged: Vec<TensorTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.factors == t.factors => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff.norm() > COEFF_TOL);

        // c·A⊗Π⁺ + c·A⊗Π⁻ on the same site collapses to c·A.
        let index: HashMap<&[(Site, LocalOp)], usize> =
            merged.iter().enumerate().map(|(i, t)| (t.factors.as_slice(), i)).collect();
        let mut consumed = vec![false; merged.len()];
        let mut collapsed = Vec::new();
        for (i, t) in merged.iter().enumerate() {
            if consumed[i] {
                continue;
            }
            for (k, &(site, op)) in t.factors.iter().enumerate() {
                if op != LocalOp::PiPlus {
                    continue;
                }
                let mut partner = t.factors.clone();
                partner[k] = (site, LocalOp::PiMinus);
                if let Some(&j) = index.get(partner.as_slice()) {
                    if !consumed[j] && (merged[j].coeff - t.coeff).norm() <= COEFF_TOL {
                        consumed[i] = true;
                        consumed[j] = true;
                        let mut factors = t.factors.clone();
                        factors.remove(k);
                        collapsed.push(TensorTerm { coeff: (t.coeff + merged[j].coeff) * 0.5, factors });
                        break;
                    }
                }
            }
        }
        if collapsed.is_empty() {
            return merged;
        }
        terms = merged.into_iter().zip(consumed).filter_map(|(t, c)| (!c).then_some(t)).chain(collapsed).collect();
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:+.6}{:+.6}i)", t.coeff.re, t.coeff.im)?;
            for (s, op) in &t.factors {
                write!(f, "·{}{}", op.name(), s)?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&OperatorSum> for &OperatorSum {
            type Output = OperatorSum;
            fn $m(self, rhs: &OperatorSum) -> OperatorSum {
                let f: fn(&OperatorSum, &OperatorSum) -> OperatorSum = $body;
                f(self, rhs)
            }
        }
        impl $tr<OperatorSum> for OperatorSum {
            type Output = OperatorSum;
            fn $m(self, rhs: OperatorSum) -> OperatorSum {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&OperatorSum> for OperatorSum {
            type Output = OperatorSum;
            fn $m(self, rhs: &OperatorSum) -> OperatorSum {
                (&self).$m(rhs)
            }
        }
        impl $tr<OperatorSum> for &OperatorSum {
            type Output = OperatorSum;
            fn $m(self, rhs: OperatorSum) -> OperatorSum {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| OperatorSum { terms: canonicalize(a.terms.iter().chain(&b.terms).cloned().collect()) });
binop!(Sub, sub, |a, b| OperatorSum {
    terms: canonicalize(
        a.terms
            .iter()
            .cloned()
            .chain(b.terms.iter().map(|t| TensorTerm { coeff: -t.coeff, factors: t.factors.clone() }))
            .collect()
    )
});
binop!(Mul, mul, |a, b| a.multiply(b));

impl Mul<C64> for &OperatorSum {
    type Output = OperatorSum;
    fn mul(self, c: C64) -> OperatorSum {
        self.scale(c)
    }
}

impl Mul<C64> for OperatorSum {
    type Output = OperatorSum;
    fn mul(self, c: C64) -> OperatorSum {
        self.scale(c)
    }
}

impl Mul<f64> for &OperatorSum {
    type Output = OperatorSum;
    fn mul(self, c: f64) -> OperatorSum {
        self.scale(c)
    }
}

impl Mul<f64> for OperatorSum {
    type Output = OperatorSum;
    fn mul(self, c: f64) -> OperatorSum {
        self.scale(c)
    }
}

impl Neg for &OperatorSum {
    type Output = OperatorSum;
    fn neg(self) -> OperatorSum {
        self.scale(-1.0)
    }
}

impl Neg for OperatorSum {
    type Output = OperatorSum;
    fn neg(self) -> OperatorSum {
        self.scale(-1.0)
    }
}

impl std::iter::Sum for OperatorSum {
    fn sum<It: Iterator<Item = OperatorSum>>(iter: It) -> Self {
        OperatorSum { terms: canonicalize(iter.flat_map(|o| o.terms).collect()) }
    }
}

/// Wire form of one term: `{coefficient_re, coefficient_im, factors: [[site, op], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermRecord {
    pub coefficient_re: f64,
    pub coefficient_im: f64,
    pub factors: Vec<(Site, String)>,
}

impl Serialize for OperatorSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let records: Vec<TermRecord> = self
            .terms
            .iter()
            .map(|t| TermRecord {
                coefficient_re: t.coeff.re,
                coefficient_im: t.coeff.im,
                factors: t.factors.iter().map(|&(site, op)| (site, op.name().to_string())).collect(),
            })
            .collect();
        records.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(d)?;
        let mut terms = Vec::with_capacity(records.len());
        for r in records {
            let factors = r
                .factors
                .into_iter()
                .map(|(site, name)| {
                    LocalOp::from_name(&name)
                        .map(|op| (site, op))
                        .ok_or_else(|| serde::de::Error::custom(format!("unknown local operator {name:?}")))
                })
                .collect::<std::result::Result<Vec<_>, D::Error>>()?;
            terms.push(TensorTerm { coeff: C64::new(r.coefficient_re, r.coefficient_im), factors });
        }
        Ok(OperatorSum::from_terms(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(r: usize, c: usize) -> Site {
        Site::memory(r, c)
    }

    fn dense_mul(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = a[i * n + k];
                if aik == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += aik * b[k * n + j];
                }
            }
        }
        out
    }

    #[test]
    fn local_algebra_identities() {
        let r = Site::relay(1);
        let id = OperatorSum::identity();
        for p in [LocalOp::X, LocalOp::Y, LocalOp::Z] {
            let a = OperatorSum::op(q(1, 1), p);
            assert!((&a * &a).approx_eq(&id, 0.0));
        }
        assert!((OperatorSum::pi_plus(r) + OperatorSum::pi_minus(r)).approx_eq(&id, 0.0));
        assert!((OperatorSum::sigma_pm(r) * OperatorSum::sigma_mp(r)).approx_eq(&OperatorSum::pi_plus(r), 0.0));
        assert!((OperatorSum::sigma_mp(r) * OperatorSum::sigma_pm(r)).approx_eq(&OperatorSum::pi_minus(r), 0.0));
    }

    #[test]
    fn local_products_match_matrices() {
        for a in LocalOp::ALL {
            for b in LocalOp::ALL {
                let (ma, mb) = (a.matrix(), b.matrix());
                let mut expect = [[ZERO; 2]; 2];
                for r in 0..2 {
                    for c in 0..2 {
                        expect[r][c] = ma[r][0] * mb[0][c] + ma[r][1] * mb[1][c];
                    }
                }
                let mut got = [[ZERO; 2]; 2];
                for (coef, op) in local_product(a, b) {
                    let m = op.map(|o| o.matrix()).unwrap_or([[ONE, ZERO], [ZERO, ONE]]);
                    for r in 0..2 {
                        for c in 0..2 {
                            got[r][c] += coef * m[r][c];
                        }
                    }
                }
                assert_eq!(got, expect, "{a:?}·{b:?}");
            }
        }
    }

    #[test]
    fn parity_projectors_are_orthogonal() {
        // (1 - Z_{*,1}Z_{*,2})(1 + Z_{*,1}Z_{*,2}) = 0, checked symbolically and
        // against a dense 64x64 product on the six involved sites.
        let zz = OperatorSum::product_of((1..=3).flat_map(|r| [(q(r, 1), LocalOp::Z), (q(r, 2), LocalOp::Z)]));
        let odd = &OperatorSum::identity() - &zz;
        let even = &OperatorSum::identity() + &zz;
        assert!((&odd * &even).is_zero());

        let space = zz.support();
        assert_eq!(space.dim(), 64);
        let a = odd.to_matrix(&space).unwrap().to_dense();
        let b = even.to_matrix(&space).unwrap().to_dense();
        assert!(dense_mul(&a, &b, 64).iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn adjoint_examples() {
        let r = Site::relay(1);
        assert!(OperatorSum::sigma_pm(r).adjoint().approx_eq(&OperatorSum::sigma_mp(r), 0.0));
        let ix = OperatorSum::x(q(2, 2)).scale(I);
        assert!(ix.adjoint().approx_eq(&OperatorSum::x(q(2, 2)).scale(-I), 0.0));
    }

    #[test]
    fn identity_on_full_space() {
        let m = OperatorSum::identity().to_matrix(&SiteSpace::full()).unwrap();
        assert_eq!(m.nrows(), 8192);
        assert_eq!(m.max_abs_diff(&CsrMatrix::identity(8192)), 0.0);
    }

    #[test]
    fn disjoint_sites_compile_to_commuting_product() {
        let space = SiteSpace::new([Site::new(0).unwrap(), Site::new(1).unwrap()]);
        let x0 = OperatorSum::x(Site::new(0).unwrap());
        let z1 = OperatorSum::z(Site::new(1).unwrap());
        let lhs = (&x0 * &z1).to_matrix(&space).unwrap();
        let rhs = x0.to_matrix(&space).unwrap().matmul(&z1.to_matrix(&space).unwrap());
        assert_eq!(lhs.max_abs_diff(&rhs), 0.0);
    }

    #[test]
    fn compiling_outside_space_is_an_error() {
        let space = SiteSpace::new([q(1, 1)]);
        let err = OperatorSum::x(q(1, 2)).to_matrix(&space).unwrap_err();
        assert!(matches!(err, Error::SiteNotInSpace { .. }));
    }

    #[test]
    fn serialization_round_trip() {
        let op = &OperatorSum::pi_minus(Site::relay(2)).scale(C64::new(0.5, -1.0)) + &OperatorSum::x(q(3, 1));
        let json = serde_json::to_string(&op).unwrap();
        assert!(json.contains("\"coefficient_re\""));
        assert!(json.contains("\"P-\""));
        let back: OperatorSum = serde_json::from_str(&json).unwrap();
        assert!(back.approx_eq(&op, 0.0));
    }

    #[test]
    fn repeated_sites_in_raw_terms_are_multiplied() {
        let t = TensorTerm { coeff: ONE, factors: vec![(q(1, 1), LocalOp::Z), (q(1, 1), LocalOp::X)] };
        let op = OperatorSum::from_terms(vec![t]);
        assert!(op.approx_eq(&OperatorSum::y(q(1, 1)).scale(I), 0.0));
    }
}
