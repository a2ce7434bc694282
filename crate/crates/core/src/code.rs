//! The 3×3 Bacon-Shor subsystem code: symplectic Pauli strings, the
//! stabilizer and gauge groups, syndromes and recovery, the initial
//! codeword and the fidelity operator.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{LocalOp, OperatorSum, Pauli};
use crate::sites::{Site, SiteSpace, MEMORY_SITES};

const MASK: u16 = (1 << MEMORY_SITES) - 1;

/// `i^k · Π_q X_q^{x_q} Z_q^{z_q}` on the nine memory qubits (X before Z on
/// each qubit). With `Y = iXZ`, a `Y` on qubit `q` is `x_q = z_q = 1`
/// carrying one factor of `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub x_bits: u16,
    pub z_bits: u16,
    /// Power of `i` in front of the X-then-Z product.
    k: u8,
}

fn bit(site: Site) -> u16 {
    assert!(site.is_memory(), "Pauli strings live on memory qubits, got {site}");
    1 << site.index()
}

impl PauliString {
    pub fn identity() -> Self {
        PauliString { x_bits: 0, z_bits: 0, k: 0 }
    }

    pub fn single(site: Site, p: Pauli) -> Self {
        let b = bit(site);
        match p {
            Pauli::X => PauliString { x_bits: b, z_bits: 0, k: 0 },
            Pauli::Z => PauliString { x_bits: 0, z_bits: b, k: 0 },
            Pauli::Y => PauliString { x_bits: b, z_bits: b, k: 1 },
        }
    }

    /// Ordered product of single-qubit Paulis.
    pub fn from_ops(ops: &[(Site, Pauli)]) -> Self {
        ops.iter().fold(Self::identity(), |acc, &(s, p)| acc * Self::single(s, p))
    }

    pub fn x_on(sites: impl IntoIterator<Item = Site>) -> Self {
        let x_bits = sites.into_iter().fold(0, |acc, s| acc ^ bit(s));
        PauliString { x_bits, z_bits: 0, k: 0 }
    }

    pub fn z_on(sites: impl IntoIterator<Item = Site>) -> Self {
        let z_bits = sites.into_iter().fold(0, |acc, s| acc ^ bit(s));
        PauliString { x_bits: 0, z_bits, k: 0 }
    }

    /// Scalar multiple by `i^k`.
    pub fn times_i_pow(self, k: u8) -> Self {
        PauliString { k: (self.k + k) % 4, ..self }
    }

    /// Coefficient in front of the plain tensor product of `X`, `Y`, `Z`
    /// factors: one of `1, i, −1, −i`.
    pub fn phase(&self) -> C64 {
        let ys = (self.x_bits & self.z_bits).count_ones() as u8;
        // XZ = −iY, so each Y contributes i^3.
        i_pow(self.k + 3 * ys)
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase().im == 0.0
    }

    pub fn weight(&self) -> u32 {
        (self.x_bits | self.z_bits).count_ones()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x_bits == 0 && self.z_bits == 0
    }

    /// Symplectic form: 0 iff the strings commute.
    pub fn symplectic(&self, other: &PauliString) -> u32 {
        ((self.x_bits & other.z_bits).count_ones() + (self.z_bits & other.x_bits).count_ones()) % 2
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        self.symplectic(other) == 0
    }

    /// Single-qubit factors in site order.
    pub fn factors(&self) -> Vec<(Site, Pauli)> {
        Site::all_memory()
            .filter_map(|s| {
                let b = bit(s);
                match (self.x_bits & b != 0, self.z_bits & b != 0) {
                    (true, false) => Some((s, Pauli::X)),
                    (false, true) => Some((s, Pauli::Z)),
                    (true, true) => Some((s, Pauli::Y)),
                    _ => None,
                }
            })
            .collect()
    }

    pub fn to_operator(&self) -> OperatorSum {
        OperatorSum::product_of(self.factors().into_iter().map(|(s, p)| (s, p.local()))).scale(self.phase())
    }

    /// Inverse of [`PauliString::to_operator`]: a single term of Pauli
    /// factors on memory qubits with coefficient in `{±1, ±i}`.
    pub fn from_operator(op: &OperatorSum) -> Option<Self> {
        let [term] = op.terms() else { return None };
        let mut p = PauliString::identity();
        for &(site, local) in &term.factors {
            let pauli = match local {
                LocalOp::X => Pauli::X,
                LocalOp::Y => Pauli::Y,
                LocalOp::Z => Pauli::Z,
                _ => return None,
            };
            if !site.is_memory() {
                return None;
            }
            p = p * PauliString::single(site, pauli);
        }
        let k = (0..4u8).find(|&k| (i_pow(k) - term.coeff).norm() < 1e-12)?;
        Some(p.times_i_pow(k))
    }
}

fn i_pow(k: u8) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

impl std::ops::Mul for PauliString {
    type Output = PauliString;

    fn mul(self, rhs: PauliString) -> PauliString {
        // (X^a Z^b)(X^c Z^d) = (−1)^{b·c} X^{a+c} Z^{b+d} per qubit.
        let sign = (self.z_bits & rhs.x_bits).count_ones() as u8 % 2;
        PauliString {
            x_bits: (self.x_bits ^ rhs.x_bits) & MASK,
            z_bits: (self.z_bits ^ rhs.z_bits) & MASK,
            k: (self.k + rhs.k + 2 * sign) % 4,
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.phase();
        let sign = match (c.re as i32, c.im as i32) {
            (1, _) => "+",
            (-1, _) => "-",
            (_, 1) => "+i",
            _ => "-i",
        };
        f.write_str(sign)?;
        let factors = self.factors();
        if factors.is_empty() {
            return f.write_str("I");
        }
        for (s, p) in factors {
            let (r, c) = s.row_col().unwrap();
            write!(f, "{p}{r}{c}")?;
        }
        Ok(())
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Stabilizer eigenvalues ordered `(Z_{*,1}Z_{*,2}, Z_{*,2}Z_{*,3},
/// X_{1,*}X_{2,*}, X_{2,*}X_{3,*})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Syndrome(pub [i8; 4]);

impl Syndrome {
    pub const TRIVIAL: Syndrome = Syndrome([1, 1, 1, 1]);

    pub fn all() -> impl Iterator<Item = Syndrome> {
        (0..16u8).map(|m| Syndrome(std::array::from_fn(|k| if m >> k & 1 == 1 { -1 } else { 1 })))
    }

    pub fn combine(self, other: Syndrome) -> Syndrome {
        Syndrome(std::array::from_fn(|k| self.0[k] * other.0[k]))
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|v| format!("{v:+}")).collect();
        write!(f, "({})", s.join(","))
    }
}

fn column_sites(c: usize) -> impl Iterator<Item = Site> {
    (1..=3).map(move |r| Site::memory(r, c))
}

fn row_sites(r: usize) -> impl Iterator<Item = Site> {
    (1..=3).map(move |c| Site::memory(r, c))
}

pub fn stabilizer_generators() -> [PauliString; 4] {
    [
        PauliString::z_on(column_sites(1).chain(column_sites(2))),
        PauliString::z_on(column_sites(2).chain(column_sites(3))),
        PauliString::x_on(row_sites(1).chain(row_sites(2))),
        PauliString::x_on(row_sites(2).chain(row_sites(3))),
    ]
}

/// The 2-body generators of the gauge group: `X_{i,j}X_{i+1,j}` and
/// `Z_{j,i}Z_{j,i+1}`.
pub fn gauge_group_generators() -> Vec<PauliString> {
    let q = Site::memory;
    let mut out = Vec::with_capacity(12);
    for i in 1..=2 {
        for j in 1..=3 {
            out.push(PauliString::x_on([q(i, j), q(i + 1, j)]));
        }
    }
    for j in 1..=3 {
        for i in 1..=2 {
            out.push(PauliString::z_on([q(j, i), q(j, i + 1)]));
        }
    }
    out
}

/// Logical operators and a gauge-qubit basis.
#[derive(Clone, Debug, Serialize)]
pub struct LogicalOperators {
    pub x_l: PauliString,
    pub z_l: PauliString,
    /// `(X_Gi, Z_Gi)`.
    pub gauge: [(PauliString, PauliString); 4],
}

impl LogicalOperators {
    /// `Y_L = i X_L Z_L`.
    pub fn y_l(&self) -> PauliString {
        (self.x_l * self.z_l).times_i_pow(1)
    }
}

pub fn gauge_and_logical_operators() -> Result<LogicalOperators> {
    let q = Site::memory;
    let ops = LogicalOperators {
        x_l: PauliString::x_on(row_sites(1)),
        z_l: PauliString::z_on(column_sites(1)),
        gauge: [
            (PauliString::x_on([q(1, 1), q(3, 1)]), PauliString::z_on([q(1, 1), q(1, 2)])),
            (PauliString::x_on([q(2, 1), q(3, 1)]), PauliString::z_on([q(2, 1), q(2, 2)])),
            (PauliString::x_on([q(1, 3), q(3, 3)]), PauliString::z_on([q(1, 2), q(1, 3)])),
            (PauliString::x_on([q(2, 3), q(3, 3)]), PauliString::z_on([q(2, 2), q(2, 3)])),
        ],
    };
    validate_logical_operators(&ops)?;
    Ok(ops)
}

/// Rank over GF(2) of the symplectic vectors `(x|z)`.
pub fn gf2_rank(strings: &[PauliString]) -> usize {
    let mut rows: Vec<u32> = strings.iter().map(|p| (p.x_bits as u32) << MEMORY_SITES | p.z_bits as u32).collect();
    let mut rank = 0;
    for b in (0..2 * MEMORY_SITES).rev() {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i] >> b & 1 == 1) else { continue };
        rows.swap(rank, pivot);
        for i in 0..rows.len() {
            if i != rank && rows[i] >> b & 1 == 1 {
                rows[i] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}

fn in_gauge_group(p: &PauliString) -> bool {
    let gens = gauge_group_generators();
    gf2_rank(&gens) == gf2_rank(&[gens.as_slice(), &[*p]].concat())
}

pub fn validate_logical_operators(ops: &LogicalOperators) -> Result<()> {
    let fail = |msg: String| Err(Error::Validation(msg));
    let stabs = stabilizer_generators();
    if ops.x_l.commutes_with(&ops.z_l) {
        return fail("X_L and Z_L must anticommute".into());
    }
    for (i, (xg, zg)) in ops.gauge.iter().enumerate() {
        if xg.commutes_with(zg) {
            return fail(format!("gauge pair {} does not anticommute", i + 1));
        }
        for (name, p) in [("X_G", xg), ("Z_G", zg)] {
            if !in_gauge_group(p) {
                return fail(format!("{name}{} = {p} is not in the gauge group", i + 1));
            }
            for s in stabs.iter().chain([&ops.x_l, &ops.z_l]) {
                if !p.commutes_with(s) {
                    return fail(format!("{name}{} = {p} fails to commute with {s}", i + 1));
                }
            }
        }
        for (j, (xh, zh)) in ops.gauge.iter().enumerate() {
            if i != j
                && [xg.commutes_with(xh), xg.commutes_with(zh), zg.commutes_with(xh), zg.commutes_with(zh)]
                    .contains(&false)
            {
                return fail(format!("gauge pairs {} and {} do not commute", i + 1, j + 1));
            }
        }
    }
    let mut constraints = stabs.to_vec();
    constraints.push(ops.y_l());
    constraints.extend(ops.gauge.iter().map(|g| g.1));
    if gf2_rank(&constraints) != MEMORY_SITES {
        return fail("state constraints are not independent".into());
    }
    Ok(())
}

/// `a_k = +1` iff `e` commutes with stabilizer generator `k`.
pub fn syndrome_of(e: &PauliString) -> Syndrome {
    let stabs = stabilizer_generators();
    Syndrome(std::array::from_fn(|k| if e.commutes_with(&stabs[k]) { 1 } else { -1 }))
}

fn locate(pair: (i8, i8)) -> Option<usize> {
    match pair {
        (-1, 1) => Some(1),
        (-1, -1) => Some(2),
        (1, -1) => Some(3),
        _ => None,
    }
}

/// Recovery on the feedback targets: `X` on row 3 of the flagged column,
/// `Z` on column 1 of the flagged row.
pub fn decode_recovery(s: Syndrome) -> PauliString {
    let mut r = PauliString::identity();
    if let Some(col) = locate((s.0[0], s.0[1])) {
        r = r * PauliString::single(Site::memory(3, col), Pauli::X);
    }
    if let Some(row) = locate((s.0[2], s.0[3])) {
        r = r * PauliString::single(Site::memory(row, 1), Pauli::Z);
    }
    r
}

/// The 27 single-qubit Paulis followed by the identity.
pub fn single_qubit_errors() -> Vec<PauliString> {
    let mut v: Vec<PauliString> =
        Pauli::ALL.iter().flat_map(|&p| Site::all_memory().map(move |s| PauliString::single(s, p))).collect();
    v.push(PauliString::identity());
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct DecoderCase {
    pub error: PauliString,
    pub syndrome: Syndrome,
    pub recovery: PauliString,
    pub net: PauliString,
    pub restores_code: bool,
}

/// Recovery·error must commute with every stabilizer, `X_L` and `Z_L`.
pub fn decoder_audit() -> Result<Vec<DecoderCase>> {
    let ops = gauge_and_logical_operators()?;
    let checks: Vec<PauliString> = stabilizer_generators().into_iter().chain([ops.x_l, ops.z_l]).collect();
    Ok(single_qubit_errors()
        .into_iter()
        .map(|error| {
            let syndrome = syndrome_of(&error);
            let recovery = decode_recovery(syndrome);
            let net = recovery * error;
            let restores_code = checks.iter().all(|c| net.commutes_with(c));
            DecoderCase { error, syndrome, recovery, net, restores_code }
        })
        .collect())
}

/// `(1 + P)/2`.
pub fn plus_projector(p: &PauliString) -> OperatorSum {
    (&OperatorSum::identity() + &p.to_operator()).scale(0.5)
}

/// Unit vector in the joint range of commuting projectors on `space`.
///
/// The range must be one-dimensional; the phase is fixed by making the
/// largest-weight basis component real and positive.
pub fn joint_eigenstate(projectors: &[OperatorSum], space: &SiteSpace) -> Result<Vec<C64>> {
    let p: OperatorSum = projectors.iter().fold(OperatorSum::identity(), |acc, x| &acc * x);
    let m = p.to_matrix(space)?;
    let rank = m.trace().re;
    if (rank - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!("constraint space has dimension {rank:.3}, expected 1")));
    }
    let diag = m.diagonal();
    let (j, _) = diag
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v.re > best.1 { (i, v.re) } else { best });
    let mut e = vec![C64::new(0.0, 0.0); space.dim()];
    e[j] = C64::new(1.0, 0.0);
    let mut psi = m.matvec(&e);
    let norm = psi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|v| *v /= norm);
    Ok(psi)
}

/// Commuting constraints fixing an initial codeword, plus the projector
/// that defines fidelity.
#[derive(Clone, Debug)]
pub struct CodewordSpec {
    pub stabilizers: Vec<PauliString>,
    pub logical: PauliString,
    /// Fixed gauge eigenvalues (`+1`) for the initial state.
    pub gauge: Vec<PauliString>,
    pub relays: Vec<Site>,
    pub space: SiteSpace,
}

impl CodewordSpec {
    /// Full network: `Y_L = +1`, `Z_Gi = +1`, relays in `|+⟩`.
    pub fn bacon_shor() -> Result<Self> {
        let ops = gauge_and_logical_operators()?;
        Ok(CodewordSpec {
            stabilizers: stabilizer_generators().to_vec(),
            logical: ops.y_l(),
            gauge: ops.gauge.iter().map(|g| g.1).collect(),
            relays: (1..=4).map(Site::relay).collect(),
            space: SiteSpace::full(),
        })
    }

    /// Column 1 as a three-qubit phase-flip code: stabilizers
    /// `X_{1,1}X_{2,1}`, `X_{2,1}X_{3,1}`, logical `Y_L = Y_{1,1}Z_{2,1}Z_{3,1}`,
    /// relays R3, R4 in `|+⟩`.
    pub fn column() -> Self {
        let q = Site::memory;
        let x_l = PauliString::single(q(1, 1), Pauli::X);
        let z_l = PauliString::z_on(column_sites(1));
        CodewordSpec {
            stabilizers: vec![PauliString::x_on([q(1, 1), q(2, 1)]), PauliString::x_on([q(2, 1), q(3, 1)])],
            logical: (x_l * z_l).times_i_pow(1),
            gauge: Vec::new(),
            relays: vec![Site::relay(3), Site::relay(4)],
            space: SiteSpace::new(column_sites(1).chain([Site::relay(3), Site::relay(4)])),
        }
    }

    /// `ρ₀` as a product of projectors.
    pub fn initial_projector(&self) -> OperatorSum {
        let memory = self
            .stabilizers
            .iter()
            .chain([&self.logical])
            .chain(&self.gauge)
            .fold(OperatorSum::identity(), |acc, p| &acc * &plus_projector(p));
        self.relays.iter().fold(memory, |acc, &r| &acc * &OperatorSum::pi_plus(r))
    }

    pub fn initial_state(&self) -> Result<Vec<C64>> {
        let mut projectors: Vec<OperatorSum> =
            self.stabilizers.iter().chain([&self.logical]).chain(&self.gauge).map(plus_projector).collect();
        projectors.extend(self.relays.iter().map(|&r| OperatorSum::pi_plus(r)));
        joint_eigenstate(&projectors, &self.space)
    }

    /// `F = Π_{S=+1}·(1 + Y_L)/2`, identity on gauge qubits and relays.
    pub fn fidelity_operator(&self) -> OperatorSum {
        self.stabilizers.iter().chain([&self.logical]).fold(OperatorSum::identity(), |acc, p| &acc * &plus_projector(p))
    }

    /// `2^{g+r}` times `ρ₀` with every gauge qubit and relay fully
    /// depolarized, by Pauli twirling.
    pub fn fidelity_operator_by_depolarizing(&self, ops: Option<&LogicalOperators>) -> OperatorSum {
        let twirl = |rho: &OperatorSum, paulis: [OperatorSum; 3]| -> OperatorSum {
            let mut acc = rho.clone();
            for p in &paulis {
                acc = &acc + &(&(p * rho) * &p.adjoint());
            }
            acc.scale(0.25)
        };
        let mut rho = self.initial_projector();
        let mut factor = 1.0;
        if let Some(ops) = ops {
            for (xg, zg) in &ops.gauge {
                let yg = (*xg * *zg).times_i_pow(1);
                rho = twirl(&rho, [xg.to_operator(), yg.to_operator(), zg.to_operator()]);
                factor *= 2.0;
            }
        }
        for &r in &self.relays {
            let sx = &OperatorSum::sigma_pm(r) + &OperatorSum::sigma_mp(r);
            let sy = (&OperatorSum::sigma_mp(r) - &OperatorSum::sigma_pm(r)).scale(C64::new(0.0, 1.0));
            let sz = &OperatorSum::pi_plus(r) - &OperatorSum::pi_minus(r);
            rho = twirl(&rho, [sx, sy, sz]);
            factor *= 2.0;
        }
        rho.scale(factor)
    }
}

/// `|Y+⟩` fidelity of one qubit under `√Γ X`, `√Γ Y`, `√Γ Z`.
pub fn bare_qubit_fidelity(gamma: f64, t: f64) -> f64 {
    0.5 * (1.0 + (-4.0 * gamma * t).exp())
}
