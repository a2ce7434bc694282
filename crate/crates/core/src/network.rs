//! Assembly of the 3×3 Bacon-Shor probe and feedback networks, the
//! hand-written reference model, and master-equation comparison.

use std::f64::consts::SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::assignment::min_cost_assignment;
use crate::catalog::{
    beamsplitter, drive, error_channels, identity, probe_qubit, raman_pair, relay_router, relay_set_reset,
    BeamsplitterOrientation, ComponentParams, ProbeAxis, RouterPhase,
};
use crate::error::{Error, Result};
use crate::operator::{LocalOp, OperatorSum, Pauli};
use crate::sites::{Site, SiteSpace};
use crate::slh::{concat_all, extract_master_equation, pad, series, series_chain, MasterEquation, SLHTriple};
use crate::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    #[default]
    Grid,
    Zigzag,
}

impl std::str::FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(Topology::Grid),
            "zigzag" => Ok(Topology::Zigzag),
            other => Err(Error::InvalidParameter(format!("unknown topology `{other}` (expected grid or zigzag)"))),
        }
    }
}

impl std::fmt::Display for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Topology::Grid => "grid",
            Topology::Zigzag => "zigzag",
        })
    }
}

/// A single-site Pauli frame change `P_site`, used to quotient sign
/// conventions when comparing models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaugeEntry {
    pub site: Site,
    pub pauli: Pauli,
}

impl std::str::FromStr for GaugeEntry {
    type Err = Error;

    /// `"Z@Q(3,3)"` or `"X@R1"`.
    fn from_str(s: &str) -> Result<Self> {
        let (p, site) =
            s.split_once('@').ok_or_else(|| Error::InvalidParameter(format!("gauge entry `{s}` is not PAULI@SITE")))?;
        Ok(GaugeEntry { pauli: p.trim().parse()?, site: site.trim().parse()? })
    }
}

impl std::fmt::Display for GaugeEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}@{}", self.pauli, self.site)
    }
}

/// Unitary product of the gauge entries (identity when empty).
pub fn gauge_unitary(gauge: &[GaugeEntry]) -> OperatorSum {
    gauge.iter().fold(OperatorSum::identity(), |acc, g| &acc * &g.pauli.on(g.site))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    pub gamma: f64,
    pub error_types: Vec<Pauli>,
    pub topology: Topology,
    pub gauge: Vec<GaugeEntry>,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            alpha: 100.0 / 8.0,
            beta: 1.0,
            omega: 100.0,
            gamma: 0.1,
            error_types: Pauli::ERROR_ORDER.to_vec(),
            topology: Topology::Grid,
            gauge: Vec::new(),
        }
    }
}

impl NetworkParams {
    pub fn components(&self) -> ComponentParams {
        ComponentParams { alpha: self.alpha, beta: self.beta, omega: self.omega, gamma: self.gamma }
    }

    pub fn validate(&self) -> Result<()> {
        self.components().validate()?;
        if self.error_types.is_empty() && self.gamma != 0.0 {
            return Err(Error::InvalidParameter("error_types must be nonempty when gamma > 0".into()));
        }
        Ok(())
    }
}

/// How the probe light reaches the two parity arms.
#[derive(Clone, Debug, PartialEq)]
pub enum ProbeArms {
    /// One field at `√2α` threads `middle`, is split by `splitter`, and
    /// each half threads one arm path.
    Split { middle: Vec<Site>, arms: [Vec<Site>; 2], splitter: BeamsplitterOrientation },
    /// Two independent fields at `α`, each threading its own full path.
    Separate { paths: [Vec<Site>; 2] },
}

/// Probe network wiring. Site paths are listed upstream first.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeLayout {
    pub axis: ProbeAxis,
    pub relays: [usize; 2],
    pub arms: ProbeArms,
    /// Arm/local-oscillator interference, one per relay.
    pub combiners: [BeamsplitterOrientation; 2],
}

fn column(c: usize, rows: [usize; 3]) -> Vec<Site> {
    rows.iter().map(|&r| Site::memory(r, c)).collect()
}

fn row(r: usize, cols: [usize; 3]) -> Vec<Site> {
    cols.iter().map(|&c| Site::memory(r, c)).collect()
}

impl ProbeLayout {
    /// Column parities `Z_{*,1}Z_{*,2}` → R1 and `Z_{*,3}Z_{*,2}` → R2
    /// (`axis = Z`), or row parities on R3/R4 (`axis = X`).
    pub fn grid(axis: ProbeAxis) -> Self {
        let (relays, middle, arms) = match axis {
            ProbeAxis::Z => ([1, 2], column(2, [3, 2, 1]), [column(1, [1, 2, 3]), column(3, [1, 2, 3])]),
            ProbeAxis::X => ([3, 4], row(2, [1, 2, 3]), [row(1, [3, 2, 1]), row(3, [3, 2, 1])]),
        };
        ProbeLayout {
            axis,
            relays,
            arms: ProbeArms::Split { middle, arms, splitter: BeamsplitterOrientation::SwapInputs },
            combiners: [BeamsplitterOrientation::Default; 2],
        }
    }

    /// Serpentine threading: each arm field visits its two columns (rows)
    /// pair by pair, so consecutive segments are the 2-body gauge
    /// generators. Middle-line qubits are visited by both fields.
    pub fn zigzag(axis: ProbeAxis) -> Self {
        let site = |line: usize, k: usize| match axis {
            ProbeAxis::Z => Site::memory(k, line),
            ProbeAxis::X => Site::memory(line, k),
        };
        let snake = |outer: usize| -> Vec<Site> {
            (1..=3)
                .flat_map(|k| if k % 2 == 1 { [site(outer, k), site(2, k)] } else { [site(2, k), site(outer, k)] })
                .collect()
        };
        ProbeLayout {
            axis,
            relays: match axis {
                ProbeAxis::Z => [1, 2],
                ProbeAxis::X => [3, 4],
            },
            arms: ProbeArms::Separate { paths: [snake(1), snake(3)] },
            combiners: [BeamsplitterOrientation::Default; 2],
        }
    }

    pub fn for_topology(axis: ProbeAxis, topology: Topology) -> Self {
        match topology {
            Topology::Grid => Self::grid(axis),
            Topology::Zigzag => Self::zigzag(axis),
        }
    }

    /// Row-parity probe restricted to column 1: `X_{1,1}X_{2,1}` → R3 and
    /// `X_{3,1}X_{2,1}` → R4.
    pub fn reduced_column() -> Self {
        ProbeLayout {
            axis: ProbeAxis::X,
            relays: [3, 4],
            arms: ProbeArms::Split {
                middle: vec![Site::memory(2, 1)],
                arms: [vec![Site::memory(1, 1)], vec![Site::memory(3, 1)]],
                splitter: BeamsplitterOrientation::SwapInputs,
            },
            combiners: [BeamsplitterOrientation::Default; 2],
        }
    }
}

fn probe_chain(sites: &[Site], axis: ProbeAxis, source: SLHTriple) -> Result<SLHTriple> {
    let probes = sites.iter().map(|&s| probe_qubit(s, axis)).collect::<Result<Vec<_>>>()?;
    series_chain(std::iter::once(&source).chain(&probes))
}

/// The successive stages of a probe network, upstream first. Their series
/// product is the network.
pub fn probe_stages(layout: &ProbeLayout, alpha: f64) -> Result<Vec<SLHTriple>> {
    let lo = drive(alpha);
    let mut stages = Vec::new();
    match &layout.arms {
        ProbeArms::Split { middle, arms, splitter } => {
            let source = probe_chain(middle, layout.axis, drive(SQRT_2 * alpha))?;
            stages.push(concat_all([&source, &lo, &identity(1), &lo])?);
            // The splitter couples channel 0 with the empty channel 2.
            let split = pad(&beamsplitter(*splitter), &[0, 2], 3)?;
            stages.push(concat_all([&split, &identity(1)])?);
            let a = probe_chain(&arms[0], layout.axis, identity(1))?;
            let b = probe_chain(&arms[1], layout.axis, identity(1))?;
            // Trailing pass-through for the second local oscillator.
            stages.push(concat_all([&a, &identity(1), &b, &identity(1)])?);
        }
        ProbeArms::Separate { paths } => {
            let a = probe_chain(&paths[0], layout.axis, drive(alpha))?;
            let b = probe_chain(&paths[1], layout.axis, drive(alpha))?;
            stages.push(concat_all([&a, &lo, &b, &lo])?);
        }
    }
    let [c0, c1] = layout.combiners;
    stages.push(concat_all([&beamsplitter(c0), &beamsplitter(c1)])?);
    let [r0, r1] = layout.relays;
    stages.push(concat_all([&relay_set_reset(r0)?, &relay_set_reset(r1)?])?);
    Ok(stages)
}

/// Four-channel probe network: parity-encoded light interfered with local
/// oscillators and terminated in two set-reset relays.
pub fn build_probe_network(layout: &ProbeLayout, alpha: f64) -> Result<SLHTriple> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
    }
    series_chain(&probe_stages(layout, alpha)?)
}

pub fn build_zigzag_probe(axis: ProbeAxis, alpha: f64) -> Result<SLHTriple> {
    build_probe_network(&ProbeLayout::zigzag(axis), alpha)
}

/// One relay's feedback router.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackRoute {
    pub relay: usize,
    pub phase: RouterPhase,
    /// Splits the `|-⟩`-routed beam.
    pub splitter: BeamsplitterOrientation,
    /// Qubits hit by the three output ports: `[|+⟩ port, split 1, split 2]`.
    pub targets: [Site; 3],
}

/// Feedback driven by a relay pair: every qubit reached by both relays
/// sees a Raman rotation about `axis`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackLayout {
    pub axis: Pauli,
    pub routes: [FeedbackRoute; 2],
}

impl FeedbackLayout {
    /// X rotations on row 3 from R1/R2 (`ProbeAxis::Z`) or Z rotations on
    /// column 1 from R3/R4 (`ProbeAxis::X`).
    pub fn grid(syndrome: ProbeAxis) -> Self {
        let q = Site::memory;
        let route =
            |relay, phase, targets| FeedbackRoute { relay, phase, splitter: BeamsplitterOrientation::Default, targets };
        match syndrome {
            ProbeAxis::Z => FeedbackLayout {
                axis: Pauli::X,
                routes: [
                    route(1, RouterPhase::FlippedPlus, [q(3, 3), q(3, 1), q(3, 2)]),
                    route(2, RouterPhase::Standard, [q(3, 1), q(3, 3), q(3, 2)]),
                ],
            },
            ProbeAxis::X => FeedbackLayout {
                axis: Pauli::Z,
                routes: [
                    route(3, RouterPhase::FlippedPlus, [q(3, 1), q(1, 1), q(2, 1)]),
                    route(4, RouterPhase::Standard, [q(1, 1), q(3, 1), q(2, 1)]),
                ],
            },
        }
    }
}

/// Router and splitter of one relay, fed by a beam of amplitude `beta`:
/// `(I₁ ⊞ B) ◁ ((R ◁ (W^β ⊞ I₁)) ⊞ I₁)`. Its couplings are the operator
/// amplitudes arriving at the three target ports.
pub fn feedback_stage(route: &FeedbackRoute, beta: f64) -> Result<SLHTriple> {
    let fed = series(&relay_router(route.relay, route.phase)?, &concat_all([&drive(beta), &identity(1)])?)?;
    let routed = concat_all([&fed, &identity(1)])?;
    series(&concat_all([&identity(1), &beamsplitter(route.splitter)])?, &routed)
}

/// Effective feedback Hamiltonian of a relay pair.
pub fn build_feedback_network(layout: &FeedbackLayout, omega: f64, beta: f64) -> Result<OperatorSum> {
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::InvalidParameter(format!("omega must be >= 0, got {omega}")));
    }
    let stages = layout.routes.iter().map(|r| feedback_stage(r, beta)).collect::<Result<Vec<SLHTriple>>>()?;
    let amplitude = |k: usize, site: Site| -> OperatorSum {
        layout.routes[k].targets.iter().zip(stages[k].l()).filter(|(t, _)| **t == site).map(|(_, l)| l.clone()).sum()
    };
    let mut targets: Vec<Site> = layout.routes.iter().flat_map(|r| r.targets).collect();
    targets.sort();
    targets.dedup();
    let mut h = OperatorSum::zero();
    for site in targets {
        h = &h + &raman_pair(site, layout.axis, &amplitude(0, site), &amplitude(1, site), omega, beta)?;
    }
    Ok(h)
}

/// Probe blocks of both syndrome types, the feedback Hamiltonian, and the
/// error block, before assembly.
#[derive(Clone, Debug)]
pub struct NetworkParts {
    pub probe_z: SLHTriple,
    pub probe_x: SLHTriple,
    pub feedback: OperatorSum,
    pub errors: Option<SLHTriple>,
}

pub fn build_network_parts(params: &NetworkParams) -> Result<NetworkParts> {
    params.validate()?;
    let probe_z = build_probe_network(&ProbeLayout::for_topology(ProbeAxis::Z, params.topology), params.alpha)?;
    let probe_x = build_probe_network(&ProbeLayout::for_topology(ProbeAxis::X, params.topology), params.alpha)?;
    let fz = build_feedback_network(&FeedbackLayout::grid(ProbeAxis::Z), params.omega, params.beta)?;
    let fx = build_feedback_network(&FeedbackLayout::grid(ProbeAxis::X), params.omega, params.beta)?;
    let errors =
        if params.error_types.is_empty() { None } else { Some(error_channels(params.gamma, &params.error_types)?) };
    Ok(NetworkParts { probe_z, probe_x, feedback: &fz + &fx, errors })
}

/// The closed-loop model on all 13 sites: `L₁…L₈` from the two probe
/// networks, then the error channels; feedback enters through `H` only.
/// The declared gauge is applied last.
pub fn build_full_network(params: &NetworkParams) -> Result<MasterEquation> {
    let parts = build_network_parts(params)?;
    let mut blocks = vec![&parts.probe_z, &parts.probe_x];
    blocks.extend(parts.errors.as_ref());
    let g = concat_all(blocks)?.with_added_hamiltonian(&parts.feedback);
    let me = extract_master_equation(&g).on_space(SiteSpace::full());
    Ok(if params.gauge.is_empty() { me } else { me.conjugated(&gauge_unitary(&params.gauge)) })
}

/// Column-1 model: the R3/R4 row-parity probe restricted to column 1,
/// Z-rotation feedback on that column, and errors on its three qubits.
/// Lives on 5 sites (dimension 32).
pub fn build_reduced_column_network(params: &NetworkParams) -> Result<MasterEquation> {
    params.validate()?;
    let probe = build_probe_network(&ProbeLayout::reduced_column(), params.alpha)?;
    let feedback = build_feedback_network(&FeedbackLayout::grid(ProbeAxis::X), params.omega, params.beta)?;
    let errors: Vec<SLHTriple> = params
        .error_types
        .iter()
        .flat_map(|&p| (1..=3).map(move |r| (p, Site::memory(r, 1))))
        .map(|(p, s)| {
            SLHTriple::new(
                vec![vec![OperatorSum::identity()]],
                vec![p.on(s).scale(params.gamma.sqrt())],
                OperatorSum::zero(),
            )
        })
        .collect::<Result<_>>()?;
    let g = concat_all(std::iter::once(&probe).chain(&errors))?.with_added_hamiltonian(&feedback);
    Ok(extract_master_equation(&g).on_space(reduced_column_space()))
}

pub fn reduced_column_space() -> SiteSpace {
    SiteSpace::new([Site::memory(1, 1), Site::memory(2, 1), Site::memory(3, 1), Site::relay(3), Site::relay(4)])
}

fn pauli_line(sites: impl IntoIterator<Item = Site>, op: LocalOp) -> OperatorSum {
    OperatorSum::product_of(sites.into_iter().map(|s| (s, op)))
}

fn column_parity(a: usize, b: usize) -> OperatorSum {
    pauli_line((1..=3).flat_map(|r| [Site::memory(r, a), Site::memory(r, b)]), LocalOp::Z)
}

fn row_parity(a: usize, b: usize) -> OperatorSum {
    pauli_line((1..=3).flat_map(|c| [Site::memory(a, c), Site::memory(b, c)]), LocalOp::X)
}

/// The two couplings of a set-reset relay fed with `(α/√2)·E`, `(α/√2)·O`,
/// where `O = 1 − P`, `E = 1 + P` for the parity `P`.
pub fn relay_pair_couplings(relay: usize, parity: &OperatorSum, alpha: f64) -> [OperatorSum; 2] {
    let r = Site::relay(relay);
    let odd = &OperatorSum::identity() - parity;
    let even = &OperatorSum::identity() + parity;
    let k = alpha / SQRT_2;
    let l1 = &(&OperatorSum::pi_minus(r) * &odd) + &(&OperatorSum::sigma_pm(r) * &even);
    let l2 = -(&(&OperatorSum::sigma_mp(r) * &odd) + &(&OperatorSum::pi_plus(r) * &even));
    [l1.scale(k), l2.scale(k)]
}

/// The closed-loop model written out directly, term by term.
pub fn reference_master_equation(params: &NetworkParams) -> Result<MasterEquation> {
    params.validate()?;
    let (alpha, omega) = (params.alpha, params.omega);
    let q = Site::memory;
    let pp = |i| OperatorSum::pi_plus(Site::relay(i));
    let pm = |i| OperatorSum::pi_minus(Site::relay(i));
    let term = |c: f64, p: OperatorSum, a: OperatorSum, b: OperatorSum| (&(&p * &a) * &b).scale(c);
    let r2 = SQRT_2;
    let h = [
        term(r2, OperatorSum::x(q(3, 1)), pm(1), pp(2)),
        term(1.0, OperatorSum::x(q(3, 2)), pm(1), pm(2)),
        term(-r2, OperatorSum::x(q(3, 3)), pp(1), pm(2)),
        term(r2, OperatorSum::z(q(1, 1)), pm(3), pp(4)),
        term(1.0, OperatorSum::z(q(2, 1)), pm(3), pm(4)),
        term(-r2, OperatorSum::z(q(3, 1)), pp(3), pm(4)),
    ]
    .into_iter()
    .sum::<OperatorSum>()
    .scale(omega);

    let mut collapse_ops = Vec::with_capacity(35);
    for (relay, parity) in
        [(1, column_parity(1, 2)), (2, column_parity(3, 2)), (3, row_parity(1, 2)), (4, row_parity(3, 2))]
    {
        collapse_ops.extend(relay_pair_couplings(relay, &parity, alpha));
    }
    let root = params.gamma.sqrt();
    for &p in &params.error_types {
        collapse_ops.extend(Site::all_memory().map(|s| p.on(s).scale(root)));
    }
    Ok(MasterEquation { hamiltonian: h, collapse_ops, space: SiteSpace::full() })
}

/// Residuals of a model comparison. Collapse operators are matched as a
/// set, each up to a global phase.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub hamiltonian_residual: f64,
    pub collapse_residual: f64,
    /// `pairing[i] = j`: channel `i` of the first model matches channel `j`
    /// of the second.
    pub pairing: Vec<usize>,
    /// Per-pair phase `φ` with `L_i ≈ e^{iφ} L'_j`.
    pub phases: Vec<f64>,
    pub per_channel: Vec<f64>,
}

impl ComparisonReport {
    pub fn max_residual(&self) -> f64 {
        self.hamiltonian_residual.max(self.collapse_residual)
    }
}

fn phase_aligned_residual(a: &CsrMatrix, b: &CsrMatrix) -> (f64, f64) {
    let inner = b.frobenius_inner(a);
    let phase = if inner.norm() > 0.0 { inner.arg() } else { 0.0 };
    (a.max_abs_diff_scaled(b, C64::from_polar(1.0, phase)), phase)
}

pub fn compare_master_equations(a: &MasterEquation, b: &MasterEquation) -> Result<ComparisonReport> {
    let n = a.collapse_ops.len();
    if b.collapse_ops.len() != n {
        return Err(Error::CollapseCountMismatch(n, b.collapse_ops.len()));
    }
    if a.space != b.space {
        return Err(Error::Validation(format!(
            "models live on different site spaces ({} vs {} sites)",
            a.space.len(),
            b.space.len()
        )));
    }
    let (ha, la) = a.compile()?;
    let (hb, lb) = b.compile()?;
    let hamiltonian_residual = ha.max_abs_diff(&hb);

    let scored: Vec<Vec<(f64, f64)>> =
        la.iter().map(|x| lb.iter().map(|y| phase_aligned_residual(x, y)).collect()).collect();
    let cost: Vec<Vec<f64>> = scored.iter().map(|row| row.iter().map(|c| c.0).collect()).collect();
    let pairing = min_cost_assignment(&cost);
    let per_channel: Vec<f64> = pairing.iter().enumerate().map(|(i, &j)| cost[i][j]).collect();
    let phases = pairing.iter().enumerate().map(|(i, &j)| scored[i][j].1).collect();
    let collapse_residual = per_channel.iter().copied().fold(0.0, f64::max);
    Ok(ComparisonReport { hamiltonian_residual, collapse_residual, pairing, phases, per_channel })
}

/// `‖L(|ψ⟩⟨ψ|)‖_F` for the compiled generator, without forming the density
/// matrix: the image is a sum of outer products `Σ a_k b_k†`.
pub fn generator_norm_on_pure_state(h: &CsrMatrix, collapse: &[CsrMatrix], psi: &[C64]) -> f64 {
    let i = C64::new(0.0, 1.0);
    let mut pairs: Vec<(Vec<C64>, Vec<C64>)> = Vec::new();
    // −i(Hψ)ψ† + iψ(Hψ)†
    let hpsi = h.matvec(psi);
    pairs.push((hpsi.iter().map(|v| -i * v).collect(), psi.to_vec()));
    pairs.push((psi.iter().map(|v| i * v).collect(), hpsi));
    for l in collapse {
        let lpsi = l.matvec(psi);
        let kpsi = l.adjoint().matvec(&lpsi);
        pairs.push((lpsi.clone(), lpsi));
        pairs.push((kpsi.iter().map(|v| -0.5 * v).collect(), psi.to_vec()));
        pairs.push((psi.iter().map(|v| -0.5 * v).collect(), kpsi));
    }
    let dot = |x: &[C64], y: &[C64]| x.iter().zip(y).map(|(a, b)| a.conj() * b).sum::<C64>();
    let mut total = C64::new(0.0, 0.0);
    for (a1, b1) in &pairs {
        for (a2, b2) in &pairs {
            total += dot(a1, a2) * dot(b2, b1);
        }
    }
    total.re.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slh::check_unitary;

    #[test]
    fn probe_network_matches_relay_couplings() {
        let alpha = 1.3;
        let g = build_probe_network(&ProbeLayout::grid(ProbeAxis::Z), alpha).unwrap();
        assert_eq!(g.n_channels(), 4);
        assert!(g.h().is_zero());
        let expect1 = relay_pair_couplings(1, &column_parity(1, 2), alpha);
        let expect2 = relay_pair_couplings(2, &column_parity(3, 2), alpha);
        for (got, want) in g.l().iter().zip(expect1.iter().chain(&expect2)) {
            assert!(got.approx_eq(want, 1e-12), "{got}\n!=\n{want}");
        }
    }

    #[test]
    fn zero_alpha_probe_is_silent() {
        let g = build_probe_network(&ProbeLayout::grid(ProbeAxis::X), 0.0).unwrap();
        assert!(g.l().iter().all(OperatorSum::is_zero));
        assert!(g.h().is_zero());
    }

    #[test]
    fn feedback_pair_terms() {
        let omega = 3.0;
        let h = build_feedback_network(&FeedbackLayout::grid(ProbeAxis::Z), omega, 0.7).unwrap();
        let pp = |i| OperatorSum::pi_plus(Site::relay(i));
        let pm = |i| OperatorSum::pi_minus(Site::relay(i));
        let want = [
            (&(&OperatorSum::x(Site::memory(3, 1)) * &pm(1)) * &pp(2)).scale(SQRT_2 * omega),
            (&(&OperatorSum::x(Site::memory(3, 2)) * &pm(1)) * &pm(2)).scale(omega),
            (&(&OperatorSum::x(Site::memory(3, 3)) * &pp(1)) * &pm(2)).scale(-SQRT_2 * omega),
        ]
        .into_iter()
        .sum::<OperatorSum>();
        assert!(h.approx_eq(&want, 1e-12), "{h}");
        assert!(build_feedback_network(&FeedbackLayout::grid(ProbeAxis::Z), 0.0, 0.7).unwrap().is_zero());
    }

    #[test]
    fn feedback_stages_are_unitary() {
        for syndrome in [ProbeAxis::Z, ProbeAxis::X] {
            for route in &FeedbackLayout::grid(syndrome).routes {
                let g = feedback_stage(route, 1.0).unwrap();
                assert!(check_unitary(g.s()).unwrap().max() < 1e-12);
            }
        }
    }

    #[test]
    fn gauge_entry_parses() {
        let g: GaugeEntry = "Z@Q(3,3)".parse().unwrap();
        assert_eq!(g, GaugeEntry { site: Site::memory(3, 3), pauli: Pauli::Z });
        assert_eq!(g.to_string().parse::<GaugeEntry>().unwrap(), g);
        assert!("Z".parse::<GaugeEntry>().is_err());
    }

    #[test]
    fn reduced_model_dimension() {
        let me = build_reduced_column_network(&NetworkParams::default()).unwrap();
        assert_eq!(me.space.dim(), 32);
        assert_eq!(me.collapse_ops.len(), 4 + 9);
    }
}
