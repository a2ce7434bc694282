//! Structural audits of a composed model: oracle comparison, unitarity,
//! decoder, steady state and fidelity operator.

use qecnet_core::catalog::{
    beamsplitter, drive, error_channels, identity, probe_qubit, relay_router, relay_set_reset, BeamsplitterOrientation,
    ProbeAxis, RouterPhase,
};
use qecnet_core::code::{decoder_audit, gauge_and_logical_operators, CodewordSpec, PauliString, Syndrome};
use qecnet_core::network::{
    build_full_network, build_probe_network, compare_master_equations, feedback_stage, generator_norm_on_pure_state,
    probe_stages, reference_master_equation, FeedbackLayout, NetworkParams, ProbeLayout, Topology,
};
use qecnet_core::slh::check_unitary;
use qecnet_core::{Pauli, SLHTriple, Site, SiteSpace};
use serde::Serialize;

use crate::error::Result;

pub const ORACLE_TOLERANCE: f64 = 1e-10;
pub const UNITARITY_TOLERANCE: f64 = 1e-12;
pub const STEADY_STATE_TOLERANCE: f64 = 1e-10;
pub const FIDELITY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct AuditCheck {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl AuditCheck {
    fn below(name: &str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        AuditCheck { name: name.into(), passed: value < threshold, value, threshold, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub params: NetworkParams,
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&AuditCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }

    pub fn render(&self) -> String {
        self.checks
            .iter()
            .map(|c| {
                let mark = if c.passed { "ok  " } else { "FAIL" };
                format!("{mark} {:<24} {:>10.3e}  limit {:<8.1e} {}\n", c.name, c.value, c.threshold, c.detail)
            })
            .collect()
    }
}

/// Every catalog component plus every composed stage, with the worst of
/// the two unitarity residuals of each scattering matrix.
pub fn unitarity_suite(params: &NetworkParams) -> Result<Vec<(String, f64)>> {
    let mut items: Vec<(String, SLHTriple)> = Vec::new();
    for n in 1..=4 {
        items.push((format!("identity({n})"), identity(n)));
    }
    items.push(("drive".into(), drive(params.alpha)));
    for o in [
        BeamsplitterOrientation::Default,
        BeamsplitterOrientation::Negated,
        BeamsplitterOrientation::SwapInputs,
        BeamsplitterOrientation::SwapOutputs,
    ] {
        items.push((format!("beamsplitter({o:?})"), beamsplitter(o)));
    }
    for site in Site::all_memory() {
        for axis in [ProbeAxis::Z, ProbeAxis::X] {
            items.push((format!("probe_qubit({site},{axis:?})"), probe_qubit(site, axis)?));
        }
    }
    for r in 1..=4 {
        items.push((format!("relay_set_reset(R{r})"), relay_set_reset(r)?));
        for phase in [RouterPhase::Standard, RouterPhase::FlippedPlus] {
            items.push((format!("relay_router(R{r},{phase:?})"), relay_router(r, phase)?));
        }
    }
    if !params.error_types.is_empty() {
        items.push(("error_channels".into(), error_channels(params.gamma, &params.error_types)?));
    }
    for axis in [ProbeAxis::Z, ProbeAxis::X] {
        let layout = ProbeLayout::for_topology(axis, params.topology);
        for (k, stage) in probe_stages(&layout, params.alpha)?.into_iter().enumerate() {
            items.push((format!("probe_{axis:?}_stage{k}"), stage));
        }
        items.push((format!("probe_{axis:?}_network"), build_probe_network(&layout, params.alpha)?));
        for route in &FeedbackLayout::grid(axis).routes {
            items.push((format!("feedback_stage(R{})", route.relay), feedback_stage(route, params.beta)?));
        }
    }
    items.into_iter().map(|(name, g)| Ok((name, check_unitary(g.s())?.max()))).collect()
}

fn unitarity_check(params: &NetworkParams) -> Result<AuditCheck> {
    let suite = unitarity_suite(params)?;
    let (worst, value) =
        suite.iter().fold(("none", 0.0f64), |acc, (n, v)| if *v > acc.1 { (n.as_str(), *v) } else { acc });
    Ok(AuditCheck::below(
        "unitarity",
        value,
        UNITARITY_TOLERANCE,
        format!("{} scattering matrices, worst {worst}", suite.len()),
    ))
}

fn decoder_check() -> Result<AuditCheck> {
    let cases = decoder_audit()?;
    let mut failures: Vec<String> =
        cases.iter().filter(|c| !c.restores_code).map(|c| format!("{} not corrected", c.error)).collect();
    let y22 = PauliString::single(Site::memory(2, 2), Pauli::Y);
    let want = PauliString::from_ops(&[(Site::memory(3, 2), Pauli::X), (Site::memory(2, 1), Pauli::Z)]);
    match cases.iter().find(|c| c.error == y22) {
        Some(c) if c.syndrome == Syndrome([-1; 4]) && c.recovery == want => {}
        Some(c) => failures.push(format!("Y22 gives syndrome {:?} and recovery {}", c.syndrome.0, c.recovery)),
        None => failures.push("Y22 case missing".into()),
    }
    let detail = if failures.is_empty() { format!("{} cases", cases.len()) } else { failures.join("; ") };
    Ok(AuditCheck {
        name: "decoder_audit".into(),
        passed: failures.is_empty() && cases.len() == 28,
        value: failures.len() as f64,
        threshold: 1.0,
        detail,
    })
}

/// `‖𝓛ρ₀‖` of the error-free model on the initial codeword.
pub fn steady_state_residual(params: &NetworkParams) -> Result<f64> {
    let me = build_full_network(&NetworkParams { gamma: 0.0, ..params.clone() })?;
    let (h, ls) = me.compile()?;
    let psi = CodewordSpec::bacon_shor()?.initial_state()?;
    Ok(generator_norm_on_pure_state(&h, &ls, &psi))
}

/// Worst deviation among `Tr(Fρ₀) = 1`, `F² = F`, `Tr F = 256` and the
/// agreement of the projector and depolarizing constructions.
pub fn fidelity_operator_residual() -> Result<(f64, String)> {
    let spec = CodewordSpec::bacon_shor()?;
    let space = SiteSpace::full();
    let f = spec.fidelity_operator().to_matrix(&space)?;
    let rho0 = spec.initial_projector().to_matrix(&space)?;
    let ops = gauge_and_logical_operators()?;
    let twirled = spec.fidelity_operator_by_depolarizing(Some(&ops)).to_matrix(&space)?;
    let parts = [
        ("Tr(F rho0)", (f.matmul(&rho0).trace().re - 1.0).abs()),
        ("F^2-F", f.matmul(&f).max_abs_diff(&f)),
        ("Tr F", (f.trace().re - 256.0).abs()),
        ("twirl", twirled.max_abs_diff(&f)),
    ];
    let worst = parts.iter().fold(0.0f64, |m, p| m.max(p.1));
    let detail = parts.iter().map(|(n, v)| format!("{n} {v:.1e}")).collect::<Vec<_>>().join(", ");
    Ok((worst, detail))
}

pub fn compose_and_audit(params: &NetworkParams) -> Result<AuditReport> {
    params.validate()?;
    let built = build_full_network(params)?;
    let reference = reference_master_equation(params)?;
    let mut checks = Vec::new();

    let expected = 8 + 9 * params.error_types.len();
    checks.push(AuditCheck {
        name: "collapse_count".into(),
        passed: built.collapse_ops.len() == expected,
        value: built.collapse_ops.len() as f64,
        threshold: expected as f64,
        detail: format!("{} channels, expected {expected}", built.collapse_ops.len()),
    });
    match compare_master_equations(&built, &reference) {
        Ok(r) => checks.push(AuditCheck::below(
            "oracle_master_equation",
            r.max_residual(),
            ORACLE_TOLERANCE,
            format!("H {:.1e}, collapse {:.1e}", r.hamiltonian_residual, r.collapse_residual),
        )),
        Err(e) => checks.push(AuditCheck {
            name: "oracle_master_equation".into(),
            passed: false,
            value: f64::INFINITY,
            threshold: ORACLE_TOLERANCE,
            detail: e.to_string(),
        }),
    }
    if params.topology == Topology::Zigzag {
        let grid = build_full_network(&NetworkParams { topology: Topology::Grid, ..params.clone() })?;
        let r = compare_master_equations(&built, &grid)?;
        checks.push(AuditCheck::below(
            "zigzag_equivalence",
            r.max_residual(),
            ORACLE_TOLERANCE,
            "zigzag vs grid probe threading",
        ));
    }
    checks.push(unitarity_check(params)?);
    checks.push(decoder_check()?);
    checks.push(AuditCheck::below(
        "steady_state",
        steady_state_residual(params)?,
        STEADY_STATE_TOLERANCE,
        "error-free generator on the initial codeword",
    ));
    let (value, detail) = fidelity_operator_residual()?;
    checks.push(AuditCheck::below("fidelity_operator", value, FIDELITY_TOLERANCE, detail));
    Ok(AuditReport { params: params.clone(), checks })
}
