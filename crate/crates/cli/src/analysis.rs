//! Qualitative curve comparisons with statistical tolerance.

use serde::Serialize;

use crate::experiment::{Experiment, ExperimentResult};

/// Half-width multiplier of a two-sided 95% normal interval.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Is `hi ≥ lo` either outright or within `sigmas` combined standard errors?
pub fn ordered_within(hi: (f64, f64), lo: (f64, f64), sigmas: f64) -> bool {
    let sd = hi.1.hypot(lo.1);
    hi.0 >= lo.0 || lo.0 - hi.0 <= sigmas * sd
}

fn point(r: &ExperimentResult, label: &str, k: usize) -> Option<(f64, f64)> {
    r.curve(label).map(|c| {
        let (m, s) = c.fidelity();
        (m[k], s[k])
    })
}

fn chain(r: &ExperimentResult, labels: &[&str], t: f64, sigmas: f64) -> Verdict {
    let k = r.index_of(t);
    let mut passed = true;
    let mut parts = Vec::new();
    for pair in labels.windows(2) {
        let (Some(lo), Some(hi)) = (point(r, pair[0], k), point(r, pair[1], k)) else {
            return Verdict { name: String::new(), passed: false, detail: format!("missing curve in {pair:?}") };
        };
        let ok = ordered_within(hi, lo, sigmas);
        passed &= ok;
        parts.push(format!(
            "{}={:.4}±{:.4} {} {}={:.4}±{:.4}",
            pair[0],
            lo.0,
            lo.1,
            if ok { "<=" } else { "!<=" },
            pair[1],
            hi.0,
            hi.1
        ));
    }
    Verdict { name: String::new(), passed, detail: format!("t={}: {}", r.times[k], parts.join(", ")) }
}

/// Fidelity nondecreasing in `Ω` at `t = 1` and at the final time, and the
/// strongest-feedback curve eventually above the bare qubit.
pub fn fig3_verdicts(r: &ExperimentResult) -> Vec<Verdict> {
    let mut omegas: Vec<(f64, &str)> = r.curves.iter().map(|c| (c.spec.params.omega, c.spec.label.as_str())).collect();
    omegas.sort_by(|a, b| a.0.total_cmp(&b.0));
    let labels: Vec<&str> = omegas.iter().map(|o| o.1).collect();
    let mut out = Vec::new();
    for t in [1.0, *r.times.last().unwrap()] {
        let mut v = chain(r, &labels, t, 3.0);
        v.name = format!("monotone_in_omega_t{t}");
        out.push(v);
    }
    if let Some(&(omega, label)) = omegas.last() {
        let (m, s) = r.curve(label).unwrap().fidelity();
        let first = (1..r.times.len()).find(|&k| m[k] - Z95 * s[k] > r.bare_qubit[k]);
        out.push(Verdict {
            name: "beats_bare_qubit".into(),
            passed: first.is_some(),
            detail: match first {
                Some(k) => format!(
                    "Omega={omega}: lower 95% bound {:.4} > bare {:.4} first at t={}",
                    m[k] - Z95 * s[k],
                    r.bare_qubit[k],
                    r.times[k]
                ),
                None => format!("Omega={omega}: lower 95% bound never above the bare qubit"),
            },
        });
    }
    out
}

/// `X-only ≥ Y-only ≥ all errors` at `t = 1`, and the no-feedback curve
/// lowest from `t = 0.5` on.
pub fn fig4_verdicts(r: &ExperimentResult) -> Vec<Verdict> {
    let mut ordering = chain(r, &["all_errors", "y_only", "x_only"], 1.0, 3.0);
    ordering.name = "error_type_ordering_t1".into();
    let mut worst: Option<(f64, String)> = None;
    let mut passed = r.curve("no_feedback").is_some();
    for (k, &t) in r.times.iter().enumerate().filter(|(_, &t)| t >= 0.5 - 1e-12) {
        let Some(nf) = point(r, "no_feedback", k) else { break };
        for c in r.curves.iter().filter(|c| !c.spec.no_feedback) {
            let other = point(r, &c.spec.label, k).unwrap();
            let margin = other.0 - nf.0;
            if !ordered_within(other, nf, 3.0) {
                passed = false;
            }
            if worst.as_ref().is_none_or(|w| margin < w.0) {
                worst = Some((margin, format!("{} at t={t}", c.spec.label)));
            }
        }
    }
    let detail = match worst {
        Some((m, at)) => format!("smallest margin above no_feedback {m:.4} ({at})"),
        None => "no_feedback curve missing".into(),
    };
    vec![ordering, Verdict { name: "no_feedback_lowest".into(), passed, detail }]
}

pub fn verdicts(r: &ExperimentResult) -> Vec<Verdict> {
    match r.experiment {
        Experiment::Fig3 => fig3_verdicts(r),
        Experiment::Fig4 => fig4_verdicts(r),
        Experiment::Custom => Vec::new(),
    }
}
