//! Result persistence: per-curve CSV, metadata, summary and plot data.

use std::fs;
use std::path::{Path, PathBuf};

use qecnet_core::network::NetworkParams;
use serde::{Deserialize, Serialize};

use crate::analysis::{verdicts, Verdict, Z95};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::experiment::{Experiment, ExperimentResult, FIDELITY};

pub const BARE_QUBIT: &str = "bare_qubit";

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    t: f64,
    observable: String,
    estimate: f64,
    stderr: f64,
    n_traj: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct PlotRow {
    curve: String,
    t: f64,
    mean: f64,
    stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveMetadata {
    pub label: String,
    pub file: String,
    pub no_feedback: bool,
    pub params: NetworkParams,
    pub master_seed: u64,
    pub n_traj: usize,
    pub dt: f64,
    pub oracle_residual: f64,
    pub total_jumps: u64,
    pub total_steps: u64,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub experiment: Experiment,
    pub code_version: String,
    pub config: RunConfig,
    pub bare_qubit_file: String,
    pub curves: Vec<CurveMetadata>,
    pub wall_time_s: f64,
}

pub fn experiment_dir(root: &Path, experiment: Experiment) -> PathBuf {
    root.join(experiment.name())
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<root>/<experiment>/` and returns its path.
pub fn write_experiment(result: &ExperimentResult, root: &Path) -> Result<PathBuf> {
    let dir = experiment_dir(root, result.experiment);
    fs::create_dir_all(&dir)?;
    let mut curves = Vec::new();
    for c in &result.curves {
        let file = format!("{}.csv", c.spec.label);
        let est = &c.estimate;
        let rows = est.observables.iter().flat_map(|o| {
            est.times.iter().enumerate().map(move |(k, &t)| Row {
                t,
                observable: o.label.clone(),
                estimate: o.mean[k],
                stderr: o.stderr[k],
                n_traj: est.n_traj,
            })
        });
        write_rows(&dir.join(&file), rows)?;
        curves.push(CurveMetadata {
            label: c.spec.label.clone(),
            file,
            no_feedback: c.spec.no_feedback,
            params: c.spec.params.clone(),
            master_seed: est.master_seed,
            n_traj: est.n_traj,
            dt: c.dt,
            oracle_residual: c.oracle_residual,
            total_jumps: est.total_jumps,
            total_steps: est.total_steps,
            wall_time_s: c.wall_time_s,
        });
    }
    let bare_file = format!("{BARE_QUBIT}.csv");
    let bare = result.times.iter().zip(&result.bare_qubit).map(|(&t, &f)| Row {
        t,
        observable: FIDELITY.into(),
        estimate: f,
        stderr: 0.0,
        n_traj: 0,
    });
    write_rows(&dir.join(&bare_file), bare)?;

    let meta = RunMetadata {
        experiment: result.experiment,
        code_version: env!("CARGO_PKG_VERSION").into(),
        config: result.config.clone(),
        bare_qubit_file: bare_file,
        curves,
        wall_time_s: result.wall_time_s,
    };
    let json = serde_json::to_string_pretty(&meta).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(dir.join("metadata.json"), json + "\n")?;
    fs::write(dir.join("summary.txt"), summary(result, &verdicts(result)))?;
    Ok(dir)
}

/// Fidelity table with 95% intervals at a few times, then the verdicts.
pub fn summary(result: &ExperimentResult, verdicts: &[Verdict]) -> String {
    let t_end = *result.times.last().unwrap();
    let mut marks: Vec<f64> = [0.5, 1.0, 0.5 * t_end, t_end].into_iter().filter(|&t| t <= t_end).collect();
    marks.sort_by(f64::total_cmp);
    marks.dedup();
    let mut out = format!("{} fidelity, mean ± 95% interval\n\n{:<14}", result.experiment.name(), "curve");
    let idx: Vec<usize> = marks.iter().map(|&t| result.index_of(t)).collect();
    for &k in &idx {
        out += &format!(" {:>19}", format!("t={}", result.times[k]));
    }
    out.push('\n');
    for c in &result.curves {
        let (m, s) = c.fidelity();
        let flag = if c.spec.no_feedback { "*" } else { "" };
        out += &format!("{:<14}", format!("{}{flag}", c.spec.label));
        for &k in &idx {
            out += &format!(" {:>19}", format!("{:.4} ± {:.4}", m[k], Z95 * s[k]));
        }
        out.push('\n');
    }
    out += &format!("{BARE_QUBIT:<14}");
    for &k in &idx {
        out += &format!(" {:>19}", format!("{:.4}", result.bare_qubit[k]));
    }
    out.push('\n');
    if result.curves.iter().any(|c| c.spec.no_feedback) {
        out += "(* no feedback)\n";
    }
    for &k in &idx {
        let mut order: Vec<(&str, f64)> =
            result.curves.iter().map(|c| (c.spec.label.as_str(), c.fidelity().0[k])).collect();
        order.push((BARE_QUBIT, result.bare_qubit[k]));
        order.sort_by(|a, b| b.1.total_cmp(&a.1));
        let names: Vec<&str> = order.iter().map(|o| o.0).collect();
        out += &format!("\nordering at t={}: {}", result.times[k], names.join(" > "));
    }
    out.push('\n');
    if !verdicts.is_empty() {
        out.push('\n');
        for v in verdicts {
            out += &format!("{} {}: {}\n", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
        }
    }
    out
}

pub fn read_metadata(dir: &Path) -> Result<RunMetadata> {
    let path = dir.join("metadata.json");
    let text = fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_fidelity(path: &Path, curve: &str) -> Result<Vec<PlotRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for rec in r.deserialize::<Row>() {
        let row = rec.map_err(csv_error)?;
        if row.observable == FIDELITY {
            rows.push(PlotRow { curve: curve.into(), t: row.t, mean: row.estimate, stderr: row.stderr });
        }
    }
    Ok(rows)
}

const PLOT_STUB: &str = r#"import sys

import matplotlib.pyplot as plt
import pandas as pd

path = sys.argv[1] if len(sys.argv) > 1 else "{csv}"
data = pd.read_csv(path)
fig, ax = plt.subplots()
for label, g in data.groupby("curve", sort=False):
    style = "k--" if label == "bare_qubit" else "-"
    ax.plot(g["t"], g["mean"], style, label=label)
    ax.fill_between(g["t"], g["mean"] - 2 * g["stderr"], g["mean"] + 2 * g["stderr"], alpha=0.2)
ax.set_xlabel("t")
ax.set_ylabel("fidelity")
ax.legend()
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
"#;

/// Tidy `curve,t,mean,stderr` fidelity table for one result directory plus
/// a plotting script. Returns the two paths.
pub fn emit_plot_data(dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let meta = read_metadata(dir)?;
    let name = meta.experiment.name();
    let mut rows = Vec::new();
    for c in &meta.curves {
        rows.extend(read_fidelity(&dir.join(&c.file), &c.label)?);
    }
    rows.extend(read_fidelity(&dir.join(&meta.bare_qubit_file), BARE_QUBIT)?);
    let csv_path = dir.join(format!("{name}_plot.csv"));
    write_rows(&csv_path, rows)?;
    let script = dir.join(format!("plot_{name}.py"));
    fs::write(&script, PLOT_STUB.replace("{csv}", &format!("{name}_plot.csv")))?;
    Ok((csv_path, script))
}
