//! Run configuration, read from nested TOML.

use std::path::{Path, PathBuf};

use qecnet_core::network::{GaugeEntry, NetworkParams, Topology};
use qecnet_core::Pauli;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Overrides `output.dir` when set.
pub const OUTPUT_DIR_ENV: &str = "QECNET_OUTPUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlphaRule {
    #[serde(rename = "omega/8")]
    OmegaOver8,
}

impl AlphaRule {
    pub fn apply(self, omega: f64) -> f64 {
        match self {
            AlphaRule::OmegaOver8 => omega / 8.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub gamma: f64,
    pub alpha: f64,
    pub omega: f64,
    pub beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_rule: Option<AlphaRule>,
    pub error_types: Vec<Pauli>,
    pub topology: Topology,
    /// Entries such as `"Z@Q(3,3)"`.
    pub gauge: Vec<String>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let p = NetworkParams::default();
        ModelConfig {
            gamma: p.gamma,
            alpha: p.alpha,
            omega: p.omega,
            beta: p.beta,
            alpha_rule: None,
            error_types: p.error_types,
            topology: p.topology,
            gauge: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    pub t_max: f64,
    pub n_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub n_traj: usize,
    pub master_seed: u64,
    pub workers: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            t_max: 5.0,
            n_points: 51,
            dt: None,
            n_traj: 300,
            master_seed: 2024,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig3Config {
    pub omegas: Vec<f64>,
}

impl Default for Fig3Config {
    fn default() -> Self {
        Fig3Config { omegas: vec![0.0, 50.0, 100.0, 200.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("results") }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub simulation: SimulationConfig,
    pub fig3: Fig3Config,
    pub output: OutputConfig,
}

fn field(name: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{name}: {msg}"))
}

fn rate(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(field(name, format!("must be finite and >= 0, got {v}")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        rate("model.gamma", m.gamma)?;
        rate("model.alpha", m.alpha)?;
        rate("model.omega", m.omega)?;
        if !(m.beta.is_finite() && m.beta > 0.0) {
            return Err(field("model.beta", format!("must be finite and > 0, got {}", m.beta)));
        }
        if m.error_types.is_empty() && m.gamma != 0.0 {
            return Err(field("model.error_types", "must be nonempty unless gamma = 0"));
        }
        let mut seen = m.error_types.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != m.error_types.len() {
            return Err(field("model.error_types", "contains duplicates"));
        }
        self.gauge_entries()?;

        let s = &self.simulation;
        if !(s.t_max.is_finite() && s.t_max > 0.0) {
            return Err(field("simulation.t_max", format!("must be > 0, got {}", s.t_max)));
        }
        if s.n_points < 2 {
            return Err(field("simulation.n_points", format!("must be >= 2, got {}", s.n_points)));
        }
        if let Some(dt) = s.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(field("simulation.dt", format!("must be > 0, got {dt}")));
            }
        }
        if s.n_traj == 0 {
            return Err(field("simulation.n_traj", "must be >= 1"));
        }
        if s.workers == 0 {
            return Err(field("simulation.workers", "must be >= 1"));
        }
        for (i, &w) in self.fig3.omegas.iter().enumerate() {
            rate(&format!("fig3.omegas[{i}]"), w)?;
        }
        Ok(())
    }

    pub fn gauge_entries(&self) -> Result<Vec<GaugeEntry>> {
        self.model
            .gauge
            .iter()
            .enumerate()
            .map(|(i, g)| g.parse().map_err(|e| field(&format!("model.gauge[{i}]"), e)))
            .collect()
    }

    /// Effective alpha after the optional binding to omega.
    pub fn alpha(&self) -> f64 {
        self.model.alpha_rule.map_or(self.model.alpha, |r| r.apply(self.model.omega))
    }

    pub fn network_params(&self) -> Result<NetworkParams> {
        Ok(NetworkParams {
            alpha: self.alpha(),
            beta: self.model.beta,
            omega: self.model.omega,
            gamma: self.model.gamma,
            error_types: self.model.error_types.clone(),
            topology: self.model.topology,
            gauge: self.gauge_entries()?,
        })
    }

    /// `--output` beats the environment, which beats the file.
    pub fn resolve_output_dir(&mut self, cli: Option<PathBuf>) {
        if let Some(dir) = cli {
            self.output.dir = dir;
        } else if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            self.output.dir = PathBuf::from(dir);
        }
    }
}
