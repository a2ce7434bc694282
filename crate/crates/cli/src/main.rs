use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qecnet_cli::analysis::verdicts;
use qecnet_cli::audit::compose_and_audit;
use qecnet_cli::output::{emit_plot_data, experiment_dir, summary, write_experiment};
use qecnet_cli::{run_experiment, CliError, Experiment, Result, RunConfig};
use qecnet_core::code::{
    decoder_audit, gauge_and_logical_operators, stabilizer_generators, validate_logical_operators,
};
use qecnet_core::network::{build_full_network, compare_master_equations, reference_master_equation};

/// Compose, audit and simulate the 3×3 Bacon-Shor coherent-feedback network.
#[derive(Parser)]
#[command(name = "qecnet", version)]
struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output root, overriding the config file and QECNET_OUTPUT_DIR.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    n_traj: Option<usize>,
    #[arg(long, global = true)]
    master_seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the network and write its master equation as JSON.
    Compose,
    /// Oracle comparison, unitarity, decoder, steady-state and fidelity audits.
    Audit,
    /// Run the configured model as a single curve.
    Simulate,
    /// Fidelity versus time for a sweep of feedback strengths.
    Fig3,
    /// Fidelity versus time per error type, plus a no-feedback reference.
    Fig4,
    /// Stabilizers, logical operators and the single-error decoder table.
    CodeCheck,
    /// Tidy plot table and plotting script for a finished run.
    EmitPlots {
        /// Experiment name under the output root, or a result directory.
        target: String,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(w) = cli.workers {
        cfg.simulation.workers = w;
    }
    if let Some(n) = cli.n_traj {
        cfg.simulation.n_traj = n;
    }
    if let Some(s) = cli.master_seed {
        cfg.simulation.master_seed = s;
    }
    cfg.resolve_output_dir(cli.output.clone());
    cfg.validate()?;
    Ok(cfg)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn compose(cfg: &RunConfig) -> Result<()> {
    let params = cfg.network_params()?;
    let me = build_full_network(&params)?;
    let report = compare_master_equations(&me, &reference_master_equation(&params)?)?;
    println!("sites: {}, dimension {}", me.space.len(), me.space.dim());
    println!("hamiltonian terms: {}", me.hamiltonian.len());
    println!("collapse operators: {}", me.collapse_ops.len());
    println!("oracle residual: {:.3e}", report.max_residual());
    let path = cfg.output.dir.join("compose").join("master_equation.json");
    write_json(&path, &me)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn audit(cfg: &RunConfig) -> Result<()> {
    let report = compose_and_audit(&cfg.network_params()?)?;
    print!("{}", report.render());
    let path = cfg.output.dir.join("audit.json");
    write_json(&path, &report)?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Audit(format!("failed checks: {}", report.failures().join(", "))))
    }
}

fn experiment(cfg: &RunConfig, which: Experiment) -> Result<()> {
    let result = run_experiment(which, cfg)?;
    let dir = write_experiment(&result, &cfg.output.dir)?;
    print!("{}", summary(&result, &verdicts(&result)));
    println!("wrote {} ({:.1} s)", dir.display(), result.wall_time_s);
    Ok(())
}

fn code_check() -> Result<()> {
    let ops = gauge_and_logical_operators()?;
    validate_logical_operators(&ops).map_err(|e| CliError::Audit(e.to_string()))?;
    for (i, s) in stabilizer_generators().iter().enumerate() {
        println!("S{} = {s}", i + 1);
    }
    println!("X_L = {}\nZ_L = {}\nY_L = {}", ops.x_l, ops.z_l, ops.y_l());
    for (i, (x, z)) in ops.gauge.iter().enumerate() {
        println!("gauge {}: X = {x}, Z = {z}", i + 1);
    }
    println!("\n{:<10} {:<16} {:<16} restores", "error", "syndrome", "recovery");
    let cases = decoder_audit()?;
    for c in &cases {
        println!(
            "{:<10} {:<16} {:<16} {}",
            c.error.to_string(),
            format!("{:?}", c.syndrome.0),
            c.recovery.to_string(),
            c.restores_code
        );
    }
    let bad = cases.iter().filter(|c| !c.restores_code).count();
    if bad > 0 {
        return Err(CliError::Audit(format!("{bad} single-qubit errors not corrected")));
    }
    println!("\nall {} cases corrected", cases.len());
    Ok(())
}

fn emit(cfg: &RunConfig, target: &str) -> Result<()> {
    let dir = match target.parse::<Experiment>() {
        Ok(e) => experiment_dir(&cfg.output.dir, e),
        Err(_) => PathBuf::from(target),
    };
    let (csv, script) = emit_plot_data(&dir)?;
    println!("wrote {}\nwrote {}", csv.display(), script.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Compose => compose(&cfg),
        Command::Audit => audit(&cfg),
        Command::Simulate => experiment(&cfg, Experiment::Custom),
        Command::Fig3 => experiment(&cfg, Experiment::Fig3),
        Command::Fig4 => experiment(&cfg, Experiment::Fig4),
        Command::CodeCheck => code_check(),
        Command::EmitPlots { target } => emit(&cfg, target),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
