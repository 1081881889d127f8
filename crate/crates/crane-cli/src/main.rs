//! `crane`: controller design and simulation for the double-pendulum
//! overhead crane with a time-varying hoist rope.
//!
//! Subcommands: `linearize`, `check`, `place`, `certify`, `run`, `compare`,
//! `energy-audit`, `plot`. Exit codes: 0 ok, 2 configuration error,
//! 3 uncontrollable, 4 placement failed, 5 singular configuration,
//! 6 no valid region-of-attraction radius.

mod config;
mod pipeline;
mod report;

use clap::{Args, Parser, Subcommand};
use config::{GainSource, ScenarioConfig, VariantConfig};
use crane_core::CraneError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "crane",
    version,
    about = "Anti-sway controller design and simulation for a double-pendulum overhead crane with hoisting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Scenario selection shared by most subcommands: a config file or a
/// bundled preset, plus individual overrides.
#[derive(Args, Clone)]
struct ScenarioArgs {
    /// JSON scenario configuration.
    #[arg(long, conflicts_with = "figure")]
    config: Option<PathBuf>,
    /// Bundled scenario preset number (3, 5, 6 or 8).
    #[arg(long)]
    figure: Option<u32>,
    /// Actuation variant override.
    #[arg(long, value_enum)]
    variant: Option<VariantConfig>,
    /// Gain source override (place | reference).
    #[arg(long, value_enum)]
    gain: Option<GainSource>,
    /// Pole list override, e.g. "-0.5,-1,-1.5,-2,-2.5,-3,-3.5,-4" or "-1+2i,-1-2i,...".
    #[arg(long, allow_hyphen_values = true)]
    poles: Option<String>,
    /// Initial state override: 8 comma-separated numbers.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Simulation end time override.
    #[arg(long)]
    t_end: Option<f64>,
    /// Output directory for generated files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<ScenarioConfig, String> {
        let mut cfg = if let Some(path) = &self.config {
            ScenarioConfig::load(path)?
        } else if let Some(n) = self.figure {
            ScenarioConfig::figure_preset(n).map_err(|e| e.to_string())?
        } else {
            ScenarioConfig::default()
        };
        if let Some(v) = self.variant {
            cfg.variant = v;
        }
        if let Some(g) = self.gain {
            cfg.gain = g;
        }
        if let Some(p) = &self.poles {
            cfg.poles = config::parse_pole_list(p)?;
        }
        if let Some(x) = &self.x0 {
            cfg.x0 = config::parse_state_list(x)?;
        }
        if let Some(t) = self.t_end {
            cfg.integrator.t_end = t;
        }
        cfg.rebase_outputs(&self.out);
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the origin linearization (A, B) and its finite-difference cross-check.
    Linearize(ScenarioArgs),
    /// Controllability test: rank of the Kalman matrix.
    Check(ScenarioArgs),
    /// Synthesize the state-feedback gain and print the closed-loop spectrum.
    Place(ScenarioArgs),
    /// Compute the Lyapunov region-of-attraction certificate.
    Certify(ScenarioArgs),
    /// Full pipeline: linearize, check, place, certify, simulate; writes CSV and summary.
    Run(ScenarioArgs),
    /// Run two scenarios and report settling times, reduction and divergence.
    Compare(CompareArgs),
    /// Work-energy audit of a closed-loop or unforced open-loop run.
    EnergyAudit(EnergyAuditArgs),
    /// Emit a gnuplot script for a trajectory CSV.
    Plot(PlotArgs),
}

#[derive(Args)]
struct CompareArgs {
    /// Config file of scenario A.
    #[arg(long, conflicts_with = "figure_a")]
    config_a: Option<PathBuf>,
    /// Preset number of scenario A.
    #[arg(long)]
    figure_a: Option<u32>,
    /// Config file of scenario B.
    #[arg(long, conflicts_with = "figure_b")]
    config_b: Option<PathBuf>,
    /// Preset number of scenario B.
    #[arg(long)]
    figure_b: Option<u32>,
    /// Simulation end time override for both scenarios.
    #[arg(long)]
    t_end: Option<f64>,
    /// Output directory for the report.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct EnergyAuditArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Audit the unforced open-loop plant (all forces zero) instead of the
    /// closed loop.
    #[arg(long)]
    open_loop: bool,
}

#[derive(Args)]
struct PlotArgs {
    /// Trajectory CSV produced by `run`.
    #[arg(long)]
    csv: PathBuf,
    /// Output directory for the gnuplot script.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn exit_code_for(err: &CraneError) -> u8 {
    match err {
        CraneError::InvalidParameters(_)
        | CraneError::InvalidInput(_)
        | CraneError::EmptyTrajectory => 2,
        CraneError::Uncontrollable { .. } => 3,
        CraneError::PlacementFailed(_) | CraneError::NotHurwitz { .. } => 4,
        CraneError::SingularConfiguration { .. } => 5,
        CraneError::NoValidRadius => 6,
    }
}

fn fail_config(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn fail_core(err: &CraneError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code_for(err))
}

fn fail_io(err: &std::io::Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Linearize(args) => with_scenario(&args, pipeline::linearize),
        Command::Check(args) => with_scenario(&args, pipeline::check),
        Command::Place(args) => with_scenario(&args, pipeline::place),
        Command::Certify(args) => with_scenario(&args, pipeline::certify),
        Command::Run(args) => with_scenario(&args, pipeline::run),
        Command::Compare(args) => compare(&args),
        Command::EnergyAudit(args) => with_scenario(&args.scenario, |cfg| {
            pipeline::energy_audit(cfg, args.open_loop)
        }),
        Command::Plot(args) => match pipeline::plot(&args.csv, &args.out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail_io(&e),
        },
    }
}

fn with_scenario<F>(args: &ScenarioArgs, body: F) -> ExitCode
where
    F: FnOnce(&ScenarioConfig) -> Result<(), pipeline::PipelineError>,
{
    let cfg = match args.resolve() {
        Ok(cfg) => cfg,
        Err(msg) => return fail_config(&msg),
    };
    match body(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(pipeline::PipelineError::Core(e)) => fail_core(&e),
        Err(pipeline::PipelineError::Io(e)) => fail_io(&e),
    }
}

fn compare(args: &CompareArgs) -> ExitCode {
    let resolve = |config: &Option<PathBuf>,
                   figure: Option<u32>,
                   tag: &str|
     -> Result<ScenarioConfig, String> {
        let mut cfg = if let Some(path) = config {
            ScenarioConfig::load(path)?
        } else if let Some(n) = figure {
            ScenarioConfig::figure_preset(n).map_err(|e| e.to_string())?
        } else {
            return Err(format!(
                "scenario {tag} needs --config-{tag} or --figure-{tag}"
            ));
        };
        if let Some(t) = args.t_end {
            cfg.integrator.t_end = t;
        }
        cfg.rebase_outputs(&args.out);
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    };
    let a = match resolve(&args.config_a, args.figure_a, "a") {
        Ok(c) => c,
        Err(m) => return fail_config(&m),
    };
    let b = match resolve(&args.config_b, args.figure_b, "b") {
        Ok(c) => c,
        Err(m) => return fail_config(&m),
    };
    match pipeline::compare(&a, &b, &args.out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(pipeline::PipelineError::Core(e)) => fail_core(&e),
        Err(pipeline::PipelineError::Io(e)) => fail_io(&e),
    }
}
