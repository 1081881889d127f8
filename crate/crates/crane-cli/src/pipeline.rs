//! Pipeline bodies behind the subcommands.

use crane_core::certify::{self, RoaOptions};
use crane_core::linmodel::{analytic_linearization, fd_linearization, LinearModel};
use crane_core::sim::{self, SETTLING_FRACTION};
use crane_core::synthesis::{reference_gain, GainMatrix, DEFAULT_RANK_TOL};
use crane_core::{CraneError, GeneralizedForces};
use nalgebra::DMatrix;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::config::{GainSource, ScenarioConfig};
use crate::report::{self, CompareSummary, ComplexEntry, RunSummary, SimulationSummary};

pub enum PipelineError {
    Core(CraneError),
    Io(std::io::Error),
}

impl From<CraneError> for PipelineError {
    fn from(e: CraneError) -> Self {
        PipelineError::Core(e)
    }
}

impl From<std::io::Error> for PipelineError {
    fn from(e: std::io::Error) -> Self {
        PipelineError::Io(e)
    }
}

type PipelineResult = Result<(), PipelineError>;

fn model_for(cfg: &ScenarioConfig) -> Result<LinearModel, CraneError> {
    analytic_linearization(&cfg.crane_params(), cfg.actuation_variant())
}

/// Rank gate shared by the pipelines.
fn checked_rank(model: &LinearModel) -> Result<usize, CraneError> {
    let rank = model.controllability_rank(DEFAULT_RANK_TOL);
    if rank < model.state_dim() {
        return Err(CraneError::Uncontrollable { rank });
    }
    Ok(rank)
}

fn gain_for(
    cfg: &ScenarioConfig,
    model: &LinearModel,
) -> Result<(GainMatrix, &'static str), CraneError> {
    match cfg.gain {
        GainSource::Place => Ok((model.place(&cfg.pole_set()?)?, "place")),
        GainSource::Reference => Ok((reference_gain(cfg.actuation_variant()), "reference")),
    }
}

fn max_pole_deviation(
    cfg: &ScenarioConfig,
    model: &LinearModel,
    gain: &GainMatrix,
) -> Result<f64, CraneError> {
    let eigs = model.closed_loop_eigs(gain)?;
    let mut targets = cfg.pole_set()?.poles().to_vec();
    targets.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut worst = 0.0_f64;
    for (e, t) in eigs.iter().zip(targets.iter()) {
        worst = worst.max((e - t).norm());
    }
    Ok(worst)
}

pub fn linearize(cfg: &ScenarioConfig) -> PipelineResult {
    let model = model_for(cfg)?;
    let fd = fd_linearization(&cfg.crane_params(), cfg.actuation_variant())?;
    let da = (&model.a - &fd.a)
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let db = (&model.b - &fd.b)
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));

    let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
        (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
            .collect()
    };
    println!("variant: {}", cfg.actuation_variant());
    report::print_matrix("A (analytic)", &rows(&model.a));
    report::print_matrix("B (analytic)", &rows(&model.b));
    println!("finite-difference cross-check: max |dA| = {da:.3e}, max |dB| = {db:.3e}");
    Ok(())
}

pub fn check(cfg: &ScenarioConfig) -> PipelineResult {
    let model = model_for(cfg)?;
    let rank = checked_rank(&model)?;
    println!(
        "variant: {}; controllability rank {rank} of {} -> controllable",
        cfg.actuation_variant(),
        model.state_dim()
    );
    Ok(())
}

pub fn place(cfg: &ScenarioConfig) -> PipelineResult {
    let model = model_for(cfg)?;
    checked_rank(&model)?;
    let (gain, source) = gain_for(cfg, &model)?;
    let eigs: Vec<ComplexEntry> = model
        .closed_loop_eigs(&gain)?
        .into_iter()
        .map(ComplexEntry::from)
        .collect();
    let deviation = max_pole_deviation(cfg, &model, &gain)?;
    println!(
        "variant: {}; gain source: {source}",
        cfg.actuation_variant()
    );
    report::print_matrix("gain matrix K", &report::gain_rows(&gain));
    report::print_eigenvalues("closed-loop eigenvalues", &eigs);
    println!("max deviation from requested poles: {deviation:.3e}");
    Ok(())
}

fn certificate_for(
    cfg: &ScenarioConfig,
    model: &LinearModel,
    gain: &GainMatrix,
) -> Result<certify::RoaCertificate, CraneError> {
    let q = DMatrix::<f64>::identity(model.state_dim(), model.state_dim());
    let opts = RoaOptions {
        n_samples: cfg.certify.n_samples,
        seed: cfg.certify.seed,
        max_bisections: cfg.certify.max_bisections,
    };
    certify::region_of_attraction_with(&cfg.crane_params(), model, gain, &q, &opts)
}

pub fn certify(cfg: &ScenarioConfig) -> PipelineResult {
    let model = model_for(cfg)?;
    checked_rank(&model)?;
    let (gain, source) = gain_for(cfg, &model)?;
    let cert = certificate_for(cfg, &model, &gain)?;
    println!(
        "variant: {}; gain source: {source}",
        cfg.actuation_variant()
    );
    report::print_certificate(&(&cert).into());
    Ok(())
}

fn simulate(
    cfg: &ScenarioConfig,
    gain: &GainMatrix,
) -> Result<(sim::Trajectory, SimulationSummary), CraneError> {
    let tr = sim::integrate(
        &cfg.crane_params(),
        gain,
        cfg.actuation_variant(),
        &cfg.initial_state(),
        &cfg.integrator_options(),
        None,
    )?;
    let metrics = sim::run_metrics(&tr, SETTLING_FRACTION)?;
    let audit = sim::energy_audit(&tr)?;
    let summary = SimulationSummary::from_parts(&tr, &metrics, SETTLING_FRACTION, audit);
    Ok((tr, summary))
}

pub fn run(cfg: &ScenarioConfig) -> PipelineResult {
    let model = model_for(cfg)?;
    let rank = checked_rank(&model)?;
    let (gain, source) = gain_for(cfg, &model)?;
    let deviation = max_pole_deviation(cfg, &model, &gain)?;
    let cert = certificate_for(cfg, &model, &gain)?;
    let (tr, sim_summary) = simulate(cfg, &gain)?;

    // Trajectory CSV.
    let csv_path = Path::new(&cfg.outputs.csv);
    if let Some(parent) = csv_path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut csv = fs::File::create(csv_path)?;
    tr.write_csv(&mut csv)?;
    csv.flush()?;

    let summary = RunSummary {
        config: cfg.clone(),
        controllability_rank: rank,
        gain_source: source.to_string(),
        gain_matrix: report::gain_rows(&gain),
        closed_loop_eigenvalues: model
            .closed_loop_eigs(&gain)?
            .into_iter()
            .map(ComplexEntry::from)
            .collect(),
        max_pole_deviation: deviation,
        certificate: (&cert).into(),
        simulation: sim_summary,
        csv_path: cfg.outputs.csv.clone(),
    };
    let summary_path = Path::new(&cfg.outputs.summary);
    if let Some(parent) = summary_path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(
        summary_path,
        serde_json::to_string_pretty(&summary).expect("serialize summary"),
    )?;

    // Human-readable table.
    println!(
        "variant: {}; gain source: {source}",
        cfg.actuation_variant()
    );
    println!("controllability rank {rank}");
    report::print_matrix("gain matrix K", &summary.gain_matrix);
    report::print_eigenvalues("closed-loop eigenvalues", &summary.closed_loop_eigenvalues);
    println!("max deviation from requested poles: {deviation:.3e}");
    report::print_certificate(&summary.certificate);
    report::print_simulation(&summary.simulation);
    println!("trajectory csv: {}", cfg.outputs.csv);
    println!("summary json:   {}", cfg.outputs.summary);

    // A singular configuration mid-run still wrote the partial trajectory;
    // report it through the exit code.
    if let Some(sim::IntegrationFailure::SingularConfiguration { .. }) = &tr.failure {
        return Err(PipelineError::Core(CraneError::SingularConfiguration {
            condition: f64::INFINITY,
        }));
    }
    Ok(())
}

pub fn compare(a: &ScenarioConfig, b: &ScenarioConfig, out_dir: &Path) -> PipelineResult {
    let mut summaries = Vec::new();
    let mut trajectories = Vec::new();
    for cfg in [a, b] {
        let model = model_for(cfg)?;
        checked_rank(&model)?;
        let (gain, _) = gain_for(cfg, &model)?;
        let (tr, summary) = simulate(cfg, &gain)?;
        trajectories.push(tr);
        summaries.push(summary);
    }
    let metrics_b = summaries.pop().unwrap();
    let metrics_a = summaries.pop().unwrap();
    let reduction = match (metrics_a.settling_time, metrics_b.settling_time) {
        (Some(0.0), Some(_)) => Some(0.0),
        (Some(ta), Some(tb)) => Some(100.0 * (1.0 - tb / ta)),
        _ => None,
    };
    let divergence = sim::trajectory_divergence(&trajectories[0], &trajectories[1])?;

    let summary = CompareSummary {
        config_a: a.clone(),
        config_b: b.clone(),
        metrics_a,
        metrics_b,
        reduction_percent: reduction,
        trajectory_divergence: divergence,
    };
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join("comparison.json");
    fs::write(
        &path,
        serde_json::to_string_pretty(&summary).expect("serialize comparison"),
    )?;

    println!("scenario A ({}):", summary.config_a.variant_label());
    report::print_simulation(&summary.metrics_a);
    println!("scenario B ({}):", summary.config_b.variant_label());
    report::print_simulation(&summary.metrics_b);
    match summary.reduction_percent {
        Some(r) => println!("settling-time reduction (B vs A): {r:.1}%"),
        None => println!("settling-time reduction (B vs A): not available (a run did not settle)"),
    }
    println!("trajectory divergence (max state distance): {divergence:.6e}");
    println!("report: {}", path.display());
    Ok(())
}

pub fn energy_audit(cfg: &ScenarioConfig, open_loop: bool) -> PipelineResult {
    let audit = if open_loop {
        let tr = sim::integrate_open_loop(
            &cfg.crane_params(),
            &GeneralizedForces::zero(),
            &cfg.initial_state(),
            &cfg.integrator_options(),
        )?;
        sim::energy_audit(&tr)?
    } else {
        let model = model_for(cfg)?;
        checked_rank(&model)?;
        let (gain, _) = gain_for(cfg, &model)?;
        let (_, summary) = simulate(cfg, &gain)?;
        summary.energy_audit
    };
    println!(
        "energy audit ({}): {audit:.6e}",
        if open_loop {
            "open loop, zero forces"
        } else {
            "closed loop"
        }
    );
    Ok(())
}

/// Emits a gnuplot script that plots the state and force traces of a
/// trajectory CSV.
pub fn plot(csv: &Path, out_dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join("plot.gp");
    let csv_name = csv.to_string_lossy();
    let mut f = fs::File::create(&path)?;
    writeln!(f, "# gnuplot script for a crane trajectory CSV")?;
    writeln!(f, "set datafile separator ','")?;
    writeln!(f, "set key outside")?;
    writeln!(f, "set xlabel 't'")?;
    writeln!(f, "set terminal pngcairo size 1400,900")?;
    writeln!(f, "set output 'states.png'")?;
    writeln!(f, "set multiplot layout 2,1 title 'crane closed-loop run'")?;
    writeln!(f, "set ylabel 'states'")?;
    writeln!(
        f,
        "plot for [i=2:9] '{csv_name}' using 1:i with lines title columnheader(i)"
    )?;
    writeln!(f, "set ylabel 'forces'")?;
    writeln!(
        f,
        "plot for [i=10:13] '{csv_name}' using 1:i with lines title columnheader(i)"
    )?;
    writeln!(f, "unset multiplot")?;
    println!("gnuplot script: {}", path.display());
    Ok(())
}

impl ScenarioConfig {
    fn variant_label(&self) -> String {
        format!("{}", crane_core::ActuationVariant::from(self.variant))
    }
}
