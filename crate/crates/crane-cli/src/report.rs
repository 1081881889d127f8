//! Machine-readable summary documents and their human-readable rendering.

use crane_core::certify::RoaCertificate;
use crane_core::sim::{IntegrationFailure, RunMetrics, Trajectory};
use crane_core::synthesis::GainMatrix;
use crane_core::GeneralizedForces;
use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

impl From<Complex<f64>> for ComplexEntry {
    fn from(c: Complex<f64>) -> Self {
        ComplexEntry { re: c.re, im: c.im }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ForcesEntry {
    pub trolley: f64,
    pub hoist: f64,
    pub hook: f64,
    pub payload: f64,
}

impl From<GeneralizedForces> for ForcesEntry {
    fn from(f: GeneralizedForces) -> Self {
        ForcesEntry {
            trolley: f.trolley,
            hoist: f.hoist,
            hook: f.hook,
            payload: f.payload,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CertificateSummary {
    pub gamma_hat: f64,
    pub margin: f64,
    pub sigma_hat: f64,
    pub lambda_min_q: f64,
    pub lambda_max_p: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub rejected_samples: usize,
    /// The radius is certified by sampling, not by proof.
    pub sample_certified: bool,
}

impl From<&RoaCertificate> for CertificateSummary {
    fn from(c: &RoaCertificate) -> Self {
        CertificateSummary {
            gamma_hat: c.gamma_hat,
            margin: c.margin,
            sigma_hat: c.sigma_hat,
            lambda_min_q: c.lambda_min_q,
            lambda_max_p: c.lambda_max_p,
            n_samples: c.n_samples,
            seed: c.seed,
            rejected_samples: c.rejected_samples,
            sample_certified: true,
        }
    }
}

fn failure_label(f: &IntegrationFailure) -> String {
    match f {
        IntegrationFailure::SingularConfiguration { time } => {
            format!("singular-configuration at t = {time}")
        }
        IntegrationFailure::StepSizeUnderflow { time } => {
            format!("step-size-underflow at t = {time}")
        }
        IntegrationFailure::StepBudgetExhausted { time } => {
            format!("step-budget-exhausted at t = {time}")
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SimulationSummary {
    pub t_end: f64,
    pub samples: usize,
    pub failure: Option<String>,
    pub terminal_state_norm: f64,
    pub settling_fraction: f64,
    pub settling_time: Option<f64>,
    pub peak_forces: ForcesEntry,
    pub terminal_forces: ForcesEntry,
    pub min_hoist_len: f64,
    /// True when the hoist length reached zero or below at some sample (the
    /// model is regular there; flagged for awareness).
    pub hoist_len_nonpositive: bool,
    pub energy_audit: f64,
}

impl SimulationSummary {
    pub fn from_parts(tr: &Trajectory, metrics: &RunMetrics, fraction: f64, audit: f64) -> Self {
        SimulationSummary {
            t_end: tr.meta.options.t_end,
            samples: tr.len(),
            failure: tr.failure.as_ref().map(failure_label),
            terminal_state_norm: metrics.terminal_state_norm,
            settling_fraction: fraction,
            settling_time: metrics.settling_time,
            peak_forces: metrics.peak_forces.into(),
            terminal_forces: metrics.terminal_forces.into(),
            min_hoist_len: metrics.min_hoist_len,
            hoist_len_nonpositive: metrics.min_hoist_len <= 0.0,
            energy_audit: audit,
        }
    }
}

/// The summary document written by `run`: the fully resolved configuration
/// plus every pipeline result. Re-running from the embedded config
/// reproduces the outputs byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunSummary {
    pub config: ScenarioConfig,
    pub controllability_rank: usize,
    pub gain_source: String,
    pub gain_matrix: Vec<Vec<f64>>,
    pub closed_loop_eigenvalues: Vec<ComplexEntry>,
    pub max_pole_deviation: f64,
    pub certificate: CertificateSummary,
    pub simulation: SimulationSummary,
    pub csv_path: String,
}

pub fn gain_rows(gain: &GainMatrix) -> Vec<Vec<f64>> {
    (0..gain.matrix.nrows())
        .map(|r| {
            (0..gain.matrix.ncols())
                .map(|c| gain.matrix[(r, c)])
                .collect()
        })
        .collect()
}

/// Report written by `compare`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CompareSummary {
    pub config_a: ScenarioConfig,
    pub config_b: ScenarioConfig,
    pub metrics_a: SimulationSummary,
    pub metrics_b: SimulationSummary,
    /// Settling-time reduction of B relative to A, percent; absent when
    /// either run does not settle.
    pub reduction_percent: Option<f64>,
    /// Largest pointwise state distance over the common time span.
    pub trajectory_divergence: f64,
}

pub fn print_matrix(label: &str, rows: &[Vec<f64>]) {
    println!("{label}:");
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>12.4}")).collect();
        println!("  [{}]", cells.join(" "));
    }
}

pub fn print_eigenvalues(label: &str, eigs: &[ComplexEntry]) {
    println!("{label}:");
    for e in eigs {
        if e.im == 0.0 {
            println!("  {:>12.6}", e.re);
        } else {
            println!(
                "  {:>12.6} {} {:.6}i",
                e.re,
                if e.im >= 0.0 { '+' } else { '-' },
                e.im.abs()
            );
        }
    }
}

pub fn print_forces_row(label: &str, f: &ForcesEntry) {
    println!(
        "  {label:<18} trolley {:>12.5e}  hoist {:>12.5e}  hook {:>12.5e}  payload {:>12.5e}",
        f.trolley, f.hoist, f.hook, f.payload
    );
}

pub fn print_simulation(sim: &SimulationSummary) {
    println!("simulation:");
    println!("  t_end              {:>12.3}", sim.t_end);
    println!("  samples            {:>12}", sim.samples);
    match &sim.failure {
        Some(f) => println!("  failure            {f}"),
        None => println!("  failure            none"),
    }
    println!("  terminal |x|       {:>12.5e}", sim.terminal_state_norm);
    match sim.settling_time {
        Some(t) => println!(
            "  settling time      {:>12.3}  (fraction {:.0}%)",
            t,
            100.0 * sim.settling_fraction
        ),
        None => println!("  settling time      not settled"),
    }
    print_forces_row("peak |forces|", &sim.peak_forces);
    print_forces_row("terminal forces", &sim.terminal_forces);
    println!(
        "  min hoist length   {:>12.6}{}",
        sim.min_hoist_len,
        if sim.hoist_len_nonpositive {
            "  (reached zero or below)"
        } else {
            ""
        }
    );
    println!("  energy audit       {:>12.5e}", sim.energy_audit);
}

pub fn print_certificate(cert: &CertificateSummary) {
    println!("stability certificate (sample-certified):");
    println!("  gamma_hat          {:>12.5e}", cert.gamma_hat);
    println!("  margin             {:>12.5e}", cert.margin);
    println!("  sigma_hat          {:>12.5e}", cert.sigma_hat);
    println!("  lambda_min(Q)      {:>12.5e}", cert.lambda_min_q);
    println!("  lambda_max(P)      {:>12.5e}", cert.lambda_max_p);
    println!(
        "  samples            {:>12}  (seed {}, {} rejected)",
        cert.n_samples, cert.seed, cert.rejected_samples
    );
}
