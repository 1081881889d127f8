//! Trajectory integration, force traces, settling metrics, the energy
//! audit, and the actuation-variant comparison.

use crate::dynamics::{energy, realized_forces, vector_field};
use crate::error::{CraneError, Result};
use crate::linmodel::analytic_linearization;
use crate::synthesis::{GainMatrix, PoleSet};
use crate::types::{ActuationVariant, CraneParams, GeneralizedForces, State, StateVector};
use std::io::Write;

pub mod rk;

/// Integration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationMethod {
    /// Adaptive embedded Runge-Kutta 4(5), Dormand-Prince coefficients.
    Rk45Adaptive,
    /// Classic fixed-step fourth-order Runge-Kutta, for deterministic
    /// regression snapshots.
    Rk4Fixed,
}

/// Integrator configuration. `max_step` doubles as the recording grid bound:
/// accepted steps never exceed it, so samples are at most `max_step` apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub method: IntegrationMethod,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Step of the fixed-step scheme (ignored by the adaptive one).
    pub fixed_step: f64,
    pub t_end: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            method: IntegrationMethod::Rk45Adaptive,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: 0.02,
            fixed_step: 0.005,
            t_end: 40.0,
        }
    }
}

impl IntegratorOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("fixed_step", self.fixed_step),
            ("t_end", self.t_end),
        ];
        for (name, v) in positive {
            if v <= 0.0 || !v.is_finite() {
                return Err(CraneError::InvalidInput(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.fixed_step > self.max_step {
            return Err(CraneError::InvalidInput(
                "fixed_step must not exceed max_step".into(),
            ));
        }
        Ok(())
    }
}

/// Why an integration stopped early. The partial trajectory up to the
/// failure time is still returned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrationFailure {
    SingularConfiguration { time: f64 },
    StepSizeUnderflow { time: f64 },
    StepBudgetExhausted { time: f64 },
}

/// Provenance of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub params: CraneParams,
    /// Feedback gain; absent for open-loop runs.
    pub gain: Option<GainMatrix>,
    pub variant: ActuationVariant,
    pub x0: State,
    pub options: IntegratorOptions,
}

/// Sampled solution with realized force traces.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub forces: Vec<GeneralizedForces>,
    pub meta: TrajectoryMeta,
    pub failure: Option<IntegrationFailure>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_time(&self) -> Option<f64> {
        self.times.last().copied()
    }

    pub fn last_state(&self) -> Option<&State> {
        self.states.last()
    }

    pub fn last_forces(&self) -> Option<&GeneralizedForces> {
        self.forces.last()
    }

    /// Smallest hoist-rope length over the run. The model admits
    /// non-positive lengths; run summaries flag them.
    pub fn min_hoist_len(&self) -> Option<f64> {
        self.states
            .iter()
            .map(State::hoist_len)
            .min_by(|a, b| a.partial_cmp(b).unwrap())
    }

    /// Componentwise maxima of the absolute realized forces.
    pub fn peak_forces(&self) -> GeneralizedForces {
        let mut peak = GeneralizedForces::zero();
        for f in &self.forces {
            peak.trolley = peak.trolley.max(f.trolley.abs());
            peak.hoist = peak.hoist.max(f.hoist.abs());
            peak.hook = peak.hook.max(f.hook.abs());
            peak.payload = peak.payload.max(f.payload.abs());
        }
        peak
    }

    /// Writes the sample table as CSV: one row per sample, twelve
    /// significant digits, payload-torque column zero-filled for the
    /// underactuated variant.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x1,x2,x3,x4,x5,x6,x7,x8,Fz,Fl1,Fth1,Fth2")?;
        for i in 0..self.len() {
            let x = self.states[i].as_vector();
            let f = &self.forces[i];
            write!(w, "{:.12e}", self.times[i])?;
            for v in x.iter() {
                write!(w, ",{v:.12e}")?;
            }
            writeln!(
                w,
                ",{:.12e},{:.12e},{:.12e},{:.12e}",
                f.trolley, f.hoist, f.hook, f.payload
            )?;
        }
        Ok(())
    }
}

fn run_core<F>(rhs: F, x0: StateVector, opts: &IntegratorOptions) -> rk::RawTrajectory<8>
where
    F: FnMut(f64, &StateVector) -> Result<StateVector>,
{
    match opts.method {
        IntegrationMethod::Rk45Adaptive => rk::integrate_adaptive(
            rhs,
            0.0,
            x0,
            opts.t_end,
            rk::AdaptiveSettings {
                rel_tol: opts.rel_tol,
                abs_tol: opts.abs_tol,
                max_step: opts.max_step,
            },
        ),
        IntegrationMethod::Rk4Fixed => {
            rk::integrate_fixed(rhs, 0.0, x0, opts.t_end, opts.fixed_step)
        }
    }
}

fn map_failure(f: &rk::RawFailure) -> Result<Option<IntegrationFailure>> {
    match f {
        rk::RawFailure::RhsError { time, error } => match error {
            CraneError::SingularConfiguration { .. } => {
                Ok(Some(IntegrationFailure::SingularConfiguration {
                    time: *time,
                }))
            }
            other => Err(other.clone()),
        },
        rk::RawFailure::StepSizeUnderflow { time } => {
            Ok(Some(IntegrationFailure::StepSizeUnderflow { time: *time }))
        }
        rk::RawFailure::StepBudgetExhausted { time } => {
            Ok(Some(IntegrationFailure::StepBudgetExhausted {
                time: *time,
            }))
        }
    }
}

/// Closed-loop integration of `xdot = G(x, -K x) (+ disturbance)`, with the
/// realized forces (including the hoist feedforward) recorded at every
/// sample. On a singular configuration the partial trajectory is returned
/// with its failure flag set.
pub fn integrate(
    p: &CraneParams,
    gain: &GainMatrix,
    variant: ActuationVariant,
    x0: &State,
    opts: &IntegratorOptions,
    disturbance: Option<&dyn Fn(f64) -> StateVector>,
) -> Result<Trajectory> {
    p.validate()?;
    opts.validate()?;
    if gain.variant != variant {
        return Err(CraneError::InvalidInput("gain variant mismatch".into()));
    }
    if !x0.is_finite() {
        return Err(CraneError::InvalidInput(
            "initial state is not finite".into(),
        ));
    }

    let rhs = |t: f64, x: &StateVector| -> Result<StateVector> {
        let s = State::from_vector(*x);
        let u = gain.feedback(&s);
        let mut dx = vector_field(p, &s, &u, variant)?;
        if let Some(d) = disturbance {
            dx += d(t);
        }
        Ok(dx)
    };
    let raw = run_core(rhs, x0.into_vector(), opts);
    let failure = match &raw.failure {
        Some(f) => map_failure(f)?,
        None => None,
    };

    let mut states = Vec::with_capacity(raw.times.len());
    let mut forces = Vec::with_capacity(raw.times.len());
    for x in &raw.states {
        let s = State::from_vector(*x);
        let u = gain.feedback(&s);
        forces.push(realized_forces(p, &s, &u)?);
        states.push(s);
    }
    Ok(Trajectory {
        times: raw.times,
        states,
        forces,
        meta: TrajectoryMeta {
            params: *p,
            gain: Some(gain.clone()),
            variant,
            x0: *x0,
            options: *opts,
        },
        failure,
    })
}

/// Open-loop integration with the four generalized forces held constant.
pub fn integrate_open_loop(
    p: &CraneParams,
    forces: &GeneralizedForces,
    x0: &State,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    p.validate()?;
    opts.validate()?;
    if !forces.is_finite() {
        return Err(CraneError::InvalidInput("forces are not finite".into()));
    }
    if !x0.is_finite() {
        return Err(CraneError::InvalidInput(
            "initial state is not finite".into(),
        ));
    }

    let rhs = |_t: f64, x: &StateVector| -> Result<StateVector> {
        let s = State::from_vector(*x);
        let qdd = crate::dynamics::accel(p, &s, forces)?;
        let mut dx = StateVector::zeros();
        for i in 0..4 {
            dx[i] = x[4 + i];
            dx[4 + i] = qdd[i];
        }
        Ok(dx)
    };
    let raw = run_core(rhs, x0.into_vector(), opts);
    let failure = match &raw.failure {
        Some(f) => map_failure(f)?,
        None => None,
    };
    let states: Vec<State> = raw.states.iter().map(|x| State::from_vector(*x)).collect();
    let force_trace = vec![*forces; states.len()];
    Ok(Trajectory {
        times: raw.times,
        states,
        forces: force_trace,
        meta: TrajectoryMeta {
            params: *p,
            gain: None,
            variant: ActuationVariant::FullyActuated,
            x0: *x0,
            options: *opts,
        },
        failure,
    })
}

/// Smallest sampled time after which the state norm stays within
/// `fraction` of its initial value; `None` when the trajectory never
/// settles.
pub fn settling_time(tr: &Trajectory, fraction: f64) -> Result<Option<f64>> {
    if tr.is_empty() {
        return Err(CraneError::EmptyTrajectory);
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(CraneError::InvalidInput(format!(
            "fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let threshold = fraction * tr.states[0].norm();
    let mut settle_idx: Option<usize> = None;
    for i in (0..tr.len()).rev() {
        if tr.states[i].norm() > threshold {
            settle_idx = if i + 1 < tr.len() { Some(i + 1) } else { None };
            break;
        }
        settle_idx = Some(i);
    }
    Ok(settle_idx.map(|i| tr.times[i]))
}

/// Work-energy audit: the largest deviation between the energy change and
/// the integrated actuator power (trapezoidal rule over the samples),
/// normalized by `max(1, |E(0)|)`.
pub fn energy_audit(tr: &Trajectory) -> Result<f64> {
    if tr.len() < 2 {
        return Err(CraneError::EmptyTrajectory);
    }
    let p = &tr.meta.params;
    let total = |s: &State| -> f64 {
        let (ke, pe) = energy(p, s);
        ke + pe
    };
    let power = |i: usize| -> f64 {
        let f = &tr.forces[i];
        let s = &tr.states[i];
        f.trolley * s.trolley_vel()
            + f.hoist * s.hoist_vel()
            + f.hook * s.hook_rate()
            + f.payload * s.payload_rate()
    };
    let e0 = total(&tr.states[0]);
    let scale = e0.abs().max(1.0);
    let mut work = 0.0;
    let mut worst: f64 = 0.0;
    let mut prev_power = power(0);
    for i in 1..tr.len() {
        let cur_power = power(i);
        let dt = tr.times[i] - tr.times[i - 1];
        work += 0.5 * (prev_power + cur_power) * dt;
        prev_power = cur_power;
        let deviation = (total(&tr.states[i]) - e0 - work).abs();
        worst = worst.max(deviation);
    }
    Ok(worst / scale)
}

/// Largest pointwise state distance between two trajectories over their
/// common time span, with linear interpolation between samples.
pub fn trajectory_divergence(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(CraneError::EmptyTrajectory);
    }
    let t_lo = a.times[0].max(b.times[0]);
    let t_hi = a.last_time().unwrap().min(b.last_time().unwrap());
    if t_hi < t_lo {
        return Err(CraneError::InvalidInput(
            "trajectories do not overlap in time".into(),
        ));
    }
    let sample = |tr: &Trajectory, t: f64| -> StateVector {
        match tr
            .times
            .binary_search_by(|probe| probe.partial_cmp(&t).unwrap())
        {
            Ok(i) => *tr.states[i].as_vector(),
            Err(i) => {
                if i == 0 {
                    *tr.states[0].as_vector()
                } else if i >= tr.len() {
                    *tr.states[tr.len() - 1].as_vector()
                } else {
                    let (t0, t1) = (tr.times[i - 1], tr.times[i]);
                    let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
                    tr.states[i - 1].as_vector() * (1.0 - w) + tr.states[i].as_vector() * w
                }
            }
        }
    };
    let mut worst = 0.0_f64;
    for tr in [a, b] {
        for &t in &tr.times {
            if t >= t_lo && t <= t_hi {
                worst = worst.max((sample(a, t) - sample(b, t)).norm());
            }
        }
    }
    Ok(worst)
}

/// Summary metrics of one closed-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub settling_time: Option<f64>,
    pub peak_forces: GeneralizedForces,
    pub terminal_forces: GeneralizedForces,
    pub terminal_state_norm: f64,
    pub min_hoist_len: f64,
    pub failure: Option<IntegrationFailure>,
}

/// Settling fraction of the full-state norm used by the comparison report.
pub const SETTLING_FRACTION: f64 = 0.02;

pub fn run_metrics(tr: &Trajectory, fraction: f64) -> Result<RunMetrics> {
    if tr.is_empty() {
        return Err(CraneError::EmptyTrajectory);
    }
    Ok(RunMetrics {
        settling_time: settling_time(tr, fraction)?,
        peak_forces: tr.peak_forces(),
        terminal_forces: *tr.last_forces().unwrap(),
        terminal_state_norm: tr.last_state().unwrap().norm(),
        min_hoist_len: tr.min_hoist_len().unwrap(),
        failure: tr.failure,
    })
}

/// Side-by-side closed-loop comparison of the two actuation variants for
/// the same pole set and initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantComparison {
    pub underactuated: RunMetrics,
    pub fully_actuated: RunMetrics,
    /// Settling-time reduction of the fully actuated variant in percent;
    /// `None` when either run does not settle.
    pub reduction_percent: Option<f64>,
}

/// Synthesizes gains for both variants with the same poles, runs both from
/// `x0`, and reports settling times, peak and terminal forces, and the
/// settling-time reduction.
pub fn compare_variants(
    p: &CraneParams,
    poles: &PoleSet,
    x0: &State,
    opts: &IntegratorOptions,
) -> Result<VariantComparison> {
    let mut metrics = Vec::with_capacity(2);
    for variant in [
        ActuationVariant::Underactuated,
        ActuationVariant::FullyActuated,
    ] {
        let model = analytic_linearization(p, variant)?;
        let gain = model.place(poles)?;
        let tr = integrate(p, &gain, variant, x0, opts, None)?;
        metrics.push(run_metrics(&tr, SETTLING_FRACTION)?);
    }
    let fully = metrics.pop().unwrap();
    let under = metrics.pop().unwrap();
    let reduction = match (under.settling_time, fully.settling_time) {
        (Some(0.0), Some(_)) => Some(0.0),
        (Some(tu), Some(tf)) => Some(100.0 * (1.0 - tf / tu)),
        _ => None,
    };
    Ok(VariantComparison {
        underactuated: under,
        fully_actuated: fully,
        reduction_percent: reduction,
    })
}
