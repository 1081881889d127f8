//! Runge-Kutta integration cores, generic over the state dimension so test
//! problems of any size run through the same machinery as the crane.

use crate::error::{CraneError, Result};
use nalgebra::SVector;

/// Dormand-Prince 5(4) coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
/// Fifth-order weights (also the last stage row: first-same-as-last).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Embedded fourth-order weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;
/// Hard cap on accepted plus rejected steps.
const STEP_BUDGET: usize = 4_000_000;

/// Adaptive controller settings.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

/// Why the core stopped before reaching the end time.
#[derive(Debug, Clone)]
pub enum RawFailure {
    RhsError { time: f64, error: CraneError },
    StepSizeUnderflow { time: f64 },
    StepBudgetExhausted { time: f64 },
}

/// Accepted samples plus an optional failure marker.
#[derive(Debug, Clone)]
pub struct RawTrajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<SVector<f64, N>>,
    pub failure: Option<RawFailure>,
}

/// Adaptive Dormand-Prince integration from `t0` to `t_end`, recording
/// every accepted step (steps are capped at `max_step`, so samples are at
/// most that far apart).
pub fn integrate_adaptive<const N: usize, F>(
    mut rhs: F,
    t0: f64,
    x0: SVector<f64, N>,
    t_end: f64,
    settings: AdaptiveSettings,
) -> RawTrajectory<N>
where
    F: FnMut(f64, &SVector<f64, N>) -> Result<SVector<f64, N>>,
{
    let mut times = vec![t0];
    let mut states = vec![x0];
    let mut t = t0;
    let mut x = x0;

    let mut k1 = match rhs(t, &x) {
        Ok(v) => v,
        Err(error) => {
            return RawTrajectory {
                times,
                states,
                failure: Some(RawFailure::RhsError { time: t, error }),
            }
        }
    };

    let mut h = settings.max_step.min(t_end - t0);
    let mut steps = 0usize;
    let mut failure = None;

    'outer: while t < t_end {
        if steps >= STEP_BUDGET {
            failure = Some(RawFailure::StepBudgetExhausted { time: t });
            break;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            failure = Some(RawFailure::StepSizeUnderflow { time: t });
            break;
        }
        h = h.min(t_end - t);
        steps += 1;

        // Stages 2..7; stage 7 evaluates at the candidate point (FSAL).
        let mut stage =
            |time: f64, y: &SVector<f64, N>| -> std::result::Result<SVector<f64, N>, RawFailure> {
                rhs(time, y).map_err(|error| RawFailure::RhsError { time, error })
            };
        macro_rules! try_stage {
            ($t:expr, $y:expr) => {
                match stage($t, &$y) {
                    Ok(v) => v,
                    Err(f) => {
                        failure = Some(f);
                        break 'outer;
                    }
                }
            };
        }
        let k2 = try_stage!(t + C[1] * h, x + k1 * (A21 * h));
        let k3 = try_stage!(t + C[2] * h, x + k1 * (A31 * h) + k2 * (A32 * h));
        let k4 = try_stage!(
            t + C[3] * h,
            x + k1 * (A41 * h) + k2 * (A42 * h) + k3 * (A43 * h)
        );
        let k5 = try_stage!(
            t + C[4] * h,
            x + k1 * (A51 * h) + k2 * (A52 * h) + k3 * (A53 * h) + k4 * (A54 * h)
        );
        let k6 = try_stage!(
            t + C[5] * h,
            x + k1 * (A61 * h) + k2 * (A62 * h) + k3 * (A63 * h) + k4 * (A64 * h) + k5 * (A65 * h)
        );
        let x_new = x
            + k1 * (B5[0] * h)
            + k3 * (B5[2] * h)
            + k4 * (B5[3] * h)
            + k5 * (B5[4] * h)
            + k6 * (B5[5] * h);
        let k7 = try_stage!(t + C[6] * h, x_new);

        let x_low = x
            + k1 * (B4[0] * h)
            + k3 * (B4[2] * h)
            + k4 * (B4[3] * h)
            + k5 * (B4[4] * h)
            + k6 * (B4[5] * h)
            + k7 * (B4[6] * h);

        // Scaled RMS error of the embedded pair.
        let mut err_sq = 0.0;
        for i in 0..N {
            let scale = settings.abs_tol + settings.rel_tol * x[i].abs().max(x_new[i].abs());
            let e = (x_new[i] - x_low[i]) / scale;
            err_sq += e * e;
        }
        let err = (err_sq / N as f64).sqrt();

        if err <= 1.0 {
            t += h;
            x = x_new;
            k1 = k7;
            times.push(t);
            states.push(x);
            let grow = if err == 0.0 {
                MAX_SCALE
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, MAX_SCALE)
            };
            h = (h * grow).min(settings.max_step);
        } else {
            let shrink = (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, 1.0);
            h *= shrink;
        }
    }

    RawTrajectory {
        times,
        states,
        failure,
    }
}

/// Classic fixed-step fourth-order Runge-Kutta; the final step is clamped
/// to land on `t_end` exactly.
pub fn integrate_fixed<const N: usize, F>(
    mut rhs: F,
    t0: f64,
    x0: SVector<f64, N>,
    t_end: f64,
    step: f64,
) -> RawTrajectory<N>
where
    F: FnMut(f64, &SVector<f64, N>) -> Result<SVector<f64, N>>,
{
    let mut times = vec![t0];
    let mut states = vec![x0];
    let mut t = t0;
    let mut x = x0;
    let mut failure = None;

    'outer: while t < t_end {
        let h = step.min(t_end - t);
        macro_rules! try_stage {
            ($t:expr, $y:expr) => {
                match rhs($t, &$y) {
                    Ok(v) => v,
                    Err(error) => {
                        failure = Some(RawFailure::RhsError { time: $t, error });
                        break 'outer;
                    }
                }
            };
        }
        let k1 = try_stage!(t, x);
        let k2 = try_stage!(t + 0.5 * h, x + k1 * (0.5 * h));
        let k3 = try_stage!(t + 0.5 * h, x + k2 * (0.5 * h));
        let k4 = try_stage!(t + h, x + k3 * h);
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        t += h;
        times.push(t);
        states.push(x);
    }

    RawTrajectory {
        times,
        states,
        failure,
    }
}
