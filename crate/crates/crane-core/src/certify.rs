//! Lyapunov-based local-asymptotic-stability certificate: solve the
//! Lyapunov equation, sample a bound on the first-order Taylor remainder of
//! the closed loop, and estimate a region-of-attraction radius.
//!
//! With `P` solving `P A_cl + A_cl^T P = -Q` and `sigma` bounding the
//! remainder ratio `|G(x, -Kx) - A_cl x| / |x|` on a ball, the ball is
//! certified when `lambda_min(Q) > 2 sigma lambda_max(P)`. The bound here
//! is sample-based (the remainder has no closed-form Lipschitz constant),
//! so the certificate records the sample count and seed and is
//! "sample-certified" rather than a proof.

use crate::dynamics::vector_field;
use crate::error::{CraneError, Result};
use crate::linmodel::LinearModel;
use crate::synthesis::GainMatrix;
use crate::types::{ActuationVariant, CraneParams, State, StateVector, STATE_DIM};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Default number of ball samples per radius evaluation.
pub const DEFAULT_SIGMA_SAMPLES: usize = 100_000;

/// Default sampling seed recorded in certificates.
pub const DEFAULT_CERTIFY_SEED: u64 = 42;

/// Search interval for the certified radius.
pub const GAMMA_SEARCH_RANGE: (f64, f64) = (1e-6, 1e2);

/// Options of the radius search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoaOptions {
    pub n_samples: usize,
    pub seed: u64,
    pub max_bisections: usize,
}

impl Default for RoaOptions {
    fn default() -> Self {
        RoaOptions {
            n_samples: DEFAULT_SIGMA_SAMPLES,
            seed: DEFAULT_CERTIFY_SEED,
            max_bisections: 24,
        }
    }
}

/// Result of one remainder-bound sampling pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaEstimate {
    /// Largest sampled remainder ratio.
    pub sigma_hat: f64,
    /// Number of accepted ball samples (axis probes excluded).
    pub samples: usize,
    /// Samples rejected and redrawn because the dynamics were singular there.
    pub rejected: usize,
}

/// Stability evidence for one closed loop.
#[derive(Debug, Clone, PartialEq)]
pub struct RoaCertificate {
    pub gain: GainMatrix,
    /// Weight matrix `Q` of the Lyapunov equation.
    pub weight: DMatrix<f64>,
    /// Lyapunov matrix `P`.
    pub lyapunov: DMatrix<f64>,
    /// Sampled remainder bound at the certified radius.
    pub sigma_hat: f64,
    /// Certified ball radius (sample-certified, not a proof).
    pub gamma_hat: f64,
    /// `lambda_min(Q) - 2 sigma_hat lambda_max(P)`; positive iff certified.
    pub margin: f64,
    pub lambda_min_q: f64,
    pub lambda_max_p: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub rejected_samples: usize,
}

impl RoaCertificate {
    pub fn is_valid(&self) -> bool {
        self.margin > 0.0 && self.gamma_hat > 0.0
    }
}

fn check_square(m: &DMatrix<f64>, name: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(CraneError::InvalidInput(format!("{name} must be square")));
    }
    Ok(m.nrows())
}

fn symmetric_eigen_bounds(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = m.clone().symmetric_eigen();
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &l in eig.eigenvalues.iter() {
        min = min.min(l);
        max = max.max(l);
    }
    (min, max)
}

/// Solves `P A_cl + A_cl^T P = -Q` by a dense solve of the vectorized
/// symmetric system, after verifying that `A_cl` is Hurwitz. The returned
/// `P` is symmetrized and checked to be positive definite with residual at
/// most `1e-8 |Q|_max`.
pub fn solve_lyapunov(a_cl: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = check_square(a_cl, "A_cl")?;
    if check_square(q, "Q")? != n {
        return Err(CraneError::InvalidInput("Q dimension mismatch".into()));
    }
    let max_re = a_cl
        .complex_eigenvalues()
        .iter()
        .map(|e| e.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_re >= 0.0 {
        return Err(CraneError::NotHurwitz {
            max_real_part: max_re,
        });
    }

    // vec(P A + A^T P) = (A^T kron I + I kron A^T) vec(P) = -vec(Q)
    let eye = DMatrix::<f64>::identity(n, n);
    let system = a_cl.transpose().kronecker(&eye) + eye.kronecker(&a_cl.transpose());
    let rhs = DVector::from_iterator(n * n, q.iter().map(|v| -v));
    let vec_p = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| CraneError::PlacementFailed("Lyapunov system is singular".into()))?;
    let raw = DMatrix::from_column_slice(n, n, vec_p.as_slice());
    let p = (&raw + raw.transpose()) * 0.5;

    let residual = (&p * a_cl + a_cl.transpose() * &p + q)
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let q_scale = q.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if residual > 1e-8 * q_scale {
        return Err(CraneError::PlacementFailed(format!(
            "Lyapunov residual {residual:.3e} exceeds bound"
        )));
    }
    let (min_eig, _) = symmetric_eigen_bounds(&p);
    if min_eig <= 0.0 {
        return Err(CraneError::NotHurwitz {
            max_real_part: max_re,
        });
    }
    Ok(p)
}

/// One deterministic ball sample: direction uniform on the sphere, radius
/// scaled by `u^(1/8)` for volume uniformity.
fn ball_sample(rng: &mut ChaCha8Rng, gamma: f64) -> StateVector {
    loop {
        let mut dir = StateVector::zeros();
        for v in dir.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let norm = dir.norm();
        if norm > 1e-12 {
            let radius = gamma * rng.gen::<f64>().powf(1.0 / STATE_DIM as f64);
            return dir * (radius / norm);
        }
    }
}

/// Samples the largest remainder ratio `|f(x) - A_cl x| / |x|` over the
/// ball `|x| <= gamma`, plus deterministic probes along the signed axes.
/// Samples where `f` reports a singular configuration are redrawn (counted
/// in the estimate); the per-sample RNG stream makes the result independent
/// of evaluation order.
pub fn estimate_sigma_for<F>(
    f: F,
    a_cl: &DMatrix<f64>,
    gamma: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SigmaEstimate>
where
    F: Fn(&StateVector) -> Result<StateVector>,
{
    if gamma <= 0.0 || gamma.is_nan() || !gamma.is_finite() {
        return Err(CraneError::InvalidInput(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    if n_samples == 0 {
        return Err(CraneError::InvalidInput(
            "n_samples must be at least 1".into(),
        ));
    }
    if check_square(a_cl, "A_cl")? != STATE_DIM {
        return Err(CraneError::InvalidInput("A_cl must be 8x8".into()));
    }

    let linear = |x: &StateVector| -> StateVector {
        let mut out = StateVector::zeros();
        for r in 0..STATE_DIM {
            let mut acc = 0.0;
            for c in 0..STATE_DIM {
                acc += a_cl[(r, c)] * x[c];
            }
            out[r] = acc;
        }
        out
    };

    let mut sigma = 0.0_f64;
    let mut rejected = 0usize;
    for i in 0..n_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut attempts = 0;
        loop {
            let x = ball_sample(&mut rng, gamma);
            match f(&x) {
                Ok(fx) => {
                    let ratio = (fx - linear(&x)).norm() / x.norm();
                    sigma = sigma.max(ratio);
                    break;
                }
                Err(CraneError::SingularConfiguration { .. }) => {
                    rejected += 1;
                    attempts += 1;
                    if attempts > 100 {
                        return Err(CraneError::SingularConfiguration {
                            condition: f64::INFINITY,
                        });
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }
    // Signed axis probes on the boundary.
    for axis in 0..STATE_DIM {
        for sign in [1.0, -1.0] {
            let mut x = StateVector::zeros();
            x[axis] = sign * gamma;
            match f(&x) {
                Ok(fx) => {
                    let ratio = (fx - linear(&x)).norm() / gamma;
                    sigma = sigma.max(ratio);
                }
                Err(CraneError::SingularConfiguration { .. }) => rejected += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(SigmaEstimate {
        sigma_hat: sigma,
        samples: n_samples,
        rejected,
    })
}

/// Closed-loop vector field of the crane as a closure over the state vector.
fn closed_loop_fn<'a>(
    p: &'a CraneParams,
    gain: &'a GainMatrix,
    variant: ActuationVariant,
) -> impl Fn(&StateVector) -> Result<StateVector> + 'a {
    move |x: &StateVector| {
        let s = State::from_vector(*x);
        let u = gain.feedback(&s);
        vector_field(p, &s, &u, variant)
    }
}

/// Remainder bound for the crane's closed loop, about the analytic
/// linearization.
pub fn estimate_sigma(
    p: &CraneParams,
    gain: &GainMatrix,
    variant: ActuationVariant,
    gamma: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SigmaEstimate> {
    if gain.variant != variant {
        return Err(CraneError::InvalidInput("gain variant mismatch".into()));
    }
    let model = crate::linmodel::analytic_linearization(p, variant)?;
    let a_cl = model.closed_loop_matrix(gain)?;
    estimate_sigma_for(
        closed_loop_fn(p, gain, variant),
        &a_cl,
        gamma,
        n_samples,
        seed,
    )
}

struct RadiusSearch<'a, F: Fn(&StateVector) -> Result<StateVector>> {
    f: F,
    a_cl: &'a DMatrix<f64>,
    lambda_min_q: f64,
    lambda_max_p: f64,
    opts: RoaOptions,
}

impl<'a, F: Fn(&StateVector) -> Result<StateVector>> RadiusSearch<'a, F> {
    fn margin_at(&self, gamma: f64) -> Result<(f64, SigmaEstimate)> {
        let est = estimate_sigma_for(
            &self.f,
            self.a_cl,
            gamma,
            self.opts.n_samples,
            self.opts.seed,
        )?;
        Ok((
            self.lambda_min_q - 2.0 * est.sigma_hat * self.lambda_max_p,
            est,
        ))
    }

    /// Geometric bisection for the largest radius with positive margin.
    fn run(&self) -> Result<(f64, f64, SigmaEstimate)> {
        let (lo0, hi0) = GAMMA_SEARCH_RANGE;
        let (margin_hi, est_hi) = self.margin_at(hi0)?;
        if margin_hi > 0.0 {
            return Ok((hi0, margin_hi, est_hi));
        }
        let (margin_lo, est_lo) = self.margin_at(lo0)?;
        if margin_lo <= 0.0 {
            return Err(CraneError::NoValidRadius);
        }
        let mut lo = lo0;
        let mut best = (lo0, margin_lo, est_lo);
        let mut hi = hi0;
        for _ in 0..self.opts.max_bisections {
            let mid = (lo * hi).sqrt();
            let (margin, est) = self.margin_at(mid)?;
            if margin > 0.0 {
                lo = mid;
                best = (mid, margin, est);
            } else {
                hi = mid;
            }
        }
        Ok(best)
    }
}

/// Region-of-attraction certificate with default sampling options.
pub fn region_of_attraction(
    p: &CraneParams,
    model: &LinearModel,
    gain: &GainMatrix,
    q: &DMatrix<f64>,
) -> Result<RoaCertificate> {
    region_of_attraction_with(p, model, gain, q, &RoaOptions::default())
}

/// Region-of-attraction certificate: solve the Lyapunov equation for the
/// given weight `Q`, then search the radius interval for the largest tested
/// `gamma` whose sampled remainder bound keeps the margin positive.
pub fn region_of_attraction_with(
    p: &CraneParams,
    model: &LinearModel,
    gain: &GainMatrix,
    q: &DMatrix<f64>,
    opts: &RoaOptions,
) -> Result<RoaCertificate> {
    let a_cl = model.closed_loop_matrix(gain)?;
    let lyapunov = solve_lyapunov(&a_cl, q)?;
    let (lambda_min_q, _) = symmetric_eigen_bounds(q);
    let (_, lambda_max_p) = symmetric_eigen_bounds(&lyapunov);

    let search = RadiusSearch {
        f: closed_loop_fn(p, gain, model.variant),
        a_cl: &a_cl,
        lambda_min_q,
        lambda_max_p,
        opts: *opts,
    };
    let (gamma_hat, margin, est) = search.run()?;
    Ok(RoaCertificate {
        gain: gain.clone(),
        weight: q.clone(),
        lyapunov,
        sigma_hat: est.sigma_hat,
        gamma_hat,
        margin,
        lambda_min_q,
        lambda_max_p,
        n_samples: opts.n_samples,
        seed: opts.seed,
        rejected_samples: est.rejected,
    })
}

/// Derivative of the Lyapunov candidate along a vector field:
/// `2 x^T P f(x)`.
pub fn vdot_for<F>(f: F, p_matrix: &DMatrix<f64>, x: &StateVector) -> Result<f64>
where
    F: Fn(&StateVector) -> Result<StateVector>,
{
    let fx = f(x)?;
    let mut acc = 0.0;
    for r in 0..STATE_DIM {
        let mut row = 0.0;
        for c in 0..STATE_DIM {
            row += p_matrix[(r, c)] * fx[c];
        }
        acc += x[r] * row;
    }
    Ok(2.0 * acc)
}

/// Lyapunov derivative along the crane's closed loop.
pub fn vdot(
    p_matrix: &DMatrix<f64>,
    params: &CraneParams,
    gain: &GainMatrix,
    variant: ActuationVariant,
    x: &State,
) -> Result<f64> {
    if gain.variant != variant {
        return Err(CraneError::InvalidInput("gain variant mismatch".into()));
    }
    vdot_for(
        closed_loop_fn(params, gain, variant),
        p_matrix,
        x.as_vector(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmodel::analytic_linearization;
    use crate::synthesis::PoleSet;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn reference_closed_loop() -> (CraneParams, LinearModel, GainMatrix) {
        let p = CraneParams::default();
        let model = analytic_linearization(&p, ActuationVariant::Underactuated).unwrap();
        let gain = model.place(&PoleSet::default()).unwrap();
        (p, model, gain)
    }

    #[test]
    fn lyapunov_diagonal_case() {
        let a = DMatrix::<f64>::identity(8, 8) * -0.5;
        let q = DMatrix::<f64>::identity(8, 8);
        let p = solve_lyapunov(&a, &q).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                let expected = if r == c { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(p[(r, c)], expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn lyapunov_two_state_hand_solution() {
        // A = [[0, 1], [-2, -3]], Q = I: solving the three scalar equations
        // by hand gives P = [[1.25, 0.25], [0.25, 0.25]].
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -2.0, -3.0]);
        let q = DMatrix::<f64>::identity(2, 2);
        let p = solve_lyapunov(&a, &q).unwrap();
        assert_abs_diff_eq!(p[(0, 0)], 1.25, epsilon = 1e-10);
        assert_abs_diff_eq!(p[(0, 1)], 0.25, epsilon = 1e-10);
        assert_abs_diff_eq!(p[(1, 0)], 0.25, epsilon = 1e-10);
        assert_abs_diff_eq!(p[(1, 1)], 0.25, epsilon = 1e-10);
        let residual = (&p * &a + a.transpose() * &p + &q)
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(residual <= 1e-10);
    }

    #[test]
    fn lyapunov_rejects_unstable() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 1.0]);
        let q = DMatrix::<f64>::identity(2, 2);
        match solve_lyapunov(&a, &q) {
            Err(CraneError::NotHurwitz { .. }) => {}
            other => panic!("expected NotHurwitz, got {other:?}"),
        }
    }

    #[test]
    fn lyapunov_reference_closed_loop() {
        let (_, model, gain) = reference_closed_loop();
        let a_cl = model.closed_loop_matrix(&gain).unwrap();
        let q = DMatrix::<f64>::identity(8, 8);
        let p = solve_lyapunov(&a_cl, &q).unwrap();
        let residual = (&p * &a_cl + a_cl.transpose() * &p + &q)
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(residual <= 1e-8);
        let (min_eig, _) = symmetric_eigen_bounds(&p);
        assert!(min_eig > 0.0);
    }

    #[test]
    fn sigma_zero_for_linear_field() {
        let (_, model, gain) = reference_closed_loop();
        let a_cl = model.closed_loop_matrix(&gain).unwrap();
        let a_copy = a_cl.clone();
        let linear = move |x: &StateVector| -> Result<StateVector> {
            let mut out = StateVector::zeros();
            for r in 0..STATE_DIM {
                for c in 0..STATE_DIM {
                    out[r] += a_copy[(r, c)] * x[c];
                }
            }
            Ok(out)
        };
        let est = estimate_sigma_for(linear, &a_cl, 1.0, 500, 7).unwrap();
        assert_eq!(est.sigma_hat, 0.0);
        assert_eq!(est.rejected, 0);
    }

    #[test]
    fn sigma_scales_linearly_near_origin() {
        let (p, _, gain) = reference_closed_loop();
        let mut previous: Option<f64> = None;
        for gamma in [1e-2, 1e-4, 1e-6] {
            let est =
                estimate_sigma(&p, &gain, ActuationVariant::Underactuated, gamma, 2000, 7).unwrap();
            if let Some(prev) = previous {
                // One hundredfold smaller ball: the remainder ratio drops by
                // roughly the same factor (second-order remainder).
                let drop = prev / est.sigma_hat;
                assert!((20.0..500.0).contains(&drop), "drop {drop}");
            }
            previous = Some(est.sigma_hat);
        }
        // The quadratic coefficient of the remainder is of order 1e3 for
        // this gain, so the ratio at gamma = 1e-6 sits near 1e-3.
        assert!(previous.unwrap() <= 1e-2);
    }

    #[test]
    fn sigma_nondecreasing_in_gamma() {
        let (p, _, gain) = reference_closed_loop();
        let gammas = [1e-4, 1e-3, 1e-2, 1e-1];
        let mut last = 0.0;
        for gamma in gammas {
            let est = estimate_sigma(&p, &gain, ActuationVariant::Underactuated, gamma, 3000, 11)
                .unwrap();
            assert!(
                est.sigma_hat >= last,
                "sigma decreased: {} -> {} at gamma {gamma}",
                last,
                est.sigma_hat
            );
            last = est.sigma_hat;
        }
    }

    #[test]
    fn roa_certificate_reference_setup() {
        let (p, model, gain) = reference_closed_loop();
        let q = DMatrix::<f64>::identity(8, 8);
        let opts = RoaOptions {
            n_samples: 4000,
            seed: DEFAULT_CERTIFY_SEED,
            max_bisections: 20,
        };
        let cert = region_of_attraction_with(&p, &model, &gain, &q, &opts).unwrap();
        assert!(cert.is_valid());
        assert!(cert.gamma_hat > 0.0);
        assert!(cert.margin > 0.0);
        assert!(cert.lambda_max_p > cert.lambda_min_q.min(1.0) * 0.0);
        // vdot is negative at fresh samples inside the certified ball.
        let mut rng = ChaCha8Rng::seed_from_u64(777);
        for _ in 0..2000 {
            let x = ball_sample(&mut rng, cert.gamma_hat);
            let vd = vdot(
                &cert.lyapunov,
                &p,
                &gain,
                ActuationVariant::Underactuated,
                &State::from_vector(x),
            )
            .unwrap();
            assert!(vd < 0.0, "vdot = {vd} at |x| = {}", x.norm());
        }
    }

    #[test]
    fn roa_linear_system_hits_upper_bound() {
        let (p, model, gain) = reference_closed_loop();
        let a_cl = model.closed_loop_matrix(&gain).unwrap();
        let q = DMatrix::<f64>::identity(8, 8);
        let lyapunov = solve_lyapunov(&a_cl, &q).unwrap();
        let (lmin, _) = symmetric_eigen_bounds(&q);
        let (_, lmax) = symmetric_eigen_bounds(&lyapunov);
        let a_copy = a_cl.clone();
        let linear = move |x: &StateVector| -> Result<StateVector> {
            let mut out = StateVector::zeros();
            for r in 0..STATE_DIM {
                for c in 0..STATE_DIM {
                    out[r] += a_copy[(r, c)] * x[c];
                }
            }
            Ok(out)
        };
        let search = RadiusSearch {
            f: linear,
            a_cl: &a_cl,
            lambda_min_q: lmin,
            lambda_max_p: lmax,
            opts: RoaOptions {
                n_samples: 200,
                seed: 3,
                max_bisections: 10,
            },
        };
        let (gamma, margin, _) = search.run().unwrap();
        assert_eq!(gamma, GAMMA_SEARCH_RANGE.1);
        assert!(margin > 0.0);
        // The crane itself is nonlinear: the certified radius stays strictly
        // inside the interval.
        let full = region_of_attraction_with(
            &p,
            &model,
            &gain,
            &q,
            &RoaOptions {
                n_samples: 2000,
                seed: 3,
                max_bisections: 16,
            },
        )
        .unwrap();
        assert!(full.gamma_hat < GAMMA_SEARCH_RANGE.1);
    }

    #[test]
    fn bound_chain_holds_at_certification_samples() {
        let (p, model, gain) = reference_closed_loop();
        let q = DMatrix::<f64>::identity(8, 8);
        let opts = RoaOptions {
            n_samples: 2000,
            seed: 21,
            max_bisections: 14,
        };
        let cert = region_of_attraction_with(&p, &model, &gain, &q, &opts).unwrap();
        // Redraw the certification's own sample streams at gamma_hat: for
        // those points the sampled remainder bound applies pointwise, so
        // vdot(x) <= -margin |x|^2 within tolerance.
        for i in 0..opts.n_samples {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            let x = ball_sample(&mut rng, cert.gamma_hat);
            let vd = vdot(
                &cert.lyapunov,
                &p,
                &gain,
                ActuationVariant::Underactuated,
                &State::from_vector(x),
            )
            .unwrap();
            let bound = -cert.margin * x.norm_squared() + 1e-8;
            assert!(vd <= bound, "vdot {vd:.3e} above bound {bound:.3e}");
        }
    }

    #[test]
    fn roa_weight_scaling_leaves_radius_unchanged() {
        let (p, model, gain) = reference_closed_loop();
        let opts = RoaOptions {
            n_samples: 1500,
            seed: 5,
            max_bisections: 14,
        };
        let q1 = DMatrix::<f64>::identity(8, 8);
        // Power-of-two scale: the whole pipeline scales exactly.
        let q4 = &q1 * 4.0;
        let c1 = region_of_attraction_with(&p, &model, &gain, &q1, &opts).unwrap();
        let c4 = region_of_attraction_with(&p, &model, &gain, &q4, &opts).unwrap();
        assert_eq!(c1.gamma_hat, c4.gamma_hat);
        assert_relative_eq!(c4.margin, 4.0 * c1.margin, max_relative = 1e-9);
        assert_relative_eq!(c4.lambda_max_p, 4.0 * c1.lambda_max_p, max_relative = 1e-9);
    }

    #[test]
    fn vdot_zero_at_origin_and_linear_identity() {
        let (p, model, gain) = reference_closed_loop();
        let a_cl = model.closed_loop_matrix(&gain).unwrap();
        let q = DMatrix::<f64>::identity(8, 8);
        let lyapunov = solve_lyapunov(&a_cl, &q).unwrap();
        let vd0 = vdot(
            &lyapunov,
            &p,
            &gain,
            ActuationVariant::Underactuated,
            &State::zero(),
        )
        .unwrap();
        assert_eq!(vd0, 0.0);

        // For the linear field, vdot equals -x^T Q x.
        let a_copy = a_cl.clone();
        let linear = move |x: &StateVector| -> Result<StateVector> {
            let mut out = StateVector::zeros();
            for r in 0..STATE_DIM {
                for c in 0..STATE_DIM {
                    out[r] += a_copy[(r, c)] * x[c];
                }
            }
            Ok(out)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let x = ball_sample(&mut rng, 2.0);
            let vd = vdot_for(&linear, &lyapunov, &x).unwrap();
            let quad: f64 = -x.dot(&x);
            assert_relative_eq!(vd, quad, max_relative = 1e-9);
        }
    }
}
