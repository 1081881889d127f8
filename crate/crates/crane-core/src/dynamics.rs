//! Nonlinear equations of motion in mass-matrix form, the closed-form
//! singularity quantities `delta` and `theta_l1`, the gravity-compensating
//! hoist feedforward, and the system energies.
//!
//! The accelerations are obtained by solving `M(q) qdd + h(q, qd) = F`
//! rather than by transcribing the expanded closed-form fractions; the two
//! routes are algebraically identical and the mass-matrix route is far less
//! error-prone. `delta` (the common denominator of the expanded forms,
//! equal to `2 det M(q)`) and `theta_l1` (the feedforward denominator) are
//! kept verbatim as independent cross-check quantities.

use crate::error::{CraneError, Result};
use crate::types::{
    ActuationVariant, ControlInput, CraneParams, GeneralizedForces, State, StateVector,
};
use nalgebra::{Matrix4, Vector4};

/// Condition-estimate threshold beyond which the mass matrix is treated as
/// numerically singular. Chosen for double-precision headroom.
pub const SINGULARITY_CONDITION_LIMIT: f64 = 1e12;

/// Relative threshold on the feedforward denominator `theta_l1`.
const THETA_RELATIVE_FLOOR: f64 = 1e-12;

/// Symmetric mass matrix `M(q)` of the Lagrange equations, rows ordered
/// `(z, l1, theta1, theta2)`.
pub fn mass_matrix(p: &CraneParams, q: &Vector4<f64>) -> Matrix4<f64> {
    let l1 = q[1];
    let th1 = q[2];
    let th2 = q[3];
    let mh = p.hook_mass;
    let mp = p.payload_mass;
    let hanging = mh + mp;
    let l2 = p.payload_rope;

    let m12 = hanging * th1.sin();
    let m13 = hanging * l1 * th1.cos();
    let m14 = l2 * mp * th2.cos();
    let m24 = l2 * mp * (th1 - th2).sin();
    let m34 = l2 * mp * l1 * (th1 - th2).cos();

    Matrix4::new(
        p.total_mass(),
        m12,
        m13,
        m14,
        m12,
        hanging,
        0.0,
        m24,
        m13,
        0.0,
        p.hook_inertia + hanging * l1 * l1,
        m34,
        m14,
        m24,
        m34,
        p.payload_inertia + l2 * l2 * mp,
    )
}

/// Coriolis, centrifugal and gravity terms `h(q, qd)` collected so that
/// `M(q) qdd + h(q, qd) = F` reproduces the four equations of motion.
pub fn bias_vector(p: &CraneParams, s: &State) -> Vector4<f64> {
    let l1 = s.hoist_len();
    let th1 = s.hook_angle();
    let th2 = s.payload_angle();
    let dl1 = s.hoist_vel();
    let dth1 = s.hook_rate();
    let dth2 = s.payload_rate();

    let mp = p.payload_mass;
    let hanging = p.hanging_mass();
    let l2 = p.payload_rope;
    let g = p.gravity;

    Vector4::new(
        -hanging * th1.sin() * l1 * dth1 * dth1 + 2.0 * hanging * th1.cos() * dl1 * dth1
            - l2 * mp * th2.sin() * dth2 * dth2,
        -g * hanging * th1.cos()
            - hanging * l1 * dth1 * dth1
            - l2 * mp * (th1 - th2).cos() * dth2 * dth2,
        2.0 * hanging * l1 * dl1 * dth1
            + g * hanging * l1 * th1.sin()
            + l2 * mp * l1 * (th1 - th2).sin() * dth2 * dth2,
        g * l2 * mp * th2.sin() - l2 * mp * l1 * (th1 - th2).sin() * dth1 * dth1
            + 2.0 * l2 * mp * (th1 - th2).cos() * dl1 * dth1,
    )
}

/// Solves `M(q) x = rhs` after a spectral condition estimate. The mass
/// matrix is symmetric, so its eigendecomposition doubles as the solver.
fn solve_mass_system(
    p: &CraneParams,
    q: &Vector4<f64>,
    rhs: &Vector4<f64>,
) -> Result<Vector4<f64>> {
    let m = mass_matrix(p, q);
    let eig = m.symmetric_eigen();
    let mut max_abs = 0.0_f64;
    let mut min_abs = f64::INFINITY;
    for &lambda in eig.eigenvalues.iter() {
        max_abs = max_abs.max(lambda.abs());
        min_abs = min_abs.min(lambda.abs());
    }
    let condition = if min_abs > 0.0 {
        max_abs / min_abs
    } else {
        f64::INFINITY
    };
    if !condition.is_finite() || condition > SINGULARITY_CONDITION_LIMIT {
        return Err(CraneError::SingularConfiguration { condition });
    }
    let mut y = eig.eigenvectors.transpose() * rhs;
    for i in 0..4 {
        y[i] /= eig.eigenvalues[i];
    }
    Ok(eig.eigenvectors * y)
}

/// Generalized accelerations `qdd = M(q)^-1 (F - h(q, qd))`.
pub fn accel(p: &CraneParams, s: &State, f: &GeneralizedForces) -> Result<Vector4<f64>> {
    solve_mass_system(p, &s.coords(), &(f.as_vector() - bias_vector(p, s)))
}

/// Common denominator of the expanded acceleration fractions, evaluated
/// verbatim in `(x2, x3, x4) = (l1, theta1, theta2)`. Equals `2 det M(q)`;
/// with `I_h = 0` it is of order `O(l1^2)`, which is the source of the
/// singularity as the hook reaches the trolley.
pub fn delta(p: &CraneParams, s: &State) -> f64 {
    let x2 = s.hoist_len();
    let x3 = s.hook_angle();
    let x4 = s.payload_angle();
    let m = p.trolley_mass;
    let mh = p.hook_mass;
    let mp = p.payload_mass;
    let ih = p.hook_inertia;
    let ip = p.payload_inertia;
    let l2 = p.payload_rope;
    let l2sq = l2 * l2;
    let x2sq = x2 * x2;

    ih * ip * mh * mh
        + ih * ip * mp * mp
        + ih * m * l2sq * mp * mp
        + 2.0 * ip * m * mh * mh * x2sq
        + 2.0 * ip * m * mp * mp * x2sq
        + 2.0 * ih * ip * m * mh
        + 2.0 * ih * ip * m * mp
        + ih * l2sq * mh * mp * mp
        + ih * l2sq * mh * mh * mp
        + 2.0 * ih * ip * mh * mp
        + ih * ip * mh * mh * (2.0 * x3).cos()
        + ih * ip * mp * mp * (2.0 * x3).cos()
        + ih * m * l2sq * mp * mp * (2.0 * x3 - 2.0 * x4).cos()
        + 2.0 * ih * ip * mh * mp * (2.0 * x3).cos()
        + 2.0 * m * l2sq * mh * mp * mp * x2sq
        + 2.0 * m * l2sq * mh * mh * mp * x2sq
        + 2.0 * ih * m * l2sq * mh * mp
        + 4.0 * ip * m * mh * mp * x2sq
        + ih * l2sq * mh * mp * mp * (2.0 * x3).cos()
        + ih * l2sq * mh * mh * mp * (2.0 * x3).cos()
}

/// Denominator of the hoist feedforward law, evaluated verbatim in
/// `x4 = theta2`. Carries a global `I_h` factor.
pub fn theta_l1(p: &CraneParams, s: &State) -> f64 {
    let x4 = s.payload_angle();
    let m = p.trolley_mass;
    let mh = p.hook_mass;
    let mp = p.payload_mass;
    let ip = p.payload_inertia;
    let l2sq = p.payload_rope * p.payload_rope;

    p.hook_inertia
        * (2.0 * ip * mh + 2.0 * ip * mp + 2.0 * ip * m + l2sq * mp * mp + 2.0 * l2sq * mh * mp
            - l2sq * mp * mp * (2.0 * x4).cos()
            + 2.0 * m * l2sq * mp)
}

/// Magnitude scale of `theta_l1` (its value with every cosine replaced by
/// one in absolute value), used for the relative singularity check.
fn theta_l1_scale(p: &CraneParams) -> f64 {
    let m = p.trolley_mass;
    let mh = p.hook_mass;
    let mp = p.payload_mass;
    let ip = p.payload_inertia;
    let l2sq = p.payload_rope * p.payload_rope;
    p.hook_inertia.abs()
        * (2.0 * ip * mh
            + 2.0 * ip * mp
            + 2.0 * ip * m
            + 2.0 * l2sq * mp * mp
            + 2.0 * l2sq * mh * mp
            + 2.0 * m * l2sq * mp)
}

/// Hoist force law: cancels the gravity terms of the hoist equation so the
/// origin is an equilibrium of the closed loop, with `u2` entering linearly
/// as an offset. At the origin it reduces to `-g (m_h + m_p)`.
pub fn feedforward_hoist_force(p: &CraneParams, s: &State, hoist_offset: f64) -> Result<f64> {
    let theta = theta_l1(p, s);
    let scale = theta_l1_scale(p);
    if theta.abs() < THETA_RELATIVE_FLOOR * scale.max(f64::MIN_POSITIVE) {
        return Err(CraneError::SingularConfiguration {
            condition: theta.abs(),
        });
    }
    let x3 = s.hook_angle();
    let x4 = s.payload_angle();
    let m = p.trolley_mass;
    let mh = p.hook_mass;
    let mp = p.payload_mass;
    let ih = p.hook_inertia;
    let ip = p.payload_inertia;
    let l2sq = p.payload_rope * p.payload_rope;
    let g = p.gravity;
    let cos3 = x3.cos();

    let numerator = 2.0 * ih * ip * g * mh * mh * cos3 - hoist_offset
        + 2.0 * ih * ip * g * mp * mp * cos3
        + ih * m * g * l2sq * mp * mp * (x3 - 2.0 * x4).cos()
        + 4.0 * ih * ip * g * mh * mp * cos3
        + ih * m * g * l2sq * mp * mp * cos3
        + 2.0 * ih * ip * m * g * mh * cos3
        + 2.0 * ih * ip * m * g * mp * cos3
        + 2.0 * ih * g * l2sq * mh * mp * mp * cos3
        + 2.0 * ih * g * l2sq * mh * mh * mp * cos3
        + 2.0 * ih * m * g * l2sq * mh * mp * cos3;
    Ok(-numerator / theta)
}

/// The hoist feedforward minus the gravity part of the hoist bias, in a
/// factored form whose terms all vanish identically at the origin. Used by
/// the closed-loop vector field so that the origin is an exact equilibrium
/// in floating point, not just up to rounding of two large cancelling terms.
fn hoist_residual(p: &CraneParams, s: &State, hoist_offset: f64) -> Result<f64> {
    let theta = theta_l1(p, s);
    let scale = theta_l1_scale(p);
    if theta.abs() < THETA_RELATIVE_FLOOR * scale.max(f64::MIN_POSITIVE) {
        return Err(CraneError::SingularConfiguration {
            condition: theta.abs(),
        });
    }
    let x3 = s.hook_angle();
    let x4 = s.payload_angle();
    let mp = p.payload_mass;
    let l2sq = p.payload_rope * p.payload_rope;
    let gravity_defect = p.gravity
        * p.hook_inertia
        * l2sq
        * mp
        * mp
        * (p.trolley_mass * (x3.cos() - (x3 - 2.0 * x4).cos())
            + p.hanging_mass() * (1.0 - (2.0 * x4).cos()) * x3.cos());
    Ok((hoist_offset + gravity_defect) / theta)
}

/// Closed-loop vector field `xdot = G(x, u)`: the kinematic half feeds the
/// rates through, the dynamic half solves the mass-matrix system with
/// forces `(u1, F_l1(x, u2), u3, u4 or 0)` where `F_l1` is the hoist
/// feedforward. Satisfies `G(0, 0) = 0` exactly.
pub fn vector_field(
    p: &CraneParams,
    s: &State,
    u: &ControlInput,
    variant: ActuationVariant,
) -> Result<StateVector> {
    if u.variant() != variant {
        return Err(CraneError::InvalidInput(format!(
            "control input shape ({}) does not match actuation variant ({variant})",
            u.variant()
        )));
    }
    let bias = bias_vector(p, s);
    // The hoist row combines the feedforward and the gravity bias in factored
    // form; the remaining rows take forces and bias separately.
    let rhs = Vector4::new(
        u.trolley - bias[0],
        hoist_residual(p, s, u.hoist_offset)?
            + p.hanging_mass() * s.hoist_len() * s.hook_rate() * s.hook_rate()
            + p.payload_rope
                * p.payload_mass
                * (s.hook_angle() - s.payload_angle()).cos()
                * s.payload_rate()
                * s.payload_rate(),
        u.hook - bias[2],
        u.payload.unwrap_or(0.0) - bias[3],
    );
    let qdd = solve_mass_system(p, &s.coords(), &rhs)?;
    let mut out = StateVector::zeros();
    for i in 0..4 {
        out[i] = s.as_vector()[4 + i];
        out[4 + i] = qdd[i];
    }
    Ok(out)
}

/// Realized generalized forces for a given state and control input: the
/// trolley, hook and payload channels pass the inputs through and the hoist
/// channel evaluates the feedforward law.
pub fn realized_forces(p: &CraneParams, s: &State, u: &ControlInput) -> Result<GeneralizedForces> {
    Ok(GeneralizedForces {
        trolley: u.trolley,
        hoist: feedforward_hoist_force(p, s, u.hoist_offset)?,
        hook: u.hook,
        payload: u.payload.unwrap_or(0.0),
    })
}

/// Kinetic and potential energy of the full system. The potential reference
/// is chosen so that `PE = 0` when both angles are at a right angle to the
/// vertical.
pub fn energy(p: &CraneParams, s: &State) -> (f64, f64) {
    let l1 = s.hoist_len();
    let th1 = s.hook_angle();
    let th2 = s.payload_angle();
    let dz = s.trolley_vel();
    let dl1 = s.hoist_vel();
    let dth1 = s.hook_rate();
    let dth2 = s.payload_rate();
    let l2 = p.payload_rope;

    // Hook and payload center-of-mass velocities by the chain rule.
    let hook_z_vel = dz + dl1 * th1.sin() + l1 * th1.cos() * dth1;
    let hook_y_vel = -dl1 * th1.cos() + l1 * th1.sin() * dth1;
    let payload_z_vel = hook_z_vel + l2 * th2.cos() * dth2;
    let payload_y_vel = hook_y_vel + l2 * th2.sin() * dth2;

    let kinetic = 0.5 * p.trolley_mass * dz * dz
        + 0.5 * p.hook_mass * (hook_z_vel * hook_z_vel + hook_y_vel * hook_y_vel)
        + 0.5 * p.hook_inertia * dth1 * dth1
        + 0.5 * p.payload_mass * (payload_z_vel * payload_z_vel + payload_y_vel * payload_y_vel)
        + 0.5 * p.payload_inertia * dth2 * dth2;

    let potential = -p.gravity * p.hook_mass * l1 * th1.cos()
        - p.gravity * p.payload_mass * (l1 * th1.cos() + l2 * th2.cos());

    (kinetic, potential)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params() -> CraneParams {
        CraneParams::default()
    }

    fn random_state(rng: &mut ChaCha8Rng, span: f64) -> State {
        let mut a = [0.0; 8];
        for v in &mut a {
            *v = rng.gen_range(-span..span);
        }
        State::from(a)
    }

    /// Term-by-term transcription of the four equations of motion, used as
    /// an independent oracle: given a state and candidate accelerations it
    /// returns the left-hand side of each equation.
    fn equation_lhs(p: &CraneParams, s: &State, qdd: &Vector4<f64>) -> Vector4<f64> {
        let (m, mh, mp) = (p.trolley_mass, p.hook_mass, p.payload_mass);
        let (ih, ip, l2, g) = (p.hook_inertia, p.payload_inertia, p.payload_rope, p.gravity);
        let (l1, th1, th2) = (s.hoist_len(), s.hook_angle(), s.payload_angle());
        let (dl1, dth1, dth2) = (s.hoist_vel(), s.hook_rate(), s.payload_rate());
        let (zdd, l1dd, th1dd, th2dd) = (qdd[0], qdd[1], qdd[2], qdd[3]);

        let eq_z = m * zdd + mh * zdd + mp * zdd + mh * th1.sin() * l1dd + mp * th1.sin() * l1dd
            - mh * th1.sin() * l1 * dth1 * dth1
            - mp * th1.sin() * l1 * dth1 * dth1
            + mh * th1.cos() * l1 * th1dd
            + mp * th1.cos() * l1 * th1dd
            + 2.0 * mh * th1.cos() * dl1 * dth1
            + 2.0 * mp * th1.cos() * dl1 * dth1
            - l2 * mp * th2.sin() * dth2 * dth2
            + l2 * mp * th2.cos() * th2dd;

        let eq_l1 = mh * l1dd + mp * l1dd + mh * th1.sin() * zdd + mp * th1.sin() * zdd
            - g * mh * th1.cos()
            - g * mp * th1.cos()
            - mh * l1 * dth1 * dth1
            - mp * l1 * dth1 * dth1
            - l2 * mp * (th1 - th2).cos() * dth2 * dth2
            + l2 * mp * (th1 - th2).sin() * th2dd;

        let eq_th1 = ih * th1dd
            + mh * l1 * l1 * th1dd
            + mp * l1 * l1 * th1dd
            + mh * th1.cos() * l1 * zdd
            + mp * th1.cos() * l1 * zdd
            + 2.0 * mh * l1 * dl1 * dth1
            + 2.0 * mp * l1 * dl1 * dth1
            + g * mh * th1.sin() * l1
            + g * mp * th1.sin() * l1
            + l2 * mp * l1 * (th1 - th2).sin() * dth2 * dth2
            + l2 * mp * l1 * (th1 - th2).cos() * th2dd;

        let eq_th2 = ip * th2dd
            + l2 * l2 * mp * th2dd
            + l2 * mp * (th1 - th2).sin() * l1dd
            + l2 * mp * th2.cos() * zdd
            + g * l2 * mp * th2.sin()
            - l2 * mp * l1 * (th1 - th2).sin() * dth1 * dth1
            + l2 * mp * l1 * (th1 - th2).cos() * th1dd
            + 2.0 * l2 * mp * (th1 - th2).cos() * dl1 * dth1;

        Vector4::new(eq_z, eq_l1, eq_th1, eq_th2)
    }

    #[test]
    fn mass_matrix_reference_entries() {
        let m = mass_matrix(&params(), &Vector4::new(0.0, 0.2, 0.0, 0.0));
        assert_relative_eq!(m[(0, 0)], 10.3, max_relative = 1e-15);
        assert_relative_eq!(m[(3, 3)], 44.0, max_relative = 1e-15);
        assert_relative_eq!(m[(2, 3)], 4.0, max_relative = 1e-15);
        assert_eq!(m[(1, 2)], 0.0);
    }

    #[test]
    fn mass_matrix_symmetric_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let q = Vector4::from_fn(|_, _| rng.gen_range(-10.0..10.0));
            let m = mass_matrix(&params(), &q);
            assert_eq!(m, m.transpose());
        }
    }

    #[test]
    fn mass_matrix_positive_definite_over_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..500 {
            let q = Vector4::from_fn(|_, _| rng.gen_range(-10.0..10.0));
            let m = mass_matrix(&params(), &q);
            let eig = m.symmetric_eigen();
            assert!(
                eig.eigenvalues.iter().all(|&l| l > 0.0),
                "not positive definite at q = {q:?}: {:?}",
                eig.eigenvalues
            );
        }
    }

    #[test]
    fn mass_matrix_singular_without_hook_inertia_at_zero_length() {
        let p = CraneParams {
            hook_inertia: 0.0,
            ..params()
        };
        let m = mass_matrix(&p, &Vector4::new(0.0, 0.0, 0.0, 0.0));
        for j in 0..4 {
            assert_eq!(m[(2, j)], 0.0);
            assert_eq!(m[(j, 2)], 0.0);
        }
    }

    #[test]
    fn bias_at_rest_is_pure_gravity() {
        let p = params();
        let expected = -p.gravity * p.hanging_mass();
        let h = bias_vector(&p, &State::zero());
        assert_eq!(h, Vector4::new(0.0, expected, 0.0, 0.0));
        // Hanging straight down at any length: still only the gravity term.
        let h = bias_vector(&p, &State::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(h, Vector4::new(0.0, expected, 0.0, 0.0));
    }

    #[test]
    fn lagrange_residual_against_termwise_oracle() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let s = random_state(&mut rng, 3.0);
            let f = GeneralizedForces::new(
                rng.gen_range(-200.0..200.0),
                rng.gen_range(-200.0..200.0),
                rng.gen_range(-200.0..200.0),
                rng.gen_range(-200.0..200.0),
            );
            let qdd = accel(&p, &s, &f).unwrap();
            let lhs = equation_lhs(&p, &s, &qdd);
            let scale = f.as_vector().norm().max(1.0);
            for i in 0..4 {
                assert_abs_diff_eq!(lhs[i], f.as_vector()[i], epsilon = 1e-10 * scale);
            }
        }
    }

    #[test]
    fn accel_static_hover_is_exact_zero() {
        let p = params();
        let f = GeneralizedForces::new(0.0, -p.gravity * p.hanging_mass(), 0.0, 0.0);
        let qdd = accel(&p, &State::zero(), &f).unwrap();
        assert_eq!(qdd, Vector4::zeros());
    }

    #[test]
    fn accel_free_fall_stretches_rope() {
        let p = params();
        // Independent dense solve of the 4x4 system as oracle.
        let s = State::zero();
        let rhs = -bias_vector(&p, &s);
        let expected = mass_matrix(&p, &s.coords()).lu().solve(&rhs).unwrap();
        let qdd = accel(&p, &s, &GeneralizedForces::zero()).unwrap();
        let scale = expected.norm().max(1.0);
        for i in 0..4 {
            assert_abs_diff_eq!(qdd[i], expected[i], epsilon = 1e-12 * scale);
        }
        assert!(qdd[1] > 0.0, "unsupported rope must extend, got {qdd:?}");
    }

    #[test]
    fn accel_detects_singular_configuration() {
        let p = CraneParams {
            hook_inertia: 0.0,
            ..params()
        };
        let s = State::new(0.0, 1e-9, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        match accel(&p, &s, &GeneralizedForces::zero()) {
            Err(CraneError::SingularConfiguration { .. }) => {}
            other => panic!("expected SingularConfiguration, got {other:?}"),
        }
    }

    #[test]
    fn delta_reference_value_and_closed_form() {
        let p = params();
        let d0 = delta(&p, &State::zero());
        assert_relative_eq!(d0, 53.732, max_relative = 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..100 {
            let p = CraneParams {
                trolley_mass: rng.gen_range(0.05..5.0),
                hook_mass: rng.gen_range(0.05..5.0),
                payload_mass: rng.gen_range(0.5..20.0),
                hook_inertia: rng.gen_range(0.01..10.0),
                payload_inertia: rng.gen_range(0.01..10.0),
                payload_rope: rng.gen_range(0.5..4.0),
                gravity: 9.81,
            };
            let closed = 2.0
                * p.hook_inertia
                * p.hanging_mass()
                * (p.payload_inertia * p.total_mass()
                    + p.payload_rope * p.payload_rope * p.hook_mass * p.payload_mass
                    + p.trolley_mass * p.payload_rope * p.payload_rope * p.payload_mass);
            assert_relative_eq!(delta(&p, &State::zero()), closed, max_relative = 1e-12);
        }
    }

    #[test]
    fn delta_vanishes_without_hook_inertia_at_zero_length() {
        let p = CraneParams {
            hook_inertia: 0.0,
            ..params()
        };
        let s = State::new(5.0, 0.0, 1.2, -0.7, 1.0, 2.0, 3.0, 4.0);
        assert_eq!(delta(&p, &s), 0.0);
    }

    #[test]
    fn delta_matches_determinant_up_to_fixed_factor() {
        let p = params();
        // The factor is pinned once at the origin, then must hold everywhere.
        let factor = delta(&p, &State::zero()) / mass_matrix(&p, &Vector4::zeros()).determinant();
        assert_relative_eq!(factor, 2.0, max_relative = 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..300 {
            let s = random_state(&mut rng, 3.0);
            let det = mass_matrix(&p, &s.coords()).determinant();
            assert_relative_eq!(delta(&p, &s), factor * det, max_relative = 1e-9);
        }
    }

    #[test]
    fn delta_order_in_hoist_length_without_hook_inertia() {
        let p = CraneParams {
            hook_inertia: 0.0,
            ..params()
        };
        let ratio = |x2: f64| {
            let s = State::new(0.0, x2, 0.4, -0.3, 0.0, 0.0, 0.0, 0.0);
            delta(&p, &s) / (x2 * x2)
        };
        let r1 = ratio(1e-1);
        let r2 = ratio(1e-2);
        let r3 = ratio(1e-3);
        assert!(r3.abs() > 0.0);
        assert!(
            ((r2 - r3) / r3).abs() < 0.01,
            "delta/x2^2 should stabilize: {r1} {r2} {r3}"
        );
    }

    #[test]
    fn theta_l1_reference_and_symmetry() {
        let p = params();
        // At the origin the two l2^2 mp^2 terms cancel and theta collapses
        // to 2 I_h D with D the payload-coupling denominator.
        let d = p.payload_inertia * p.total_mass()
            + p.payload_rope * p.payload_rope * p.hook_mass * p.payload_mass
            + p.trolley_mass * p.payload_rope * p.payload_rope * p.payload_mass;
        assert_relative_eq!(
            theta_l1(&p, &State::zero()),
            2.0 * p.hook_inertia * d,
            max_relative = 1e-12
        );

        let zero_ih = CraneParams {
            hook_inertia: 0.0,
            ..p
        };
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..50 {
            let s = random_state(&mut rng, 5.0);
            assert_eq!(theta_l1(&zero_ih, &s), 0.0);
        }

        let plus = State::new(
            0.0,
            0.0,
            0.0,
            std::f64::consts::FRAC_PI_2,
            0.0,
            0.0,
            0.0,
            0.0,
        );
        let minus = State::new(
            0.0,
            0.0,
            0.0,
            -std::f64::consts::FRAC_PI_2,
            0.0,
            0.0,
            0.0,
            0.0,
        );
        assert_eq!(theta_l1(&p, &plus), theta_l1(&p, &minus));
    }

    #[test]
    fn feedforward_reference_values() {
        let p = params();
        let at_rest = feedforward_hoist_force(&p, &State::zero(), 0.0).unwrap();
        assert_relative_eq!(at_rest, -p.gravity * p.hanging_mass(), max_relative = 1e-12);
        assert_relative_eq!(at_rest, -99.081, max_relative = 1e-12);

        // The offset enters linearly with coefficient 1/theta_l1.
        let c = 17.25;
        let with_offset = feedforward_hoist_force(&p, &State::zero(), c).unwrap();
        let theta0 = theta_l1(&p, &State::zero());
        assert_relative_eq!(with_offset, at_rest + c / theta0, max_relative = 1e-12);

        // Hook at right angle with payload hanging straight: all numerator
        // terms carry a vanishing cosine.
        let right_angle = State::new(
            0.0,
            0.0,
            std::f64::consts::FRAC_PI_2,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        );
        assert_abs_diff_eq!(
            feedforward_hoist_force(&p, &right_angle, 0.0).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn feedforward_requires_hook_inertia() {
        let p = CraneParams {
            hook_inertia: 0.0,
            ..params()
        };
        match feedforward_hoist_force(&p, &State::zero(), 0.0) {
            Err(CraneError::SingularConfiguration { .. }) => {}
            other => panic!("expected SingularConfiguration, got {other:?}"),
        }
    }

    #[test]
    fn hoist_residual_matches_direct_combination() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..500 {
            let s = random_state(&mut rng, 3.0);
            let u2 = rng.gen_range(-100.0..100.0);
            let direct = feedforward_hoist_force(&p, &s, u2).unwrap()
                + p.gravity * p.hanging_mass() * s.hook_angle().cos();
            let factored = hoist_residual(&p, &s, u2).unwrap();
            assert_abs_diff_eq!(direct, factored, epsilon = 1e-10 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn vector_field_origin_is_exact_equilibrium() {
        let p = params();
        for variant in [
            ActuationVariant::Underactuated,
            ActuationVariant::FullyActuated,
        ] {
            let out =
                vector_field(&p, &State::zero(), &ControlInput::zero(variant), variant).unwrap();
            assert_eq!(out, StateVector::zeros(), "variant {variant}");
        }
    }

    #[test]
    fn vector_field_kinematic_identity() {
        let p = params();
        let s = State::new(0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0);
        let out = vector_field(
            &p,
            &s,
            &ControlInput::zero(ActuationVariant::Underactuated),
            ActuationVariant::Underactuated,
        )
        .unwrap();
        assert_eq!(out[0], 1.0);
        assert_eq!(out[1], 0.0);
        assert_eq!(out[2], 0.0);
        assert_eq!(out[3], 0.0);
    }

    #[test]
    fn variants_agree_when_payload_torque_is_zero() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for _ in 0..200 {
            let s = random_state(&mut rng, 2.0);
            let (u1, u2, u3) = (
                rng.gen_range(-50.0..50.0),
                rng.gen_range(-50.0..50.0),
                rng.gen_range(-50.0..50.0),
            );
            let under = vector_field(
                &p,
                &s,
                &ControlInput::underactuated(u1, u2, u3),
                ActuationVariant::Underactuated,
            )
            .unwrap();
            let full = vector_field(
                &p,
                &s,
                &ControlInput::fully_actuated(u1, u2, u3, 0.0),
                ActuationVariant::FullyActuated,
            )
            .unwrap();
            assert_eq!(under, full);
        }
    }

    #[test]
    fn vector_field_rejects_mismatched_input() {
        let p = params();
        let err = vector_field(
            &p,
            &State::zero(),
            &ControlInput::underactuated(0.0, 0.0, 0.0),
            ActuationVariant::FullyActuated,
        );
        assert!(matches!(err, Err(CraneError::InvalidInput(_))));
    }

    #[test]
    fn vector_field_matches_accel_with_realized_forces() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..200 {
            let s = random_state(&mut rng, 2.0);
            let u = ControlInput::fully_actuated(
                rng.gen_range(-50.0..50.0),
                rng.gen_range(-50.0..50.0),
                rng.gen_range(-50.0..50.0),
                rng.gen_range(-50.0..50.0),
            );
            let xdot = vector_field(&p, &s, &u, ActuationVariant::FullyActuated).unwrap();
            let f = realized_forces(&p, &s, &u).unwrap();
            let qdd = accel(&p, &s, &f).unwrap();
            for i in 0..4 {
                assert_abs_diff_eq!(xdot[4 + i], qdd[i], epsilon = 1e-8 * qdd[i].abs().max(1.0));
            }
        }
    }

    #[test]
    fn energy_reference_values() {
        let p = params();
        let hanging = State::new(0.0, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let (ke, pe) = energy(&p, &hanging);
        assert_eq!(ke, 0.0);
        assert_relative_eq!(pe, -9.81 * (0.1 * 0.2 + 10.0 * 2.2), max_relative = 1e-12);
        assert_relative_eq!(pe, -216.016, max_relative = 1e-5);

        let right_angles = State::new(
            3.0,
            1.5,
            std::f64::consts::FRAC_PI_2,
            std::f64::consts::FRAC_PI_2,
            0.0,
            0.0,
            0.0,
            0.0,
        );
        let (_, pe) = energy(&p, &right_angles);
        assert_abs_diff_eq!(pe, 0.0, epsilon = 1e-12);
    }
}
