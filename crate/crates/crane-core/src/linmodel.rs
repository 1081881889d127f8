//! Origin linearization of the control system: closed-form `A`, `B`
//! matrices and finite-difference Jacobians for cross-validation.

use crate::dynamics::vector_field;
use crate::error::Result;
use crate::types::{ActuationVariant, ControlInput, CraneParams, State, StateVector, STATE_DIM};
use nalgebra::DMatrix;

/// Linear model `xdot = A x + B u` about the stabilization target.
///
/// `A` is 8x8 and identical across variants; `B` is 8x3 for the
/// underactuated variant and gains one extra column when the payload torque
/// channel is present.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub variant: ActuationVariant,
}

impl LinearModel {
    pub fn state_dim(&self) -> usize {
        STATE_DIM
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }
}

/// Coupling denominator `D = I_p (M + m_h + m_p) + l2^2 m_h m_p + M l2^2 m_p`
/// shared by every nonzero entry of the closed-form linearization.
fn coupling_denominator(p: &CraneParams) -> f64 {
    p.payload_inertia * p.total_mass()
        + p.payload_rope * p.payload_rope * p.hook_mass * p.payload_mass
        + p.trolley_mass * p.payload_rope * p.payload_rope * p.payload_mass
}

/// Closed-form Jacobians of the vector field at the origin.
pub fn analytic_linearization(p: &CraneParams, variant: ActuationVariant) -> Result<LinearModel> {
    p.validate_for_synthesis()?;
    let d = coupling_denominator(p);
    let g = p.gravity;
    let l2 = p.payload_rope;
    let mp = p.payload_mass;

    let mut a = DMatrix::zeros(STATE_DIM, STATE_DIM);
    for i in 0..4 {
        a[(i, 4 + i)] = 1.0;
    }
    a[(4, 3)] = g * l2 * l2 * mp * mp / d;
    a[(7, 3)] = -g * l2 * mp * p.total_mass() / d;

    let m = variant.input_dim();
    let mut b = DMatrix::zeros(STATE_DIM, m);
    b[(4, 0)] = (mp * l2 * l2 + p.payload_inertia) / d;
    b[(5, 1)] = 1.0 / (2.0 * p.hook_inertia * p.hanging_mass() * d);
    b[(6, 2)] = 1.0 / p.hook_inertia;
    b[(7, 0)] = -l2 * mp / d;
    if variant == ActuationVariant::FullyActuated {
        b[(4, 3)] = -l2 * mp / d;
        b[(7, 3)] = p.total_mass() / d;
    }

    Ok(LinearModel { a, b, variant })
}

/// Central-difference step for coordinate `i` about a base value.
fn fd_step(base: f64) -> f64 {
    1e-6 * base.abs().max(1.0)
}

/// Numerical Jacobians of the vector field at the origin, by central
/// differences with per-coordinate step `1e-6 * max(1, |x_i|)`.
pub fn fd_linearization(p: &CraneParams, variant: ActuationVariant) -> Result<LinearModel> {
    p.validate_for_synthesis()?;
    let m = variant.input_dim();
    let mut a = DMatrix::zeros(STATE_DIM, STATE_DIM);
    let mut b = DMatrix::zeros(STATE_DIM, m);

    let eval = |x: &StateVector, u: &[f64]| -> Result<StateVector> {
        let input = match variant {
            ActuationVariant::Underactuated => ControlInput::underactuated(u[0], u[1], u[2]),
            ActuationVariant::FullyActuated => ControlInput::fully_actuated(u[0], u[1], u[2], u[3]),
        };
        vector_field(p, &State::from_vector(*x), &input, variant)
    };

    let u0 = vec![0.0; m];
    for i in 0..STATE_DIM {
        let h = fd_step(0.0);
        let mut plus = StateVector::zeros();
        let mut minus = StateVector::zeros();
        plus[i] = h;
        minus[i] = -h;
        let fp = eval(&plus, &u0)?;
        let fm = eval(&minus, &u0)?;
        let col = (fp - fm) / (2.0 * h);
        for r in 0..STATE_DIM {
            a[(r, i)] = col[r];
        }
    }
    let x0 = StateVector::zeros();
    for j in 0..m {
        let h = fd_step(0.0);
        let mut up = vec![0.0; m];
        let mut um = vec![0.0; m];
        up[j] = h;
        um[j] = -h;
        let fp = eval(&x0, &up)?;
        let fm = eval(&x0, &um)?;
        let col = (fp - fm) / (2.0 * h);
        for r in 0..STATE_DIM {
            b[(r, j)] = col[r];
        }
    }

    Ok(LinearModel { a, b, variant })
}
