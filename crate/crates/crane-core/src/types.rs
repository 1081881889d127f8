//! Domain types: physical parameters, state vector, generalized forces and
//! control inputs.
//!
//! The plant is a trolley of mass `M` carrying a hoist rope of variable
//! length `l1` to a hook (mass `m_h`, inertia `I_h`), from which a second
//! rope of fixed length `l2` suspends the payload (mass `m_p`, inertia
//! `I_p`). Generalized coordinates are `(z, l1, theta1, theta2)`: trolley
//! position, hoist length, hook angle and payload angle. All quantities are
//! in scaled units (the bundled reference data set carries an implicit 1e3
//! factor on masses and inertias; forces come out in the same scaled unit).

use crate::error::{CraneError, Result};
use nalgebra::{SVector, Vector4};

/// State dimension of the first-order model.
pub const STATE_DIM: usize = 8;

/// Raw 8-component state vector `(z, l1, theta1, theta2, dz, dl1, dtheta1, dtheta2)`.
pub type StateVector = SVector<f64, STATE_DIM>;

/// Physical constants of the crane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CraneParams {
    /// Trolley mass `M`.
    pub trolley_mass: f64,
    /// Hook mass `m_h`.
    pub hook_mass: f64,
    /// Payload mass `m_p`.
    pub payload_mass: f64,
    /// Hook moment of inertia about its center of mass `I_h`.
    pub hook_inertia: f64,
    /// Payload moment of inertia about its center of mass `I_p`.
    pub payload_inertia: f64,
    /// Fixed rope length from hook to payload `l2`.
    pub payload_rope: f64,
    /// Gravitational acceleration `g`.
    pub gravity: f64,
}

impl CraneParams {
    /// Total mass `M + m_h + m_p`.
    pub fn total_mass(&self) -> f64 {
        self.trolley_mass + self.hook_mass + self.payload_mass
    }

    /// Suspended mass `m_h + m_p` (everything hanging from the hoist rope).
    pub fn hanging_mass(&self) -> f64 {
        self.hook_mass + self.payload_mass
    }

    /// Checks the basic invariants: positive masses, rope length and
    /// gravity; non-negative inertias. Zero inertias are admitted so the
    /// singular limit can be studied.
    pub fn validate(&self) -> Result<()> {
        let positive: [(&str, f64); 5] = [
            ("trolley_mass", self.trolley_mass),
            ("hook_mass", self.hook_mass),
            ("payload_mass", self.payload_mass),
            ("payload_rope", self.payload_rope),
            ("gravity", self.gravity),
        ];
        for (name, value) in positive {
            if value <= 0.0 || !value.is_finite() {
                return Err(CraneError::InvalidParameters(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        for (name, value) in [
            ("hook_inertia", self.hook_inertia),
            ("payload_inertia", self.payload_inertia),
        ] {
            if value < 0.0 || !value.is_finite() || value.is_nan() {
                return Err(CraneError::InvalidParameters(format!(
                    "{name} must be non-negative and finite, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Like [`validate`](Self::validate) but additionally requires strictly
    /// positive inertias, which linearization and controller synthesis need.
    pub fn validate_for_synthesis(&self) -> Result<()> {
        self.validate()?;
        if self.hook_inertia <= 0.0 {
            return Err(CraneError::InvalidParameters(
                "hook_inertia must be strictly positive for synthesis".into(),
            ));
        }
        if self.payload_inertia <= 0.0 {
            return Err(CraneError::InvalidParameters(
                "payload_inertia must be strictly positive for synthesis".into(),
            ));
        }
        Ok(())
    }
}

impl Default for CraneParams {
    /// Reference data set used by the bundled simulation scenarios
    /// (masses and inertias in scaled units).
    fn default() -> Self {
        CraneParams {
            trolley_mass: 0.2,
            hook_mass: 0.1,
            payload_mass: 10.0,
            hook_inertia: 0.05,
            payload_inertia: 4.0,
            payload_rope: 2.0,
            gravity: 9.81,
        }
    }
}

/// Full state of the crane: generalized coordinates and their rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State(StateVector);

impl State {
    /// Builds a state from the individual components.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        trolley_pos: f64,
        hoist_len: f64,
        hook_angle: f64,
        payload_angle: f64,
        trolley_vel: f64,
        hoist_vel: f64,
        hook_rate: f64,
        payload_rate: f64,
    ) -> Self {
        State(StateVector::from_column_slice(&[
            trolley_pos,
            hoist_len,
            hook_angle,
            payload_angle,
            trolley_vel,
            hoist_vel,
            hook_rate,
            payload_rate,
        ]))
    }

    /// All-zero state (the stabilization target).
    pub fn zero() -> Self {
        State(StateVector::zeros())
    }

    pub fn from_vector(v: StateVector) -> Self {
        State(v)
    }

    pub fn as_vector(&self) -> &StateVector {
        &self.0
    }

    pub fn into_vector(self) -> StateVector {
        self.0
    }

    /// Trolley position `z`.
    pub fn trolley_pos(&self) -> f64 {
        self.0[0]
    }

    /// Hoist rope length `l1` (may pass through zero; the model does not clamp it).
    pub fn hoist_len(&self) -> f64 {
        self.0[1]
    }

    /// Hook angle `theta1` from the downward vertical.
    pub fn hook_angle(&self) -> f64 {
        self.0[2]
    }

    /// Payload angle `theta2` from the downward vertical.
    pub fn payload_angle(&self) -> f64 {
        self.0[3]
    }

    pub fn trolley_vel(&self) -> f64 {
        self.0[4]
    }

    pub fn hoist_vel(&self) -> f64 {
        self.0[5]
    }

    pub fn hook_rate(&self) -> f64 {
        self.0[6]
    }

    pub fn payload_rate(&self) -> f64 {
        self.0[7]
    }

    /// Generalized coordinates `(z, l1, theta1, theta2)`.
    pub fn coords(&self) -> Vector4<f64> {
        Vector4::new(self.0[0], self.0[1], self.0[2], self.0[3])
    }

    /// Generalized rates `(dz, dl1, dtheta1, dtheta2)`.
    pub fn rates(&self) -> Vector4<f64> {
        Vector4::new(self.0[4], self.0[5], self.0[6], self.0[7])
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Default for State {
    fn default() -> Self {
        State::zero()
    }
}

impl From<[f64; STATE_DIM]> for State {
    fn from(a: [f64; STATE_DIM]) -> Self {
        State(StateVector::from_column_slice(&a))
    }
}

/// Right-hand sides of the four equations of motion: trolley force,
/// hoist rope force, hook torque and payload torque.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GeneralizedForces {
    /// Force driving the trolley (`F_z`).
    pub trolley: f64,
    /// Force applied along the hoist rope (`F_l1`).
    pub hoist: f64,
    /// Torque on the hook angle (`F_theta1`).
    pub hook: f64,
    /// Torque on the payload angle (`F_theta2`); identically zero in the
    /// underactuated variant.
    pub payload: f64,
}

impl GeneralizedForces {
    pub fn new(trolley: f64, hoist: f64, hook: f64, payload: f64) -> Self {
        GeneralizedForces {
            trolley,
            hoist,
            hook,
            payload,
        }
    }

    pub fn zero() -> Self {
        GeneralizedForces::default()
    }

    pub fn as_vector(&self) -> Vector4<f64> {
        Vector4::new(self.trolley, self.hoist, self.hook, self.payload)
    }

    pub fn is_finite(&self) -> bool {
        self.as_vector().iter().all(|v| v.is_finite())
    }
}

/// Which torque channels are actuated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActuationVariant {
    /// Payload torque channel absent (`F_theta2 = 0`); inputs `(u1, u2, u3)`.
    Underactuated,
    /// Payload torque channel present; inputs `(u1, u2, u3, u4)`.
    FullyActuated,
}

impl ActuationVariant {
    /// Number of control inputs: 3 or 4.
    pub fn input_dim(&self) -> usize {
        match self {
            ActuationVariant::Underactuated => 3,
            ActuationVariant::FullyActuated => 4,
        }
    }
}

impl std::fmt::Display for ActuationVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ActuationVariant::Underactuated => write!(f, "underactuated"),
            ActuationVariant::FullyActuated => write!(f, "fully-actuated"),
        }
    }
}

/// Control input vector. `trolley` maps to the trolley force, `hoist_offset`
/// is the offset term inside the hoist feedforward law, `hook` maps to the
/// hook torque, and `payload` (present only for the fully actuated variant)
/// maps to the payload torque.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInput {
    pub trolley: f64,
    pub hoist_offset: f64,
    pub hook: f64,
    pub payload: Option<f64>,
}

impl ControlInput {
    pub fn underactuated(trolley: f64, hoist_offset: f64, hook: f64) -> Self {
        ControlInput {
            trolley,
            hoist_offset,
            hook,
            payload: None,
        }
    }

    pub fn fully_actuated(trolley: f64, hoist_offset: f64, hook: f64, payload: f64) -> Self {
        ControlInput {
            trolley,
            hoist_offset,
            hook,
            payload: Some(payload),
        }
    }

    /// Zero input of the given variant.
    pub fn zero(variant: ActuationVariant) -> Self {
        match variant {
            ActuationVariant::Underactuated => ControlInput::underactuated(0.0, 0.0, 0.0),
            ActuationVariant::FullyActuated => ControlInput::fully_actuated(0.0, 0.0, 0.0, 0.0),
        }
    }

    /// Variant implied by the presence of the payload channel.
    pub fn variant(&self) -> ActuationVariant {
        if self.payload.is_some() {
            ActuationVariant::FullyActuated
        } else {
            ActuationVariant::Underactuated
        }
    }

    pub fn is_finite(&self) -> bool {
        self.trolley.is_finite()
            && self.hoist_offset.is_finite()
            && self.hook.is_finite()
            && self.payload.is_none_or(f64::is_finite)
    }
}
