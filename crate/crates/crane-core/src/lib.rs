//! Controller design and simulation toolkit for a double-pendulum-type
//! overhead crane with a time-varying hoist-rope length.
//!
//! The crate builds the nonlinear plant from its Lagrange equations
//! ([`dynamics`]), linearizes it about the stabilization target
//! ([`linmodel`]), synthesizes stabilizing state-feedback gains by robust
//! pole placement ([`synthesis`]), certifies local asymptotic stability via
//! a Lyapunov region-of-attraction estimate ([`certify`]), and integrates
//! closed-loop trajectories with force traces, settling metrics and an
//! energy audit ([`sim`]).
//!
//! Two actuation variants are covered: the underactuated crane (no payload
//! torque) and the fully actuated one.

pub mod certify;
pub mod dynamics;
pub mod error;
pub mod linmodel;
pub mod sim;
pub mod synthesis;
pub mod types;

pub use error::{CraneError, Result};
pub use linmodel::LinearModel;
pub use synthesis::{GainMatrix, PoleSet};
pub use types::{
    ActuationVariant, ControlInput, CraneParams, GeneralizedForces, State, StateVector, STATE_DIM,
};
