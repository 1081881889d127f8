//! Shared setup for the criterion benchmarks.

use crane_core::linmodel::{analytic_linearization, LinearModel};
use crane_core::synthesis::{GainMatrix, PoleSet};
use crane_core::{ActuationVariant, CraneParams, State};

/// Reference parameter set, linear model and placed gain for one variant.
pub fn reference_setup(variant: ActuationVariant) -> (CraneParams, LinearModel, GainMatrix) {
    let params = CraneParams::default();
    let model = analytic_linearization(&params, variant).expect("linearization");
    let gain = model.place(&PoleSet::default()).expect("placement");
    (params, model, gain)
}

/// Initial state of the bundled swing-damping scenario.
pub fn swing_state() -> State {
    State::new(0.234, 0.2, 0.0, -0.001, 0.0, 0.0, 0.0, 0.0)
}

/// A state well away from the origin, for dynamics evaluation benchmarks.
pub fn excited_state() -> State {
    State::new(1.2, 0.8, 0.35, -0.2, 0.4, -0.15, 0.25, 0.1)
}
