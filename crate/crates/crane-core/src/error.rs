//! Error type shared by all toolkit modules.

use std::error::Error;
use std::fmt;

/// Errors produced by dynamics evaluation, synthesis, certification and
/// simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum CraneError {
    /// Physical parameters violate their invariants.
    InvalidParameters(String),
    /// An input (state, control, option set) is malformed.
    InvalidInput(String),
    /// The mass matrix is numerically singular at the requested
    /// configuration, or the hoist feedforward denominator vanished.
    SingularConfiguration {
        /// Condition estimate (or denominator magnitude) that tripped the check.
        condition: f64,
    },
    /// The linearized pair (A, B) fails the rank test.
    Uncontrollable {
        /// Numerical rank of the controllability matrix.
        rank: usize,
    },
    /// Pole placement did not reach the requested eigenvalue accuracy.
    PlacementFailed(String),
    /// The closed-loop matrix has an eigenvalue with non-negative real part.
    NotHurwitz {
        /// Largest real part found.
        max_real_part: f64,
    },
    /// No radius in the search interval satisfies the stability margin test.
    NoValidRadius,
    /// A trajectory operation was called on an empty trajectory.
    EmptyTrajectory,
}

impl fmt::Display for CraneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CraneError::InvalidParameters(msg) => write!(f, "invalid parameters: {msg}"),
            CraneError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            CraneError::SingularConfiguration { condition } => {
                write!(
                    f,
                    "singular configuration (condition estimate {condition:.3e})"
                )
            }
            CraneError::Uncontrollable { rank } => {
                write!(
                    f,
                    "pair (A, B) is uncontrollable: controllability rank {rank} < state dimension"
                )
            }
            CraneError::PlacementFailed(msg) => write!(f, "pole placement failed: {msg}"),
            CraneError::NotHurwitz { max_real_part } => {
                write!(f, "closed-loop matrix is not Hurwitz (max eigenvalue real part {max_real_part:.3e})")
            }
            CraneError::NoValidRadius => {
                write!(
                    f,
                    "no radius in the search interval yields a positive stability margin"
                )
            }
            CraneError::EmptyTrajectory => write!(f, "trajectory holds no samples"),
        }
    }
}

impl Error for CraneError {}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CraneError>;
