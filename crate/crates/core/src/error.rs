use thiserror::Error;

/// Errors raised by the analytic pipeline and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a profile needs at least one subband")]
    NoSubbands,

    #[error("expected {expected} subbands, got {a} values for user 1 and {b} for user 2")]
    LengthMismatch { expected: usize, a: usize, b: usize },

    #[error("CSIT quality of user {user} in subband {subband} is {value}, outside [0, 1]")]
    OutOfRange { user: u8, subband: usize, value: f64 },

    #[error("profile is not balanced (a_e - b_e = {gap:e}); separability needs a_e = b_e")]
    NotBalanced { gap: f64 },

    #[error("u0 pairing needs a balanced profile (a_e - b_e = {gap:e}); reduce it first")]
    Unbalanced { gap: f64 },

    #[error("weight {name} is negative ({value})")]
    NegativeWeight { name: &'static str, value: f64 },

    #[error("expected alpha <= beta, got alpha = {alpha}, beta = {beta}")]
    OrderViolation { alpha: f64, beta: f64 },

    #[error("greedy reduction left a surplus of {remaining:e} unconsumed")]
    InternalImbalance { remaining: f64 },

    #[error("cannot take the orthogonal complement of a zero vector")]
    ZeroVector,

    #[error("SNR grid has {grid} points but the slope fit needs {fit_points}")]
    GridTooSmall { grid: usize, fit_points: usize },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
