use thiserror::Error;

/// Errors raised by the partnership game library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field} out of range {interval}: got {value}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        interval: String,
    },

    #[error("effort {value} out of range [0, {alpha}]")]
    EffortOutOfRange { value: f64, alpha: f64 },

    #[error("delta out of range {interval}: got {value}")]
    DeltaOutOfRange { value: f64, interval: &'static str },

    #[error("strategy for player {player} returned effort {value} outside [0, {alpha}] in period {period}")]
    StrategyReturnedOutOfRange {
        player: usize,
        period: usize,
        value: f64,
        alpha: f64,
    },

    #[error("bad bracket: lo = {lo} must be strictly below hi = {hi}")]
    BadBracket { lo: f64, hi: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("quadratic has no real roots (discriminant {discriminant})")]
    NoRealRoots { discriminant: f64 },

    #[error("leading coefficient of quadratic is zero")]
    DegenerateLeadingCoefficient,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
