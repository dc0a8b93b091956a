use thiserror::Error;

/// Errors surfaced by configuration validation, simulation entry points and
/// the analysis pipeline. Pure-math kernel functions treat domain violations
/// (for example a zero push) as caller bugs and panic instead.
#[derive(Debug, Error)]
pub enum MillError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("aggregation window k={k} exceeds series length {len}")]
    AggregateWindow { k: usize, len: usize },

    #[error("series must hold at least 2 increments to form pairs, got {0}")]
    TooShortForPairs(usize),

    #[error("pair set is empty")]
    EmptyPairs,

    #[error("no pairs fall inside the millness square (delta_p_star = {0})")]
    EmptySectorCounts(f64),

    #[error("histogram grid is not closed under the requested reflection: {0}")]
    GridNotReflectionClosed(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("non-finite increment at index {0}")]
    NonFiniteIncrement(usize),
}

pub type Result<T> = std::result::Result<T, MillError>;
