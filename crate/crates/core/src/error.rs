use thiserror::Error;

/// Errors surfaced by the planning and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Integrating the dynamics produced a non-finite state.
    #[error("rollout diverged: non-finite state at step {index}")]
    RolloutDiverged { index: usize },

    /// A reference polyline with fewer than two distinct points.
    #[error("degenerate polyline: need at least 2 distinct points, got {distinct}")]
    DegeneratePolyline { distinct: usize },

    /// Mismatched dimensions between a warm start and the problem it is applied to.
    #[error("warm start mismatch: {0}")]
    WarmStartMismatch(String),

    /// A scenario file failed validation.
    #[error("scenario: {0}")]
    Scenario(String),

    /// A scenario file failed to parse.
    #[error("scenario parse error at line {line}, column {column}: {message}")]
    ScenarioParse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
