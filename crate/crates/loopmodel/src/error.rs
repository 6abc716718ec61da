use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vertex id {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("edge id {edge} out of range ({edge_count} edges)")]
    EdgeOutOfRange { edge: usize, edge_count: usize },

    #[error("degree sum {sum} is odd; half-edges cannot be paired")]
    OddDegreeSum { sum: usize },

    #[error("no simple realization found after {attempts} pairing attempts")]
    MaxAttemptsExhausted { attempts: usize },

    #[error("exhaustive search budget exceeded: visited {visited} states (budget {budget})")]
    BudgetExceeded { visited: u64, budget: u64 },

    #[error("time {0} is not regular: a mark sits there")]
    IrregularTime(f64),

    #[error("duplicate mark time {0}")]
    DuplicateMarkTime(f64),

    #[error("state space dimension {dim} exceeds cap {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },

    #[error("loop tracer invariant violated: {0}")]
    TracerInvariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
