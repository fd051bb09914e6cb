use thiserror::Error;

/// Error type shared by all core modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rate must be finite and nonnegative, got {0}")]
    InvalidRate(f64),

    #[error("coupling rate {coupling} > 0 requires positive base rates, got {base1} and {base2}")]
    UndefinedCoupling {
        coupling: f64,
        base1: f64,
        base2: f64,
    },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("variable index {index} out of range for {n} variables")]
    VariableOutOfRange { index: usize, n: usize },

    #[error("condition set must not contain the tested variables (x={x}, y={y})")]
    ConditionSetOverlap { x: usize, y: usize },

    #[error("matrix is not positive definite even after diagonal jitter")]
    SingularMatrix,

    #[error("adjacency mismatch: {0} vs {1} nodes")]
    SizeMismatch(usize, usize),

    #[error("true edge set is empty; TPR/FPR are undefined")]
    EmptyTrueEdgeSet,

    #[error("largest weakly connected component has no edges; eigenvector centrality undefined")]
    EmptyLwcc,

    #[error("power iteration did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("box-cox requires strictly positive inputs, got {0} (shift counts by +1 first)")]
    NonPositiveBoxCox(f64),

    #[error("negative binomial parameters out of domain: r={r}, lambda={lambda}")]
    InvalidNegBin { r: f64, lambda: f64 },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
