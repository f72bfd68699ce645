use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("torus rank must be positive")]
    EmptyRank,

    #[error("weight {index} has length {found}, expected rank {expected}")]
    WeightLength {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("shift has length {found}, expected rank {expected}")]
    ShiftLength { expected: usize, found: usize },

    #[error("weight {index} has multiplicity {multiplicity}, expected at least 1")]
    Multiplicity { index: usize, multiplicity: i64 },

    #[error("radial square q[{0}] is negative")]
    NegativeSquare(usize),

    #[error("{count} distinct weights exceed the enumeration limit of {limit}")]
    TooManyWeights { count: usize, limit: usize },

    #[error("{0} is not a critical value")]
    NotCritical(String),

    #[error("component polytope for {0} is empty")]
    EmptyPolytope(String),

    #[error("recursion guard exceeded at depth {0}")]
    RecursionGuard(usize),

    #[error("target is not a regular value")]
    NotRegular,

    #[error("empty level")]
    EmptyLevel,

    #[error("residual denominator (1 - t^2)^{0} after normalization")]
    ResidualDenominator(u32),

    #[error("point is not on the component (momentum distance {distance:e})")]
    NotOnComponent { distance: f64 },

    #[error("spectral gap {gap:e} at position {k} is below threshold {threshold:e}")]
    SpectralGap { k: usize, gap: f64, threshold: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sampling produced no points off the component; increase the radius")]
    NoOffComponentSamples,

    #[error("trajectory diverged after {steps} steps (|z| = {norm:e})")]
    Divergence { steps: usize, norm: f64 },

    #[error("trajectory did not converge within {steps} steps (|grad f| = {grad_norm:e})")]
    NonConvergence { steps: usize, grad_norm: f64 },

    #[error("fibre {fibre}: Newton iteration failed after {iterations} iterations: {reason}")]
    NewtonNonConvergence {
        fibre: usize,
        iterations: usize,
        reason: String,
    },
}
