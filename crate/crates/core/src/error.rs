use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("indicator violated at coordinate {index}: value {value}")]
    InfeasibleIndicator { index: usize, value: f64 },

    #[error("cannot project onto the nonnegative sphere: no positive mass")]
    DegenerateProjection,

    #[error("hyperplane target {c} is unreachable inside the box [-1, 1]^{n}")]
    InfeasibleTarget { c: f64, n: usize },

    #[error("polynomial is identically zero")]
    AllZeroCoefficients,

    #[error("working set repeats index {0}")]
    IdenticalIndices(usize),

    #[error("empty step interval [{lower}, {upper}]")]
    EmptyInterval { lower: f64, upper: f64 },

    #[error("block of size {0} exceeds the enumeration limit")]
    BlockTooLarge(usize),

    #[error("strategy requires k = 2, got k = {0}")]
    KMismatch(usize),

    #[error("combinatorial size too large: C({n}, {k}) exceeds {limit}")]
    TooLarge { n: usize, k: usize, limit: u64 },

    #[error("starting point is infeasible (residual {0:e})")]
    InfeasibleStart(f64),

    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),

    #[error("sufficient decrease violated at iteration {iter}: change {change:e} > bound {bound:e}")]
    MonotonicityBreach { iter: usize, change: f64, bound: f64 },

    #[error("too many blocks to probe: {0}")]
    TooManyBlocks(u64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
