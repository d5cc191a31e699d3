use thiserror::Error;

/// Errors raised by the computations in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("band fraction y = {0} is outside the open interval (0, 1/2)")]
    Domain(String),

    #[error("invalid support: {0}")]
    InvalidSupport(String),

    #[error("offset {offset} of the coefficient vector is not in the window")]
    SupportNotContained { offset: i64 },

    #[error("quadratic form evaluated to {value}, below rounding tolerance; raise the precision")]
    NegativeQuadraticForm { value: String },

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("precision ladder exhausted at {bits} bits without stabilizing")]
    PrecisionCap { bits: u32 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("span {span} too small for support size {size}")]
    SpanTooSmall { span: i64, size: usize },

    #[error("enumeration of {count} supports exceeds the budget of {budget}")]
    Budget { count: u128, budget: u128 },

    #[error("no support of size <= {k_cap} explains the data within tolerance {sigma}")]
    Infeasible { k_cap: usize, sigma: String },

    #[error("threshold tie between ranks {k} and {} of the least singular vector", .k + 1)]
    ThresholdTie { k: usize },

    #[error("pole of the conformal map at w = -c")]
    Pole,

    #[error("point lies on the arc (|w| - 1 = {gap})")]
    OnArc { gap: String },

    #[error("kernel degenerate: |Phi(zeta) conj(Phi(z)) - 1| = {gap}")]
    Degenerate { gap: String },

    #[error("quadrature did not converge with {nodes} nodes")]
    QuadratureNonConvergence { nodes: usize },

    #[error("Laurent truncation at depth {truncation} is insufficient for degree {degree}")]
    TruncationInsufficient { truncation: usize, degree: usize },

    #[error("least-squares fit is degenerate: {0}")]
    FitDegenerate(String),

    #[error("postcondition violated: {0}")]
    Postcondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
