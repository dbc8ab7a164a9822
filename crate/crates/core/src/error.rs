use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrbintError {
    #[error("mismatched groups: {0}")]
    MismatchedGroups(String),

    #[error("invalid group element: {0}")]
    InvalidElement(String),

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("level {0} does not exist in this chain")]
    NoSuchLevel(usize),

    #[error("unsupported level: {0}")]
    UnsupportedLevel(String),

    #[error("truncation window too small: {0}")]
    TruncationTooSmall(String),

    #[error("invalid truncation policy: {0}")]
    InvalidTruncation(String),

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("integrand hit its singularity at {0}")]
    SingularHit(f64),

    #[error("zero hitting measure: point lies outside the saturation of the region")]
    ZeroHitting,

    #[error("membership in {0} is undecidable for inexact coordinates")]
    UndecidableMembership(String),

    #[error("not a fundamental domain: {0}")]
    NotAFundamentalDomain(String),

    #[error("lattice level does not meet the fundamental domain")]
    EmptyIntersection,

    #[error("integrand is not invariant under the base lattice: residual {0:e}")]
    NotInvariant(f64),

    #[error("point is not in the partition's region")]
    PointNotInRegion,

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot write output: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, OrbintError>;
