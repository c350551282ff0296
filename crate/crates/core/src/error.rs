use thiserror::Error;

/// Errors raised by the geometry routines.
///
/// Numeric payloads are carried as `f64` so the error type does not depend
/// on the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("root bracketing failed: {0}")]
    RootBracketingFailure(String),
    #[error("requested extent exceeds the radial domain: {0}")]
    DomainExceeded(String),
    #[error("integration failed: {0}")]
    IntegrationFailure(String),
    #[error("value {value} outside domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },
    #[error("operation not defined for family {0}")]
    WrongFamily(String),
    #[error("unsupported fiber: {0}")]
    UnsupportedFiber(String),
    #[error("threshold ordering violated: {0}")]
    OrderingViolation(String),
    #[error("mesh and profile were built from different manifold specs")]
    SpecMismatch,
    #[error("empty result: {0}")]
    EmptyResult(String),
    #[error("degenerate induced metric: {0}")]
    DegenerateMetric(String),
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
    #[error("submanifold has boundary; a closed mesh is required")]
    OpenBoundary,
    #[error("submanifold leaves the open hemisphere: max r = {r}, limit = {limit}")]
    HemisphereViolation { r: f64, limit: f64 },
    #[error("constant inapplicable: {0}")]
    ConstantInapplicable(String),
    #[error("region violation: {0}")]
    RegionViolation(String),
    #[error("surface is not minimal: max |H| = {0}")]
    NotMinimal(f64),
    #[error("fit window too small: {0}")]
    WindowTooSmall(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
