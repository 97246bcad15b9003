use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid size {0}: must be a power of two and at least 16")]
    InvalidN(usize),
    #[error("invalid domain [{x_min}, {x_max}]: x_max must exceed x_min")]
    InvalidDomain { x_min: f64, x_max: f64 },
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("cannot normalize the zero vector")]
    ZeroVector,
    #[error("statistic undefined for the zero state")]
    ZeroState,
    #[error("malformed interval [{a}, {b})")]
    MalformedInterval { a: f64, b: f64 },
    #[error("partition cells overlap: {0}")]
    BadPartition(String),
    #[error("intervals are not disjoint")]
    OverlappingIntervals,
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid step configuration: {0}")]
    InvalidStep(String),
    #[error("density node detected at t = {t} (min/max density ratio {ratio:e})")]
    NodeDetected { t: f64, ratio: f64 },
    #[error("direct integrator blew up at t = {t}: norm drift {drift:e}")]
    BlowUp { t: f64, drift: f64 },
    #[error("grid misalignment: {0}")]
    GridMisalignment(String),
    #[error("support collision: {0}")]
    SupportCollision(String),
    #[error("domain overflow: {0}")]
    DomainOverflow(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: expected {expected} amplitudes, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
