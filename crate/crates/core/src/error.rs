use thiserror::Error;

/// Errors shared across the crate. Checker verdicts (a condition failing)
/// are not errors; they come back as reports with a `pass` flag.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("bad generator parameters: {0}")]
    BadParams(String),
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),
    #[error("bad query: {0}")]
    BadQuery(String),
    #[error("scale floor reached: {0}")]
    ScaleFloor(String),
    #[error("sign condition violated: {0}")]
    SignCondition(String),
    #[error("coefficient ramp unresolvable: {0}")]
    RampResolution(String),
    #[error("linear solve failed: {0}")]
    LinearSolve(String),
    #[error("lp solve failed: {0}")]
    Lp(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("barrier parameter search failed: {0}")]
    ParameterSearch(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
