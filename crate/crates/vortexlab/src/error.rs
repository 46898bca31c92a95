use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("class C violation in item ({item}): {detail}")]
    ClassCViolation { item: &'static str, detail: String },
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("spectral window too small: {0}")]
    WindowTooSmall(String),
    #[error("tail truncation: {0}")]
    TailTruncation(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("singular denominator: min |R - mu| = {0:e}")]
    SingularDenominator(f64),
    #[error("zero function supplied")]
    ZeroFunction,
    #[error("eigenvalue tracking lost at parameter {parameter}: distance {distance:e} exceeds spacing {spacing:e}")]
    TrackingLost {
        parameter: f64,
        distance: f64,
        spacing: f64,
    },
    #[error("eigenfunction not tail normalized: {0}")]
    NotNormalized(String),
    #[error("support condition violated: {0}")]
    SupportViolation(String),
    #[error("singular time t = {0}")]
    TimeSingularity(f64),
    #[error("CFL violation: dtau = {dtau:e} exceeds bound {bound:e}")]
    CflViolation { dtau: f64, bound: f64 },
    #[error("non-finite values in state at tau = {0}")]
    NonFinite(f64),
    #[error("mismatched sampling: {0}")]
    MismatchedSampling(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("unresolved quadrature: {0}")]
    UnresolvedQuadrature(String),
    #[error("eigensolver failure: {0}")]
    Eigensolver(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
