use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid field: {0}")]
    Field(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("propagation time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("input is not solenoidal: divergence defect {0:e} exceeds 1e-6")]
    NotSolenoidal(f64),

    #[error("zero radius: the stereographic substitution is undefined")]
    DegenerateRadius,

    #[error("integration failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("invalid time grid: {0}")]
    TimeGrid(String),

    #[error("determinant drift {drift:e} at t = {t} exceeds 1e-6; reduce the step size")]
    DeterminantDrift { t: f64, drift: f64 },

    #[error("snapshot {0} has no neighbours for a centered time difference")]
    BoundarySnapshot(usize),

    #[error("expression error at byte {pos}: {msg}")]
    Expr { pos: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("field dump error: {0}")]
    Dump(String),

    #[error("missing field file: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("{failed} of {total} pointwise solves failed (limit 0.1%)")]
    TooManyFailures { failed: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
