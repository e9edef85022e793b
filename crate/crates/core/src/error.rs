use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("stencil unavailable: axis {axis} has {nodes} nodes, need at least {needed}")]
    StencilUnavailable {
        axis: usize,
        nodes: usize,
        needed: usize,
    },
    #[error("point {point:?} is outside the domain or in an invalid cell")]
    OutOfDomain { point: Vec<f64> },
    #[error("mollifier radius {eps} is under-resolved (need at least {min})")]
    KernelUnderresolved { eps: f64, min: f64 },
    #[error("test function support (center {center:?}, radius {radius}) touches invalid nodes or the grid boundary")]
    SupportViolation { center: Vec<f64>, radius: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("{count} nodes lie within the pole floor {floor} (first: {first:?})")]
    NearPole {
        count: usize,
        floor: f64,
        first: Vec<usize>,
    },
    #[error("critical point: |grad psi| = {norm} below floor {floor}")]
    CriticalPoint { norm: f64, floor: f64 },
    #[error("no samples: {0}")]
    NoSamples(String),
    #[error("insufficient samples: {found} valid, need {needed}")]
    InsufficientSamples { found: usize, needed: usize },
    #[error("degenerate contour: |u| = {norm} < 0.5 at {point:?}")]
    DegenerateContour { norm: f64, point: Vec<f64> },
    #[error("solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    Solver { iterations: usize, residual: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
