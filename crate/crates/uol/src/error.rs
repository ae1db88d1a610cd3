use crate::field::{Point, ScalarField};

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes across the crate. Variants carrying a field box it so the
/// error stays cheap to move.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("point ({:.6}, {:.6}) outside the grid extent", point[0], point[1])]
    OutOfDomain { point: Point },

    #[error("ball of radius {radius} at ({:.4}, {:.4}) not contained in the grid", center[0], center[1])]
    BallOutsideDomain { center: Point, radius: f64 },

    #[error("radius {radius} below the resolvable minimum {min} for this grid")]
    RadiusTooSmall { radius: f64, min: f64 },

    #[error("linear solve did not reach tol {tol:.3e} in {iterations} iterations (residual {residual:.3e})")]
    SolverDiverged {
        residual: f64,
        tol: f64,
        iterations: usize,
    },

    #[error(
        "fixed-point iteration stalled at eps {epsilon:.3e} (sup diff {sup_diff:.3e} after {iterations} iterations)"
    )]
    FixedPointDiverged {
        epsilon: f64,
        sup_diff: f64,
        iterations: usize,
        /// Sup-norm differences of the successive iterates, for post-mortem.
        trace: Vec<f64>,
    },

    #[error("line search failed at step size {step:.3e}")]
    LineSearchFailed { step: f64, last: Box<ScalarField> },

    #[error("degenerate free boundary: |∇u| = {grad:.3e} < floor {floor:.3e} at ({:.4}, {:.4})", point[0], point[1])]
    DegenerateFreeBoundary { point: Point, grad: f64, floor: f64 },

    #[error("blow-up is trivial at this center; no rotation angle is meaningful")]
    TrivialBlowup,

    #[error("expected 4 free-boundary arcs at radius {radius}, found {found}")]
    ArcCount { radius: f64, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("artifact hash mismatch for {path}")]
    ArtifactMismatch { path: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
