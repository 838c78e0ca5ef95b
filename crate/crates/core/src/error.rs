use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (symmetry defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("matrix is singular")]
    Singular,

    #[error("non-finite value encountered at index {0}")]
    NonFinite(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("potential is not plurisubharmonic for the form: node {node} carries mass {mass:.3e}")]
    NotPsh { node: usize, mass: f64 },

    #[error("potentials or densities live on different grids")]
    GridMismatch,

    #[error("metric is not invariant under the circle action; use the angular evaluators")]
    NotInvariant,

    #[error("envelope sweep did not converge after {sweeps} sweeps (last change {change:.3e})")]
    NoConvergence { sweeps: usize, change: f64 },

    #[error("geodesic surface invariant violated: {0}")]
    SurfaceInvariant(String),

    #[error(
        "{what} search exhausted its cap {cap}: best error {best:.4e} above target {target:.4e}"
    )]
    CapExhausted {
        what: &'static str,
        cap: usize,
        best: f64,
        target: f64,
    },

    #[error("ladder rung {rung}, step {step}: {source}")]
    LadderStep {
        rung: usize,
        step: u8,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
