use thiserror::Error;

/// Errors surfaced by the geometry, quadrature and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("location outside the surface domain: {0}")]
    OutOfDomain(String),

    #[error("degenerate local fit at element {element}: {detail}")]
    DegenerateFit { element: usize, detail: String },

    #[error("empty sample set")]
    EmptySampleSet,

    #[error("precondition failed: {what} (measured {measured})")]
    Precondition { what: String, measured: f64 },

    #[error(
        "Gaussian tail bound violated at rho_max = {rho_max}: increase the truncation radius to at least {suggested}"
    )]
    Truncation { rho_max: f64, suggested: f64 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("empty cross-section at scale {scale}")]
    EmptyCrossSection { scale: f64 },

    #[error("quadrature did not stabilize: {0}")]
    NotConverged(String),

    #[error("solver diverged: {detail}")]
    SolverDiverged { detail: String },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
