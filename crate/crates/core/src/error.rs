use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("inclusion is degenerate or closer than {min_margin} to the cell boundary (margin {margin})")]
    ShapeTouchesBoundary { margin: f64, min_margin: f64 },

    #[error("fluid part of the unit cell is disconnected at {cells_per_period} cells per period")]
    DisconnectedFluid { cells_per_period: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("fracture spans {rows} grid rows, at least {required} are required")]
    UnderResolvedFracture { rows: usize, required: usize },

    #[error("invalid configuration: {0}")]
    InvalidInput(String),

    #[error("saddle-point system is singular: {0}")]
    SingularSystem(String),

    #[error("linear solver did not reach tolerance (relative residual {residual:e})")]
    NonConvergence { residual: f64 },

    #[error("Picard iteration diverged after {iterations} iterations (residual {residual:e})")]
    PicardDiverged { iterations: usize, residual: f64 },

    #[error("Picard iteration stopped at {iterations} iterations with residual {residual:e}")]
    MaxIterExceeded { iterations: usize, residual: f64 },

    #[error("unknown region tag `{0}`")]
    UnknownRegion(String),

    #[error("second boundary layer required for order 2")]
    MissingSecondLayer,

    #[error("doubling the slab height moved the stabilization constant by {relative_shift:e} (relative)")]
    TruncationSuspect { relative_shift: f64 },

    #[error("only {usable} usable heights before the noise floor (window {window:?}), need {required}")]
    InsufficientDecayWindow { usable: usize, required: usize, window: (f64, f64) },

    #[error("need at least {required} points, got {got}")]
    InsufficientPoints { got: usize, required: usize },

    #[error("slip samples are too close to collinear for a quadratic fit")]
    CollinearSamples,

    #[error("parameters violate hypotheses: {0}")]
    HypothesisViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;
