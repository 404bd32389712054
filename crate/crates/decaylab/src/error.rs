//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("grid mismatch between fields")]
    GridMismatch,

    #[error("invalid decay spec: {0}")]
    InvalidDecaySpec(String),

    #[error("cutoff radius {rho0} exceeds the dealias band edge {edge}")]
    CutoffBeyondGrid { rho0: f64, edge: f64 },

    #[error("expected a vector field with {expected} components, got {got}")]
    NotVectorField { expected: usize, got: usize },

    #[error("shell window is empty or unresolved: {0}")]
    EmptyShellWindow(String),

    #[error("need at least {needed} shells in the window, found {found}")]
    InsufficientShells { needed: usize, found: usize },

    #[error("invalid radial spectrum: {0}")]
    InvalidRadialSpectrum(String),

    #[error("negative time t = {0}")]
    NegativeTime(f64),

    #[error("decay character must exceed -n/2 = {limit}, got {r_star}")]
    RStarOutOfRange { r_star: f64, limit: f64 },

    #[error("invalid model config: {0}")]
    InvalidConfig(String),

    #[error("forcing requested at t = {t} before activation time t_on = {t_on}")]
    ForcingBeforeActivation { t: f64, t_on: f64 },

    #[error("flux polynomial degree {0} exceeds the supported maximum 4")]
    FluxDegreeOverflow(usize),

    #[error("input field is not solenoidal: divergence residual {0:.3e}")]
    NotSolenoidal(f64),

    #[error("simulation aborted at t = {t}: {reason}")]
    Unstable { t: f64, reason: String },

    #[error("series values must be positive inside the fit window (found {value} at t = {t})")]
    NonpositiveValue { t: f64, value: f64 },

    #[error("fit window holds {found} samples, need at least {needed}")]
    ShortWindow { found: usize, needed: usize },

    #[error(
        "fit window collapsed: transient start {t0} reaches the box horizon {t1}; \
         enlarge the box length L (or lower the viscosity) to push the horizon out"
    )]
    WindowCollapsed { t0: f64, t1: f64 },

    #[error("missing fit for m = {0}")]
    MissingFit(u32),

    #[error("monotonicity constant invalid: alpha + beta + m - 1 = {0} <= 0")]
    InvalidMonotonicityConstant(f64),

    #[error("empty time series")]
    EmptySeries,

    #[error("time series must be strictly increasing in t")]
    NonMonotoneTimes,

    #[error("snapshot format error: {0}")]
    SnapshotFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
