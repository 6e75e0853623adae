use serde::Serialize;
use thiserror::Error;

/// Broad classes used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorClass {
    /// Bad input parameters or unsupported requests.
    Usage,
    /// A numerical estimate exceeded its tolerance.
    Tolerance,
    /// The input violates a modelling hypothesis.
    Model,
}

#[derive(Debug, Clone, Error)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature did not converge: error estimate {estimate:.3e} above {tolerance:.3e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("frame is not Lagrangian: omega residual {residual:.3e} above {tolerance:.3e}")]
    NonLagrangian { residual: f64, tolerance: f64 },

    #[error("phase-sum violation: sum of phases is {sum:.12}, expected pi")]
    PhaseSum { sum: f64 },

    #[error("Newton iteration stagnated after {iterations} steps, residual {residual:.3e}, last iterate {iterate:?}")]
    NewtonStagnation {
        iterations: usize,
        residual: f64,
        iterate: Vec<f64>,
    },

    #[error("sampling extent too small: truncation estimate {estimate:.3e} above {tolerance:.3e}")]
    Truncation { estimate: f64, tolerance: f64 },

    #[error("tail too large: {what} estimate {estimate:.3e} above {tolerance:.3e}")]
    Tail {
        what: String,
        estimate: f64,
        tolerance: f64,
    },

    #[error("not graphical: {0}")]
    NotGraphical(String),

    #[error("slope {slope:.3e} exceeds small-slope threshold {threshold:.3e}")]
    SlopeThreshold { slope: f64, threshold: f64 },

    #[error("loop {component} is not exact: lambda period {period:.6e}")]
    NonExact { component: usize, period: f64 },

    #[error("ambiguous component matching: {0:?}")]
    AmbiguousMatching(Vec<String>),

    #[error("frames are not transverse: smallest characteristic angle {angle:.3e}")]
    NotTransverse { angle: f64 },

    #[error("boundary condition violated: {0}")]
    Boundary(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("time range: {0}")]
    TimeRange(String),

    #[error("decay rate: fitted {fitted:.4} slower than declared {declared:.4}")]
    DecayRate { fitted: f64, declared: f64 },

    #[error("resolution {resolution:.3e} too coarse, need below {required:.3e}")]
    Resolution { resolution: f64, required: f64 },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("io: {0}")]
    Io(String),
}

impl LabError {
    pub fn class(&self) -> ErrorClass {
        use LabError::*;
        match self {
            Parameter(_) | Unsupported(_) | PhaseSum { .. } | Empty(_) | TimeRange(_) | Io(_) => {
                ErrorClass::Usage
            }
            Quadrature { .. }
            | NewtonStagnation { .. }
            | Truncation { .. }
            | Tail { .. }
            | Resolution { .. }
            | Boundary(_) => ErrorClass::Tolerance,
            NonLagrangian { .. }
            | NotGraphical(_)
            | SlopeThreshold { .. }
            | NonExact { .. }
            | AmbiguousMatching(_)
            | NotTransverse { .. }
            | Hypothesis(_)
            | DecayRate { .. } => ErrorClass::Model,
        }
    }

    pub fn kind(&self) -> &'static str {
        use LabError::*;
        match self {
            Parameter(_) => "parameter",
            Unsupported(_) => "unsupported",
            Quadrature { .. } => "quadrature",
            NonLagrangian { .. } => "non-lagrangian",
            PhaseSum { .. } => "phase-sum",
            NewtonStagnation { .. } => "newton-stagnation",
            Truncation { .. } => "truncation",
            Tail { .. } => "tail",
            NotGraphical(_) => "not-graphical",
            SlopeThreshold { .. } => "slope-threshold",
            NonExact { .. } => "non-exact",
            AmbiguousMatching(_) => "ambiguous-matching",
            NotTransverse { .. } => "not-transverse",
            Boundary(_) => "boundary",
            Hypothesis(_) => "hypothesis",
            TimeRange(_) => "time-range",
            DecayRate { .. } => "decay-rate",
            Resolution { .. } => "resolution",
            Empty(_) => "empty",
            Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
