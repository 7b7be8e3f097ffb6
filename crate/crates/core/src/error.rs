use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no quantum-defect data for {0}")]
    MissingDefect(String),
    #[error("no lifetime fit for {0}")]
    MissingLifetime(String),
    #[error("level {0} lies outside the data-file coverage")]
    OutOfCoverage(String),
    #[error("invalid level: {0}")]
    InvalidLevel(String),
    #[error("constants file, line {line}: {msg}")]
    ConstantsParse { line: usize, msg: String },
    #[error("polarizability sum for {level} not converged: {rel_change:.2e} relative change on window doubling")]
    PolarizabilityNotConverged { level: String, rel_change: f64 },
    #[error("invalid angular momentum arguments: {0}")]
    InvalidAngularMomentum(String),
    #[error("dipole transition {0} -> {1} is forbidden (requires |delta l| = 1)")]
    ForbiddenTransition(String, String),
    #[error("pair separation must be positive, got {0} um")]
    ZeroSeparation(f64),
    #[error("reference state excluded from basis (window {window_ghz} GHz)")]
    EmptyBasis { window_ghz: f64 },
    #[error("invalid basis request: {0}")]
    InvalidBasis(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid drive: {0}")]
    InvalidDrive(String),
    #[error("step size underflow at t = {t} us (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("integrator tolerance not met at t = {t} us after {steps} steps")]
    ToleranceNotMet { t: f64, steps: usize },
    #[error("invalid propagation request: {0}")]
    InvalidPropagation(String),
    #[error("weighted phase undefined: both amplitudes vanish")]
    BothAmplitudesZero,
    #[error("sideband expansion did not converge for x1 = {x1}, x2 = {x2}")]
    SidebandNotConverged { x1: f64, x2: f64 },
    #[error("invalid sideband request: {0}")]
    InvalidSideband(String),
    #[error("no crossing in range")]
    NoCrossingInRange,
    #[error("inconsistent pulse schedule: {0}")]
    ScheduleInconsistent(String),
    #[error("no wait-time solution within bounds (residual {residual:.3e} rad)")]
    NoSolutionInBounds { residual: f64 },
    #[error("reference state not normalized (norm {0})")]
    NonNormalizedReference(f64),
    #[error("invalid optimization problem: {0}")]
    InvalidProblem(String),
    #[error("unknown parameter {0}")]
    UnknownParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
