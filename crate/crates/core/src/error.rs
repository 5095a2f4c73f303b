use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the fitting pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate pole pair: product of the pair is zero")]
    DegeneratePair,
    #[error("evaluation point {0} coincides with a support point")]
    EvaluationAtSupport(Complex64),
    #[error("evaluation point {0} is a pole of the approximant")]
    EvaluationAtPole(Complex64),
    #[error("sample point {point} coincides with support point {support}")]
    SingularSupport { point: Complex64, support: Complex64 },
    #[error("pole pair is critically damped and needs a double pole")]
    CriticallyDamped,
    #[error("zero measurement at sample {0}")]
    ZeroMeasurement(usize),
    #[error("support points are not mutually distinct")]
    DuplicatePoints,
    #[error("cannot pair points: {0}")]
    Pairing(String),
    #[error("singular mass: natural frequency is zero")]
    SingularMass,
    #[error("realness violation: {0}")]
    Realness(String),
    #[error("invalid model structure: {0}")]
    Structure(String),
    #[error("system is singular at {0} (resonance)")]
    Resonance(Complex64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid range: {0}")]
    Range(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("eigenvalue solver did not converge")]
    EigenSolver,
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
