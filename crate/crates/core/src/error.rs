use thiserror::Error;

/// Errors raised by construction and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    #[error("root finder failed to converge: {0}")]
    NoConvergence(String),

    #[error("unknown tolerance kind `{0}`")]
    UnknownKind(String),

    #[error("vertex set is degenerate (centered rank < 4)")]
    DegenerateSimplex,

    #[error("vertex set is not a regular simplex (edge spread {0:e})")]
    NotRegular(f64),

    #[error("point outside the parameter domain: {0}")]
    OutOfDomain(String),

    #[error("points do not lie on the same sheet of the hyperboloid")]
    NotSameComponent,

    #[error("point lies on the wrong sheet of the hyperboloid")]
    WrongComponent,

    #[error("point is not on the edge arc (distance {0:e})")]
    OffArc(f64),

    #[error("point is not on the triangle patch: {0}")]
    OffPatch(String),

    #[error("quadrics do not form a focal pair: {0}")]
    NotFocal(String),

    #[error("envelope map undefined: {0}")]
    DomainError(String),

    #[error("interior point is not strictly inside every ball (margin {0:e})")]
    InteriorPointNotInterior(f64),

    #[error("sample cannot be classified: {0}")]
    UnclassifiedSample(String),

    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("hyperplane does not meet the body")]
    EmptySlice,

    #[error("invalid slice specification: {0}")]
    InvalidSlice(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
