use thiserror::Error;

/// Errors raised by the numerical contracts of this crate.
///
/// Each variant names the module whose contract was violated so that the CLI
/// can report it without further context.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("forms: {0}")]
    Forms(String),

    #[error("forms: coefficient {n} violates {relation}")]
    CoefficientCheck { n: u64, relation: String },

    #[error("coefficient table too short: need n_max >= {required}, have {available}")]
    Coverage { required: u64, available: u64 },

    #[error("specfun: pole of the gamma function at {0}")]
    GammaPole(f64),

    #[error("specfun: quadrature did not converge (value {value}, error estimate {error})")]
    Quadrature { value: f64, error: f64 },

    #[error("lfunc: {0}")]
    LFunction(String),

    #[error("mollifier: {0}")]
    Mollifier(String),

    #[error("detector: {0}")]
    Detector(String),

    #[error("sums: {0}")]
    Sums(String),

    #[error("voronoi: {0}")]
    Voronoi(String),

    #[error("io: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
