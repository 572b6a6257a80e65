use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("point outside the cone domain: {0}")]
    Domain(String),
    #[error("discretization failure: {0}")]
    Discretization(String),
    #[error("expansion of the cone vanishes at s = {s} (focal point)")]
    FocalPoint { s: f64 },
    #[error("linear solver failure: {0}")]
    Solver(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("eigensolver did not converge after {iterations} iterations (last residual {residual:e})")]
    Eigen {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("interval [{a}, {b}] exceeds the certified window ending at {window_end}")]
    Interval { a: f64, b: f64, window_end: f64 },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
