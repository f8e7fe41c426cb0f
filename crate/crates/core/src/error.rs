use thiserror::Error;

/// Errors produced by the rotation library.
#[derive(Error, Debug)]
pub enum RotationError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid growth model: {0}")]
    InvalidModel(String),
    #[error("invalid economic parameters: {0}")]
    InvalidParams(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("quadrature did not converge on [{lower}, {upper}]: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature {
        lower: f64,
        upper: f64,
        achieved: f64,
        requested: f64,
    },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, RotationError>;
