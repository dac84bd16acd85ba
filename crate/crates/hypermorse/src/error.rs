//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point index {index} out of range for a space with {count} points")]
    PointOutOfRange { index: usize, count: usize },

    #[error("invalid metric table: {0}")]
    InvalidMetric(String),

    #[error("space has {n} points; exhaustive scan is limited to {max} (use a sampled scan)")]
    TooLarge { n: usize, max: usize },

    #[error("graph is not connected")]
    Disconnected,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("tessellation {{{p},{q}}} is not hyperbolic: need 1/p + 1/q < 1/2")]
    NotHyperbolic { p: usize, q: usize },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("curve has {points} points but {params} parameter values")]
    LengthMismatch { params: usize, points: usize },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("mesh parameter must be a positive integer, got {0}")]
    InvalidMesh(i64),

    #[error("geodesic endpoints ({sigma_first}, {sigma_last}) do not match curve endpoints ({curve_first}, {curve_last})")]
    EndpointMismatch {
        sigma_first: usize,
        sigma_last: usize,
        curve_first: usize,
        curve_last: usize,
    },

    #[error("generation failed after {attempts} attempts: {reason}")]
    Generation { attempts: usize, reason: String },

    #[error("outside the bound's domain: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
