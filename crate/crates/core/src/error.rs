use thiserror::Error;

/// Errors raised by the geometry, flow and functional layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the documented range (index, exponent, radius).
    #[error("argument error: {0}")]
    Argument(String),

    /// The input lies outside the domain of the function (cone, definiteness, projectability).
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent grid or run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Principal curvatures left the positive cone at a grid node.
    #[error("degenerate curvature at node {node}: {reason}")]
    DegenerateCurvature { node: usize, reason: String },

    /// Text input (profile file, run document) could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
