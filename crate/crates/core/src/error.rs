use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("nonconforming mesh: {0}")]
    Nonconforming(String),

    #[error("singular matrix while building {0}")]
    Singular(String),

    #[error("inverted element {element}: Jacobian determinant {det:e}")]
    InvertedElement { element: usize, det: f64 },

    #[error("curving failed: {} element(s) with non-positive Jacobian: {elements:?}", elements.len())]
    CurvingFailed { elements: Vec<usize> },

    #[error("inadmissible state in element {element} node {node}: rho={rho:e}, p={pressure:e}")]
    Inadmissible {
        element: usize,
        node: usize,
        rho: f64,
        pressure: f64,
    },

    #[error("solver diverged at level p={degree}, iteration {iteration}: residual {residual:e}")]
    Diverged {
        degree: usize,
        iteration: usize,
        residual: f64,
    },

    #[error("projection did not converge: stationarity {0:e}")]
    Projection(f64),

    #[error("linear solver did not converge: relative residual {0:e}")]
    LinearSolver(f64),

    #[error("format error: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for bad input (configuration, files, formats),
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse { .. } | Error::Format(_) | Error::Io { .. } | Error::Json(_) => 2,
            _ => 3,
        }
    }
}
