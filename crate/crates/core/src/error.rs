use std::path::PathBuf;

use crate::mms::ConvergenceReport;
use crate::solver::{SolutionFields, SolveReport};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("material data line {line}: {message}")]
    MaterialData { line: usize, message: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid solver configuration: {0}")]
    InvalidSolverConfig(String),

    #[error("linear system is singular or too ill-conditioned: {0}")]
    SingularLinearSystem(String),

    #[error("nonlinear solve did not converge (residual {:.3e})", .report.final_residual())]
    NonConvergence {
        report: Box<SolveReport>,
        fields: Box<SolutionFields>,
    },

    #[error("boundary tag {0} is not present on the mesh")]
    MissingWall(String),

    #[error("invalid study parameters: {0}")]
    InvalidStudy(String),

    #[error("study aborted after {} completed levels: {source}", .partial.h.len())]
    StudyAborted {
        partial: Box<ConvergenceReport>,
        source: Box<Error>,
    },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
