use std::path::PathBuf;

use thiserror::Error;

use crate::topology::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("embedding infeasible: {0}")]
    EmbeddingInfeasible(String),

    #[error("invalid embedding: {}", format_violations(.0))]
    InvalidEmbedding(Vec<Violation>),

    #[error("lagrange state does not match embedding: {0}")]
    StateMismatch(String),

    #[error("problem too large for exhaustive search: {n} > {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("missing artifact {path}: {reason}")]
    MissingArtifact { path: PathBuf, reason: String },

    #[error("refusing to overwrite existing output {0} (use --force)")]
    OutputExists(PathBuf),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    /// Process exit status for command-line front ends.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::Parse { .. }
            | Error::Json(_)
            | Error::OutputExists(_) => 2,
            Error::Capacity(_) | Error::EmbeddingInfeasible(_) | Error::InvalidEmbedding(_) => 3,
            Error::MissingArtifact { .. } | Error::StateMismatch(_) => 4,
            _ => 1,
        }
    }
}
