use std::path::PathBuf;

use thiserror::Error;

use crate::query::QueryError;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("config: {0}")]
    Config(String),

    #[error("missing input {}", .0.display())]
    MissingInput(PathBuf),

    #[error(transparent)]
    Core(#[from] careerpath_core::Error),

    #[error(transparent)]
    Query(#[from] QueryError),

    #[error("server: {0}")]
    Server(String),
}

impl ServiceError {
    /// Process exit status. Clap uses 2 for usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            ServiceError::Config(_) => 3,
            ServiceError::MissingInput(_) => 4,
            ServiceError::Core(_) => 5,
            ServiceError::Query(_) => 6,
            ServiceError::Server(_) => 7,
        }
    }
}
