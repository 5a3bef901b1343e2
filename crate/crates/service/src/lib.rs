//! CLI and HTTP service over the career path engine.

pub mod api;
pub mod artifacts;
pub mod cli;
pub mod config;
pub mod error;
pub mod query;

pub use error::ServiceError;
