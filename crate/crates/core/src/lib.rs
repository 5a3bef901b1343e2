//! Multicriteria career path planning on a job-transition graph.
//!
//! The pipeline runs trajectories -> [`graph::TransitionGraph`] -> utility
//! tables per weight vector -> planned paths -> benchmark.

pub mod error;
pub mod evaluation;
pub mod graph;
pub mod planner;
pub mod trajectory;
pub mod utility;

pub use error::{Error, Result};
