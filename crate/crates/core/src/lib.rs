//! Evaluation harness: task corpus, generation gateway, runtime profiler,
//! score pipeline, reports and the loop that drives them.

pub mod adequacy;
pub mod adjust;
pub mod config;
pub mod corpus;
pub mod error;
pub mod gateway;
pub mod pipeline;
pub mod profiler;
pub mod report;
pub mod score;
pub mod solution;

pub use error::CoreError;
