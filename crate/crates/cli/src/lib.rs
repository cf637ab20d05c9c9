//! Batch driver: configuration, the sweep pipeline, caching and reports.

pub mod cache;
pub mod config;
pub mod criteria;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod report;

pub use config::RunConfig;
pub use error::HarnessError;
