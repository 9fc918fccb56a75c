//! File formats, configuration, parallel tuning and the replication harness
//! around `jointboost-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod parallel;
pub mod replicate;
pub mod report;
pub mod table;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use jointboost_core as core;
