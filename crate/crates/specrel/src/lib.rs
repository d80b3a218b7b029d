//! File formats, caching, parallel drivers and the command-line front end
//! for `specrel-core`.

pub mod cache;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod parallel;
pub mod report;
pub mod synth;

pub use commands::{execute, CacheStatus, Locations, Outcome};
pub use config::RunConfig;
pub use error::{CliError, CliResult};
