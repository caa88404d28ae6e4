//! Std companion to `chang-core`: JSON and CSV formats, set generators, run
//! configurations, parallel verification and the sweeps behind the `chang`
//! binary.

pub mod config;
pub mod error;
pub mod formats;
pub mod generators;
pub mod parallel;
pub mod run;
pub mod seeds;
pub mod sweep;

pub use config::{RunConfig, Variant};
pub use error::ToolError;
pub use run::{run, Artifact, RunOutcome};
