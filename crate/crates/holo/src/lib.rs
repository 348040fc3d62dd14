//! File formats, configuration, experiment reports and the `holo` command
//! line on top of `holo-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod registry;
pub mod report;

pub use error::{HoloError, HoloResult};
pub use report::{ExperimentReport, Residual, ResidualClass, Scalar};
