//! Configuration, dispatch and reporting for the `heatkernel` command.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::{parse, Config, Mode, Tolerance};
pub use error::{CliError, Result};
pub use report::Report;
pub use run::{run, Overrides};
