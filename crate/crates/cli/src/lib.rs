//! Command-line front end for the experiment runners in `lfp_core`.

pub mod config;
pub mod error;
pub mod output;
pub mod payoff;
pub mod run;

pub use config::{Cli, Experiment, RunConfig};
pub use error::CliError;
pub use run::{run, Outcome};
