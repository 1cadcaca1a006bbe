//! Configuration, mode runners and output for the `sim` binary.

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, parse_config_with, ConfigError, Mode, RunConfig, KEYS};
pub use output::{meta_lines, render_csv, render_meta, Table};
pub use run::{read_spectrum, run, Report, RunError};
