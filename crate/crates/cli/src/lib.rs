//! Deterministic command-line front end for the surface experiments.
//!
//! A run reads one config file (grammar in [`config`], keys in
//! [`settings`]), validates every key before computing anything, runs the
//! experiment ([`experiments`]) and writes its artifacts plus `report.txt`
//! into the output directory ([`run`]).
//!
//! Exit codes: 0 on success, 2 on a line-search stall (partial artifacts
//! are kept), 1 on any other error (nothing is written).  Errors print one
//! `ERROR kind=<kind> detail=<detail>` line on standard error.

pub mod config;
pub mod error;
pub mod experiments;
pub mod run;
pub mod settings;

pub use config::{parse_config, Entry, RawConfig};
pub use error::{error_line, CliError};
pub use experiments::{execute, prepare, Artifact, Outcome, Prepared};
pub use run::{load, render_report, run, versions, RunSummary, REPORT};
pub use settings::{Experiment, Origin, Setting, Settings};
