//! Dataset IO, result files and the command-line front end for
//! [`poseval_core`].
//!
//! * [`io`]: PLY models, scene ground-truth JSON, estimate CSV and
//!   dataset manifests;
//! * [`config`]: the TOML run configuration;
//! * [`report`]: JSON and CSV result files;
//! * [`run`]: the commands, with parallel evaluation.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod run;

pub use error::{Error, Result, EXIT_IO, EXIT_VALIDATION};
