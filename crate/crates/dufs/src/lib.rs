//! File formats, configuration and the experiment harness around
//! [`dufs_core`].

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod output;
pub mod samplelog;

pub use error::{CliError, Result};
