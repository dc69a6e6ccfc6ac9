//! Command-line front end: plant files in, reports and controller files out.

pub mod commands;
pub mod error;
pub mod files;
pub mod report;

pub use commands::{Order, Outcome};
pub use error::{CliError, Result};
pub use report::Report;
