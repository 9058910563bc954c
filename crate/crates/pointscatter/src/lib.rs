//! File formats and command-line front end for [`pointscatter_core`].
//!
//! Configurations are JSON files `{"k_positions": [[x, y, z], ...], "label": "..."}`
//! with positions in units of `1/k`; optimization jobs and reports are JSON as
//! well, tabular results are CSV with a header row.

pub mod cli;
pub mod error;
pub mod files;
pub mod table;

pub use error::CliError;
