//! Command-line front end for `bchterm`: term printing with a disk cache,
//! cross-checks, the sign-lattice scan, and a pipeline benchmark.

pub mod cache;
pub mod commands;
pub mod document;
pub mod error;

pub use commands::{run, Cli};
pub use error::CliError;
