//! Command-line front end for `qlp-core`: program files, answer records
//! and the `qlp` subcommands.

pub mod cli;
pub mod record;

pub use cli::{run, Cli};
pub use record::{OutputRecord, Status};
