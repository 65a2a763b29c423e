//! Command-line front end for `fracheat`.
//!
//! Commands write CSV (default) or JSON to `--out` or standard output.
//! Exit codes: 0 on success, 2 for usage errors, 3 for numerical failures
//! and 4 for I/O failures.

pub mod commands;
pub mod config;
pub mod error;

use std::ffi::OsString;

pub use config::{parse_args, Command, Format, IcKind, Invocation, RunConfig};
pub use error::{CliError, CliResult};

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let outcome = parse_args(argv).and_then(|inv| match inv {
        Invocation::Info(text) => {
            print!("{text}");
            Ok(())
        }
        Invocation::Run(cfg) => commands::run(&cfg),
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("fracheat: {e}");
            e.exit_code()
        }
    }
}
