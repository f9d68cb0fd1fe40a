//! Library side of the `smh` binary: argument definitions, subcommands,
//! output rendering and the benchmark record format.

pub mod bench;
pub mod cli;
pub mod commands;
pub mod output;

use std::fmt;

use smh_core::generator::PoolFileError;
use smh_core::stp::StpError;
use smh_core::treewidth::pace::TdFormatError;
use smh_core::InstanceError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const INFEASIBLE: i32 = 4;
    /// A DP exceeded its table budget and the best pool tree was reported.
    pub const CAPACITY: i32 = 5;
    /// The time limit expired; the best incumbent was reported.
    pub const TIMEOUT: i32 = 6;
}

/// A bad option value detected after argument parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Exit code for an error that aborted a command.
pub fn error_code(e: &anyhow::Error) -> i32 {
    for cause in e.chain() {
        if cause.is::<UsageError>() {
            return exit::USAGE;
        }
        if let Some(stp) = cause.downcast_ref::<StpError>() {
            return match stp {
                StpError::Instance(InstanceError::Disconnected) => exit::INFEASIBLE,
                _ => exit::PARSE,
            };
        }
        if cause.is::<PoolFileError>() || cause.is::<TdFormatError>() {
            return exit::PARSE;
        }
    }
    exit::FAILURE
}
