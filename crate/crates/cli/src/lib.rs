//! The `convlab` command line.
//!
//! Exit codes: 0 when every check or certified threshold passes, 1 when a
//! property is violated, 2 for usage errors and 3 for input that does not
//! parse or is not a valid problem or method.

mod args;
mod commands;
mod output;
mod settings;

use std::ffi::OsString;
use std::fmt;

use clap::Parser;

pub use args::{Cli, Command, Format, SimulateKind};
pub use output::{line_chart, Envelope};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Violation = 1,
    Usage = 2,
    Invalid = 3,
}

impl Exit {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Exit::Pass
        } else {
            Exit::Violation
        }
    }

    /// The worse of two outcomes.
    fn and(self, other: Exit) -> Exit {
        if (other as i32) > (self as i32) {
            other
        } else {
            self
        }
    }
}

/// A run that stopped before producing a verdict.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Invalid(String),
}

impl Failure {
    fn exit(&self) -> Exit {
        match self {
            Failure::Usage(_) => Exit::Usage,
            Failure::Invalid(_) => Exit::Invalid,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Invalid(m) => f.write_str(m),
        }
    }
}

impl From<convlab::Error> for Failure {
    fn from(e: convlab::Error) -> Self {
        match e {
            convlab::Error::Parameter(_) => Failure::Usage(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match commands::dispatch(cli) {
        Ok(exit) => exit as i32,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit() as i32
        }
    }
}
