//! The `mxparse` command-line tool: train an archive from a treebank, parse
//! tokenized text, score parses and print best-of-N oracle curves.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 on a data error and 3 when
//! some sentence had no parse.

use std::ffi::OsString;
use std::io::Write;

use clap::Parser as _;

pub mod archive;
pub mod cli;
pub mod commands;
pub mod error;

pub use crate::archive::{ModelArchive, TrainMeta};
pub use crate::cli::Cli;
pub use crate::commands::Status;
pub use crate::error::{CliError, Result};

/// Runs the tool on `args` (program name first) and returns the exit status.
pub fn run_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{e}");
            return 1;
        }
        Err(e) => {
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    let code = match commands::run(cli, out, err) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    };
    let _ = out.flush();
    code
}
