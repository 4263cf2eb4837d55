use std::io::{self, BufWriter};
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut out = BufWriter::new(io::stdout().lock());
    let code = mxparse_cli::run_with_args(std::env::args_os(), &mut out, &mut io::stderr());
    ExitCode::from(code)
}
