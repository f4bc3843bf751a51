use std::io::Write;
use std::process::ExitCode;

use genmaxent_cli::{run, EXIT_IO};

fn main() -> ExitCode {
    let outcome = run(std::env::args_os(), &mut std::io::stdin().lock());
    let mut stdout = std::io::stdout().lock();
    if stdout
        .write_all(outcome.stdout.as_bytes())
        .and_then(|_| stdout.flush())
        .is_err()
    {
        return ExitCode::from(EXIT_IO as u8);
    }
    eprint!("{}", outcome.stderr);
    ExitCode::from(outcome.code as u8)
}
