use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = cyclemeter_cli::run(std::env::args_os());
    let _ = std::io::stdout().write_all(&outcome.stdout);
    eprint!("{}", outcome.stderr);
    ExitCode::from(outcome.code as u8)
}
