use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = ultrastar_cli::run(std::env::args_os());
    print!("{}", outcome.stdout);
    let _ = std::io::stdout().flush();
    if !outcome.stderr.is_empty() {
        eprintln!("{}", outcome.stderr);
    }
    ExitCode::from(outcome.code as u8)
}
