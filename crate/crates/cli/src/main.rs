use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use szlenk_cli::{init_logging, run, Cli, EXIT_ERROR};

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.log_level);
    let out = match run(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &out.text),
        None => std::io::stdout().write_all(out.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    ExitCode::from(out.exit_code() as u8)
}
