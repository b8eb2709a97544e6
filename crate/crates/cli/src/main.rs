use std::process::ExitCode;

use clap::Parser;
use qpke_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(q) = cli.qmax {
        // Read once by the simulator on first use.
        std::env::set_var(qpke_core::qsim::CAPACITY_ENV, q.to_string());
    }
    let report = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = report.render(cli.format);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
