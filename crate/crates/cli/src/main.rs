use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use ybe_cli::args::Cli;
use ybe_cli::run::{render, run};

fn main() -> ExitCode {
    let cfg = Cli::parse().into_config();
    match run(&cfg) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(render(&report, cfg.format).as_bytes());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
