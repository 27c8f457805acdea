use std::process::ExitCode;

use clap::Parser;
use ortholog_core::cli::{run, Cli};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match run(&cli, args) {
        Ok(outcome) => {
            let text = outcome.report.to_json();
            match &outcome.report_path {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            if outcome.report.passed() {
                ExitCode::SUCCESS
            } else {
                for v in outcome.report.verdicts.iter().filter(|v| !v.pass) {
                    eprintln!("failed: {} = {:e} (bound {:e})", v.name, v.value, v.bound);
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
