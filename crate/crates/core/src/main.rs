use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use kcalc::cli::{run, Cli};

fn main() -> ExitCode {
    let mut argv: Vec<String> = std::env::args().collect();
    if let Some(first) = argv.first_mut() {
        *first = "kcalc".into();
    }
    let cli = Cli::parse();
    let report = match run(&cli, argv) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("kcalc: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = if cli.table { report.to_table() } else { report.to_json() };
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("kcalc: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    let mut stdout = std::io::stdout().lock();
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(stdout, "{text}");
    if report.results.get("all_passed") == Some(&serde_json::Value::Bool(false)) {
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
