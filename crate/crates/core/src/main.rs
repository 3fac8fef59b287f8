use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use top_nlidb::cli::{run_batch, run_repl, Session, SessionConfig};

fn main() -> ExitCode {
    let config = SessionConfig::parse();
    let session = match Session::load(&config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    for w in &session.warnings {
        eprintln!("warning: {w}");
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &config.batch {
        Some(path) => {
            let questions = match std::fs::read_to_string(path) {
                Ok(q) => q,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            };
            match run_batch(&session, &questions, &mut out) {
                Ok(summary) => {
                    let _ = out.flush();
                    eprintln!(
                        "{} question(s), {} failed, {} internal error(s), {} divergence(s)",
                        summary.questions, summary.failures, summary.internal_errors, summary.divergences
                    );
                    ExitCode::from(summary.exit_code())
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        None => {
            let stdin = io::stdin();
            match run_repl(&session, &mut stdin.lock(), &mut out) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
