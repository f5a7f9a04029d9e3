//! `qleb`: decompositions, absolute-continuity checks and q-LAN convergence
//! studies from the command line.
//!
//! Exit codes: 0 pass / verdict true, 1 verdict false or a failed study,
//! 2 invalid input, 3 the two decomposition routes disagree, 4 support violation.

mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<qleb::Error> for Failure {
    fn from(e: qleb::Error) -> Self {
        let code = if matches!(e, qleb::Error::SupportViolation { .. }) { 4 } else { 2 };
        Self { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(cutoff) = cli.global.cutoff {
        if let Err(e) = qleb::linalg::set_default_cutoff(cutoff) {
            eprintln!("qleb: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Decompose(a) => commands::decompose(&cli.global, a),
        Command::Check(a) => commands::check(&cli.global, a),
        Command::Qlan(a) => commands::qlan(&cli.global, a),
        Command::Sample(a) => commands::sample(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("qleb: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
