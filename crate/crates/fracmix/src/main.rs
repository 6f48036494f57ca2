use std::process::ExitCode;

use clap::Parser;
use fracmix::cli::Cli;
use fracmix::{eval_config, run, PRECISION_ENV};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let precision = std::env::var(PRECISION_ENV).ok();
    let result = eval_config(precision.as_deref()).and_then(|cfg| run(&cli.command, &cfg, &mut std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracmix: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
