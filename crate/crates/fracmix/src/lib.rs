//! Command-line driver for `fracmix-core`: argument and config handling,
//! CSV/JSON formats and the subcommands.

pub mod cli;
pub mod commands;
pub mod error;
pub mod format;

use std::io::Write;

use fracmix_core::specfun::EvalConfig;

use cli::{merged, Command};
use error::{CliError, CliResult};

/// Environment variable that fixes the mantissa width of the
/// high-precision Mittag-Leffler path.
pub const PRECISION_ENV: &str = "FRACMIX_PRECISION";

pub fn eval_config(precision: Option<&str>) -> CliResult<EvalConfig> {
    let precision_bits = match precision {
        None => None,
        Some(s) => Some(
            s.trim()
                .parse::<u32>()
                .ok()
                .filter(|&b| (53..=65536).contains(&b))
                .ok_or_else(|| CliError::usage(format!("{PRECISION_ENV} must be an integer in 53..=65536, got {s}")))?,
        ),
    };
    Ok(EvalConfig { precision_bits })
}

/// Runs one parsed command.
pub fn run(command: &Command, cfg: &EvalConfig, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Ml(c) => commands::run_ml(&merged(c, c.config.as_deref())?, cfg, out),
        Command::Check(c) => commands::run_check(&merged(c, c.config.as_deref())?, cfg, out),
        Command::Nontrivial(c) => commands::run_nontrivial(&merged(c, c.config.as_deref())?, cfg, out),
        Command::Verify(c) => commands::run_verify(&merged(c, c.config.as_deref())?, cfg, out),
        Command::Scan(c) => commands::run_scan(&merged(c, c.config.as_deref())?, cfg, out),
    }
}
