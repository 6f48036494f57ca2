//! Flags, configuration files and their merge.
//!
//! Every subcommand accepts `--config FILE`, a JSON object whose keys are
//! the subcommand's long flag names with `-` replaced by `_`. Flags given
//! on the command line win over the file.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "fracmix", version, about = "Inverse source problem for a mixed fractional parabolic-hyperbolic equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a Mittag-Leffler function.
    Ml(MlCmd),
    /// Evaluate the determinants and classify uniqueness.
    Check(CheckCmd),
    /// Build a nontrivial solution on a degeneracy locus.
    Nontrivial(NontrivialCmd),
    /// Run the condition suite on a solution grid or a built-in construction.
    Verify(VerifyCmd),
    /// Sign maps of the determinants and their roots in q.
    Scan(ScanCmd),
}

/// Overlays the set flags of `flags` onto the JSON object in `config`.
/// Keys the file may not name are rejected.
pub fn merged<T: Serialize + DeserializeOwned + Default>(flags: &T, config: Option<&Path>) -> CliResult<T> {
    let Some(path) = config else {
        return Ok(serde_json::from_value(serde_json::to_value(flags)?)?);
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let mut base: Value = serde_json::from_str(&text)?;
    let Value::Object(base_map) = &mut base else {
        return Err(CliError::usage("config file must hold a JSON object"));
    };
    if let Value::Object(known) = serde_json::to_value(T::default())? {
        if let Some(key) = base_map.keys().find(|k| !known.contains_key(*k)) {
            return Err(CliError::usage(format!("{}: unknown key {key}", path.display())));
        }
    }
    if let Value::Object(set) = serde_json::to_value(flags)? {
        for (key, value) in set {
            if !matches!(value, Value::Null | Value::Bool(false)) {
                base_map.insert(key, value);
            }
        }
    }
    serde_json::from_value(base).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Full bivariate parameter set, only accepted from a config file.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BivariateArgs {
    pub gamma1: f64,
    pub gamma2: f64,
    pub a1: f64,
    pub b1: f64,
    pub delta1: f64,
    pub a2: f64,
    pub b2: f64,
    pub delta2: f64,
    pub a3: f64,
    pub delta3: f64,
    pub b3: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct MlCmd {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<f64>,
    /// Three-parameter order `g` of `E^g_{alpha,beta}` (default 1).
    #[arg(long)]
    pub order: Option<u32>,
    /// Evaluate `sum (s+1) z^s / Γ(alpha s + beta)` instead.
    #[arg(long)]
    pub collapsed: bool,
    #[arg(skip)]
    pub bivariate: Option<BivariateArgs>,
    /// JSON record destination.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckCmd {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Largest mode index K (default 8).
    #[arg(long)]
    pub modes: Option<u32>,
    /// Zero tolerance (default 1e-9 (1 + p + q)).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parameters of a nontrivial construction.
#[derive(Debug, Default, Clone, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstructionArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Upper height; may be left out when `--q-bracket` is given.
    #[arg(long)]
    pub q: Option<f64>,
    /// Locate q in `LO,HI` as a root of the selected determinant.
    #[arg(long, value_delimiter = ',')]
    pub q_bracket: Option<Vec<f64>>,
    /// 0 for the zero mode (default), m >= 1 for mode m.
    #[arg(long)]
    pub mode: Option<u32>,
    /// Zero-mode source constant (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub f0: Option<f64>,
    /// W1m'(0) of a mode solution (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub w1: Option<f64>,
    /// W2m'(0) of a mode solution (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub w2: Option<f64>,
    /// Zero tolerance for the determinant (default 1e-9 (1 + p + q)).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Intervals in x and on each time branch (default 64).
    #[arg(long)]
    pub intervals: Option<usize>,
}

#[derive(Debug, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct NontrivialCmd {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub construction: ConstructionArgs,
    /// Solution grid CSV (x,t,u,f).
    #[arg(long)]
    pub grid_out: Option<PathBuf>,
    /// Verification report JSON.
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Debug, Default, Clone, Copy, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceArgs {
    #[arg(long)]
    pub residual_tol: Option<f64>,
    #[arg(long)]
    pub boundary_tol: Option<f64>,
    #[arg(long)]
    pub gluing_tol: Option<f64>,
    #[arg(long)]
    pub transmitting_tol: Option<f64>,
}

#[derive(Debug, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyCmd {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Solution grid CSV to check (needs --alpha and --beta); without it a
    /// construction is built from the construction flags.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub construction: ConstructionArgs,
    /// Added to the lower-branch slope at t = 0 of the selected mode.
    #[arg(long, allow_hyphen_values = true)]
    pub perturb: Option<f64>,
    /// Check the identically zero field instead of a construction.
    #[arg(long)]
    pub zero_field: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub tolerances: ToleranceArgs,
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanCmd {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// `LO,HI`.
    #[arg(long, value_delimiter = ',')]
    pub p_range: Option<Vec<f64>>,
    #[arg(long)]
    pub p_points: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub q_range: Option<Vec<f64>>,
    #[arg(long)]
    pub q_points: Option<usize>,
    /// Mode indices mapped besides Δ0, e.g. `1,2`.
    #[arg(long, value_delimiter = ',')]
    pub modes: Option<Vec<u32>>,
    #[arg(long)]
    pub root_tol: Option<f64>,
    /// Level map CSV (p,q,k,delta,sign).
    #[arg(long)]
    pub map_out: Option<PathBuf>,
    /// Roots JSON.
    #[arg(long)]
    pub roots_out: Option<PathBuf>,
}
