//! The five subcommands. Each writes a human summary to `out` and its
//! machine-readable files to the configured paths.

use std::io::Write;
use std::path::Path;

use fracmix_core::assembly::{SolutionField, SourceField};
use fracmix_core::inverse::{
    build_nontrivial_mode, build_nontrivial_zero, classify, default_tolerance, FreeConstants, NontrivialSolution,
    Verdict,
};
use fracmix_core::modes::{ModeConstants, ProblemParameters};
use fracmix_core::scan::{find_degenerate_q, level_map, Range, Root, ScanConfig};
use fracmix_core::specfun::{bivariate_ml, ml_family_traced, BivariateMlSpec, EvalConfig};
use fracmix_core::verify::{verify, Grids, ResidualPath, SampledField, Tolerances, VerificationReport};
use serde::Serialize;

use crate::cli::{CheckCmd, ConstructionArgs, MlCmd, NontrivialCmd, ScanCmd, ToleranceArgs, VerifyCmd};
use crate::error::{CliError, CliResult};
use crate::format::{num, read_solution_grid, to_json, write_level_map, write_solution_grid, SCHEMA_VERSION};

fn required<T: Copy>(v: Option<T>, name: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::usage(format!("missing --{name}")))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct MlRecord {
    schema_version: &'static str,
    function: &'static str,
    alpha: f64,
    beta: f64,
    z: f64,
    order: u32,
    value: f64,
    method: &'static str,
}

#[derive(Serialize)]
struct BivariateRecord {
    schema_version: &'static str,
    function: &'static str,
    spec: crate::cli::BivariateArgs,
    value: f64,
}

pub fn run_ml(cmd: &MlCmd, cfg: &EvalConfig, out: &mut dyn Write) -> CliResult<()> {
    let json = if let Some(b) = cmd.bivariate {
        let spec = BivariateMlSpec {
            gamma1: b.gamma1,
            gamma2: b.gamma2,
            a1: b.a1,
            b1: b.b1,
            delta1: b.delta1,
            a2: b.a2,
            b2: b.b2,
            delta2: b.delta2,
            a3: b.a3,
            delta3: b.delta3,
            b3: b.b3,
            x: b.x,
            y: b.y,
        };
        let value = bivariate_ml(&spec, cfg)?;
        writeln!(out, "{}", num(value))?;
        to_json(&BivariateRecord {
            schema_version: SCHEMA_VERSION,
            function: "bivariate",
            spec: b,
            value,
        })?
    } else {
        let alpha = required(cmd.alpha, "alpha")?;
        let beta = required(cmd.beta, "beta")?;
        let z = required(cmd.z, "z")?;
        if !(alpha > 0.0) || !(beta > 0.0) || !z.is_finite() {
            return Err(CliError::usage("ml needs alpha > 0, beta > 0 and a finite z"));
        }
        let order = if cmd.collapsed { 2 } else { cmd.order.unwrap_or(1) };
        if order == 0 {
            return Err(CliError::usage("--order must be positive"));
        }
        let (value, method) = ml_family_traced(alpha, beta, order, z, cfg)?;
        writeln!(out, "{}", num(value))?;
        to_json(&MlRecord {
            schema_version: SCHEMA_VERSION,
            function: if cmd.collapsed { "collapsed" } else { "ml" },
            alpha,
            beta,
            z,
            order,
            value,
            method: method.name(),
        })?
    };
    if let Some(path) = &cmd.output {
        write_file(path, json.as_bytes())?;
    }
    Ok(())
}

fn params(alpha: Option<f64>, beta: Option<f64>, p: Option<f64>, q: Option<f64>) -> CliResult<ProblemParameters> {
    Ok(ProblemParameters::new(
        required(alpha, "alpha")?,
        required(beta, "beta")?,
        required(p, "p")?,
        required(q, "q")?,
    )?)
}

#[derive(Serialize)]
struct ParamsRecord {
    alpha: f64,
    beta: f64,
    p: f64,
    q: f64,
}

impl From<&ProblemParameters> for ParamsRecord {
    fn from(p: &ProblemParameters) -> Self {
        ParamsRecord {
            alpha: p.alpha,
            beta: p.beta,
            p: p.p,
            q: p.q,
        }
    }
}

#[derive(Serialize)]
struct DeltaRecord {
    k: u32,
    delta: f64,
}

#[derive(Serialize)]
struct CheckRecord {
    schema_version: &'static str,
    params: ParamsRecord,
    delta0: f64,
    deltas: Vec<DeltaRecord>,
    verdict: &'static str,
    degenerate_modes: Vec<u32>,
    tolerance: f64,
}

pub fn run_check(cmd: &CheckCmd, cfg: &EvalConfig, out: &mut dyn Write) -> CliResult<()> {
    let pr = params(cmd.alpha, cmd.beta, cmd.p, cmd.q)?;
    let k_max = cmd.modes.unwrap_or(8);
    let tol = cmd.tol.unwrap_or_else(|| default_tolerance(&pr));
    let report = classify(&pr, k_max, tol, cfg)?;
    let degenerate_modes = match &report.verdict {
        Verdict::Unique => Vec::new(),
        Verdict::DegenerateZeroMode { modes } | Verdict::DegenerateModes(modes) => modes.clone(),
    };
    writeln!(out, "delta0 {}", num(report.delta0))?;
    for (i, d) in report.deltas.iter().enumerate() {
        writeln!(out, "delta{} {}", i + 1, num(*d))?;
    }
    writeln!(out, "verdict {}", report.verdict.name())?;
    let record = CheckRecord {
        schema_version: SCHEMA_VERSION,
        params: (&pr).into(),
        delta0: report.delta0,
        deltas: report
            .deltas
            .iter()
            .enumerate()
            .map(|(i, &delta)| DeltaRecord { k: i as u32 + 1, delta })
            .collect(),
        verdict: report.verdict.name(),
        degenerate_modes,
        tolerance: report.tolerance,
    };
    if let Some(path) = &cmd.output {
        write_file(path, to_json(&record)?.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RootRecord {
    k: u32,
    p: f64,
    q: f64,
    residual: f64,
    bracket: [f64; 2],
}

struct Construction {
    solution: NontrivialSolution,
    root: Option<RootRecord>,
    grids: Grids,
}

fn construct(args: &ConstructionArgs, cfg: &EvalConfig) -> CliResult<Construction> {
    let alpha = required(args.alpha, "alpha")?;
    let beta = required(args.beta, "beta")?;
    let p = required(args.p, "p")?;
    let m = args.mode.unwrap_or(0);
    let (q, root) = match (&args.q_bracket, args.q) {
        (Some(b), _) => {
            if b.len() != 2 {
                return Err(CliError::usage("--q-bracket takes LO,HI"));
            }
            let r: Root = find_degenerate_q(alpha, beta, p, m, (b[0], b[1]), cfg)?;
            let record = RootRecord {
                k: m,
                p,
                q: r.value,
                residual: r.residual,
                bracket: [r.bracket.0, r.bracket.1],
            };
            (r.value, Some(record))
        }
        (None, Some(q)) => (q, None),
        (None, None) => return Err(CliError::usage("missing --q or --q-bracket")),
    };
    let pr = ProblemParameters::new(alpha, beta, p, q)?;
    let solution = if m == 0 {
        build_nontrivial_zero(&pr, args.f0.unwrap_or(1.0), args.tol)?
    } else {
        build_nontrivial_mode(&pr, m, args.w1.unwrap_or(1.0), args.w2.unwrap_or(0.0), args.tol, cfg)?
    };
    let grids = Grids::uniform(&pr, args.intervals.unwrap_or(64))?;
    Ok(Construction { solution, root, grids })
}

/// Default tolerances; the residual bound is looser for mode solutions,
/// whose accuracy is set by the Mittag-Leffler evaluation.
fn tolerances(args: &ToleranceArgs, mode: bool) -> Tolerances {
    let d = Tolerances {
        residual: if mode { 1e-8 } else { 1e-10 },
        ..Tolerances::default()
    };
    Tolerances {
        residual: args.residual_tol.unwrap_or(d.residual),
        boundary: args.boundary_tol.unwrap_or(d.boundary),
        gluing: args.gluing_tol.unwrap_or(d.gluing),
        transmitting: args.transmitting_tol.unwrap_or(d.transmitting),
    }
}

#[derive(Serialize)]
struct CheckLine {
    name: &'static str,
    norm: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct FreeRecord {
    mode: u32,
    f0: Option<f64>,
    w1mp0: Option<f64>,
    w2mp0: Option<f64>,
}

#[derive(Serialize)]
struct ReportRecord {
    schema_version: &'static str,
    params: ParamsRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    free_constants: Option<FreeRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    root: Option<RootRecord>,
    path: &'static str,
    x_intervals: usize,
    upper_points: usize,
    lower_points: usize,
    checks: Vec<CheckLine>,
    /// Largest difference between the explicit formulas and the mode
    /// solutions on the grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    formula_gap: Option<f64>,
    passed: bool,
}

fn report_record(
    params: &ProblemParameters,
    report: &VerificationReport,
    free: Option<FreeRecord>,
    root: Option<RootRecord>,
    formula_gap: Option<f64>,
) -> ReportRecord {
    ReportRecord {
        schema_version: SCHEMA_VERSION,
        params: params.into(),
        free_constants: free,
        root,
        path: report.path.name(),
        x_intervals: report.grids.x.intervals(),
        upper_points: report.grids.upper.n_points(),
        lower_points: report.grids.lower.n_points(),
        checks: report
            .checks()
            .iter()
            .map(|c| CheckLine {
                name: c.name,
                norm: c.norm,
                tolerance: c.tolerance,
                pass: c.pass,
            })
            .collect(),
        formula_gap,
        passed: report.passed(),
    }
}

fn print_report(out: &mut dyn Write, report: &VerificationReport) -> CliResult<()> {
    for c in report.checks() {
        let verdict = if c.pass { "pass" } else { "FAIL" };
        writeln!(out, "{:<16} {} <= {} {verdict}", c.name, num(c.norm), num(c.tolerance))?;
    }
    Ok(())
}

fn free_record(sol: &NontrivialSolution) -> FreeRecord {
    match sol.free {
        FreeConstants::ZeroMode { f0 } => FreeRecord {
            mode: 0,
            f0: Some(f0),
            w1mp0: None,
            w2mp0: None,
        },
        FreeConstants::Mode { m, w1mp0, w2mp0 } => FreeRecord {
            mode: m,
            f0: None,
            w1mp0: Some(w1mp0),
            w2mp0: Some(w2mp0),
        },
    }
}

/// Samples the explicit formulas on the grids.
fn formula_samples(sol: &NontrivialSolution, grids: &Grids) -> CliResult<SampledField> {
    let xs = grids.x.nodes();
    let rows = |nodes: Vec<f64>| -> CliResult<Vec<Vec<f64>>> {
        nodes
            .into_iter()
            .map(|t| xs.iter().map(|&x| sol.u(x, t).map_err(CliError::from)).collect())
            .collect()
    };
    let source = xs.iter().map(|&x| sol.f(x)).collect::<Result<_, _>>()?;
    Ok(SampledField::new(
        sol.params,
        *grids,
        rows(grids.upper.nodes())?,
        rows(grids.lower.nodes())?,
        source,
    )?)
}

fn max_gap(a: &SampledField, b: &SampledField) -> f64 {
    let rows = |s: &SampledField| s.upper.iter().chain(&s.lower).flatten().copied().collect::<Vec<f64>>();
    rows(a)
        .iter()
        .zip(rows(b))
        .fold(0.0, |acc, (x, y)| if (x - y).is_nan() { f64::NAN } else { f64::max(acc, (x - y).abs()) })
}

fn finish(report: &VerificationReport) -> CliResult<()> {
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks().iter().filter(|c| !c.pass).map(|c| c.name).collect();
        Err(CliError::Verification(failed.join(", ")))
    }
}

pub fn run_nontrivial(cmd: &NontrivialCmd, cfg: &EvalConfig, out: &mut dyn Write) -> CliResult<()> {
    let Construction { solution, root, grids } = construct(&cmd.construction, cfg)?;
    let pr = solution.params;
    writeln!(out, "q {}", num(pr.q))?;
    let mode = !matches!(solution.free, FreeConstants::ZeroMode { .. });
    let tol = tolerances(&ToleranceArgs::default(), mode);
    let report = verify(&solution.field, &solution.source, &grids, ResidualPath::Exact, tol, cfg)?;
    let formulas = formula_samples(&solution, &grids)?;
    let series = SampledField::sample(&solution.field, &solution.source, &grids, cfg)?;
    let gap = max_gap(&formulas, &series);
    print_report(out, &report)?;
    writeln!(out, "formula_gap      {}", num(gap))?;
    if let Some(path) = &cmd.grid_out {
        let mut bytes = Vec::new();
        write_solution_grid(&formulas, &mut bytes)?;
        write_file(path, &bytes)?;
    }
    if let Some(path) = &cmd.report_out {
        let record = report_record(&pr, &report, Some(free_record(&solution)), root, Some(gap));
        write_file(path, to_json(&record)?.as_bytes())?;
    }
    finish(&report)
}

pub fn run_verify(cmd: &VerifyCmd, cfg: &EvalConfig, out: &mut dyn Write) -> CliResult<()> {
    let c = &cmd.construction;
    let (pr, report, free, root) = if let Some(path) = &cmd.grid {
        let file = std::fs::File::open(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let sampled = read_solution_grid(required(c.alpha, "alpha")?, required(c.beta, "beta")?, file)?;
        let report = sampled.verify(tolerances(&cmd.tolerances, false))?;
        (sampled.params, report, None, None)
    } else if cmd.zero_field {
        let pr = params(c.alpha, c.beta, c.p, c.q)?;
        let zero = ModeConstants::default();
        let field = SolutionField::zero_mode(pr, zero, zero)?;
        let source = SourceField {
            coefficients: Default::default(),
        };
        let grids = Grids::uniform(&pr, c.intervals.unwrap_or(64))?;
        let report = verify(&field, &source, &grids, ResidualPath::Exact, tolerances(&cmd.tolerances, false), cfg)?;
        (pr, report, None, None)
    } else {
        let Construction { solution, root, grids } = construct(c, cfg)?;
        let pr = solution.params;
        let delta = cmd.perturb.unwrap_or(0.0);
        let field = match solution.free {
            FreeConstants::ZeroMode { .. } => {
                let (upper, lower) = solution.field.zero_modes();
                let mut lower = lower.own;
                lower.slope0 += delta;
                SolutionField::zero_mode(pr, upper.own, lower)?
            }
            FreeConstants::Mode { m, .. } => {
                let mut mode = solution.field.modes()[m as usize - 1].clone();
                mode.lower_cos.own.slope0 += delta;
                SolutionField::with_modes(pr, vec![mode])?
            }
        };
        let is_mode = !matches!(solution.free, FreeConstants::ZeroMode { .. });
        let tol = tolerances(&cmd.tolerances, is_mode);
        let report = verify(&field, &solution.source, &grids, ResidualPath::Exact, tol, cfg)?;
        (pr, report, Some(free_record(&solution)), root)
    };
    print_report(out, &report)?;
    if let Some(path) = &cmd.report_out {
        write_file(path, to_json(&report_record(&pr, &report, free, root, None))?.as_bytes())?;
    }
    finish(&report)
}

#[derive(Serialize)]
struct RootsRecord {
    schema_version: &'static str,
    alpha: f64,
    beta: f64,
    roots: Vec<RootRecord>,
}

fn range(v: &Option<Vec<f64>>, points: Option<usize>, name: &str) -> CliResult<Range> {
    let v = v.as_ref().ok_or_else(|| CliError::usage(format!("missing --{name}-range")))?;
    if v.len() != 2 {
        return Err(CliError::usage(format!("--{name}-range takes LO,HI")));
    }
    Ok(Range::new(v[0], v[1], points.unwrap_or(21))?)
}

pub fn run_scan(cmd: &ScanCmd, cfg: &EvalConfig, out: &mut dyn Write) -> CliResult<()> {
    let config = ScanConfig {
        alpha: required(cmd.alpha, "alpha")?,
        beta: required(cmd.beta, "beta")?,
        p: range(&cmd.p_range, cmd.p_points, "p")?,
        q: range(&cmd.q_range, cmd.q_points, "q")?,
        modes: cmd.modes.clone().unwrap_or_default(),
        root_tolerance: cmd.root_tol.unwrap_or(1e-10),
    };
    let map = level_map(&config, cfg)?;
    let mut roots = Vec::new();
    for (layer, &k) in map.layers.iter().enumerate() {
        for i in 0..map.p.points {
            for j in 1..map.q.points {
                let (a, b) = (map.cell(layer, i, j - 1), map.cell(layer, i, j));
                let (Some(sa), Some(sb)) = (a.sign(), b.sign()) else {
                    continue;
                };
                if sa * sb >= 0 && !(sa == 0 && j == 1) && sb != 0 {
                    continue;
                }
                let r = if sb == 0 {
                    Root {
                        value: b.q,
                        residual: 0.0,
                        bracket: (b.q, b.q),
                    }
                } else if sa == 0 {
                    Root {
                        value: a.q,
                        residual: 0.0,
                        bracket: (a.q, a.q),
                    }
                } else {
                    find_degenerate_q(config.alpha, config.beta, a.p, k, (a.q, b.q), cfg)?
                };
                if r.residual.abs() > config.root_tolerance * (1.0 + a.p) {
                    writeln!(out, "warning: root k={k} p={} has residual {}", num(a.p), num(r.residual))?;
                }
                roots.push(RootRecord {
                    k,
                    p: a.p,
                    q: r.value,
                    residual: r.residual,
                    bracket: [r.bracket.0, r.bracket.1],
                });
            }
        }
    }
    let unknown = map.cells.iter().filter(|c| c.delta.is_none()).count();
    writeln!(out, "cells {} unknown {} roots {}", map.cells.len(), unknown, roots.len())?;
    for r in &roots {
        writeln!(out, "root k={} p={} q={} residual={}", r.k, num(r.p), num(r.q), num(r.residual))?;
    }
    if let Some(path) = &cmd.map_out {
        let mut bytes = Vec::new();
        write_level_map(&map, &mut bytes)?;
        write_file(path, &bytes)?;
    }
    if let Some(path) = &cmd.roots_out {
        let record = RootsRecord {
            schema_version: SCHEMA_VERSION,
            alpha: config.alpha,
            beta: config.beta,
            roots,
        };
        write_file(path, to_json(&record)?.as_bytes())?;
    }
    Ok(())
}
