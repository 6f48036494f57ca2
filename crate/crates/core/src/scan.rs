//! Degeneracy loci: roots of `Δ_0` and `Δ_k` in `q` or `p`, and sign maps
//! over a `(p, q)` rectangle.

use alloc::vec::Vec;

use crate::error::{check, Error, Result};
use crate::inverse::{delta0, delta_k};
use crate::modes::{ModeIndex, ProblemParameters};
use crate::specfun::EvalConfig;

/// Final bracket width of every root.
pub const BRACKET_WIDTH: f64 = 1e-12;
const SECANT_STEPS: usize = 8;
const MAX_STEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: f64,
    /// The determinant at `value`.
    pub residual: f64,
    pub bracket: (f64, f64),
}

/// Closed interval sampled at `points >= 2` equally spaced values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Range {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        check(lo > 0.0 && lo.is_finite(), "range start", lo)?;
        check(hi >= lo && hi.is_finite(), "range end", hi)?;
        check(points >= 2, "range points", points as f64)?;
        Ok(Range { lo, hi, points })
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.points - 1) as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub alpha: f64,
    pub beta: f64,
    pub p: Range,
    pub q: Range,
    /// Mode indices mapped in addition to `Δ_0`.
    pub modes: Vec<u32>,
    pub root_tolerance: f64,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        ProblemParameters::new(self.alpha, self.beta, self.p.lo, self.q.lo)?;
        Range::new(self.p.lo, self.p.hi, self.p.points)?;
        Range::new(self.q.lo, self.q.hi, self.q.points)?;
        for &k in &self.modes {
            ModeIndex::new(k)?;
        }
        check(self.root_tolerance > 0.0, "root tolerance", self.root_tolerance)
    }
}

/// `Δ_0` for `k = 0`, `Δ_k` otherwise.
pub fn delta(params: &ProblemParameters, k: u32, cfg: &EvalConfig) -> Result<f64> {
    if k == 0 {
        delta0(params)
    } else {
        delta_k(params, ModeIndex::new(k)?, cfg)
    }
}

/// Root of `g` in `[lo, hi]`: secant steps kept inside the bracket, then
/// bisection down to [`BRACKET_WIDTH`].
pub fn find_root<G: FnMut(f64) -> Result<f64>>(mut g: G, lo: f64, hi: f64) -> Result<Root> {
    check(lo < hi, "bracket", hi - lo)?;
    let (mut a, mut b) = (lo, hi);
    let (mut ga, mut gb) = (g(a)?, g(b)?);
    if ga == 0.0 {
        return Ok(Root { value: a, residual: 0.0, bracket: (a, a) });
    }
    if gb == 0.0 {
        return Ok(Root { value: b, residual: 0.0, bracket: (b, b) });
    }
    if ga.signum() == gb.signum() || ga.is_nan() || gb.is_nan() {
        return Err(Error::NoSignChange { lo, hi });
    }
    // the two latest iterates
    let (mut x0, mut g0, mut x1, mut g1) = (a, ga, b, gb);
    for step in 0..MAX_STEPS {
        if b - a <= BRACKET_WIDTH {
            break;
        }
        let secant = x1 - g1 * (x1 - x0) / (g1 - g0);
        let x = if step < SECANT_STEPS && secant > a && secant < b {
            secant
        } else {
            0.5 * (a + b)
        };
        let gx = g(x)?;
        if gx == 0.0 {
            return Ok(Root { value: x, residual: 0.0, bracket: (x, x) });
        }
        if gx.signum() == ga.signum() {
            a = x;
            ga = gx;
        } else {
            b = x;
            gb = gx;
        }
        (x0, g0, x1, g1) = (x1, g1, x, gx);
    }
    let (value, residual) = if ga.abs() <= gb.abs() { (a, ga) } else { (b, gb) };
    Ok(Root {
        value,
        residual,
        bracket: (a, b),
    })
}

/// `q*` in `bracket` with `Δ_k(alpha, beta, p, q*) = 0` (`k = 0` for `Δ_0`).
pub fn find_degenerate_q(alpha: f64, beta: f64, p: f64, k: u32, bracket: (f64, f64), cfg: &EvalConfig) -> Result<Root> {
    ProblemParameters::new(alpha, beta, p, bracket.0)?;
    find_root(|q| delta(&ProblemParameters::new(alpha, beta, p, q)?, k, cfg), bracket.0, bracket.1)
}

/// `p*` in `bracket` with `Δ_k(alpha, beta, p*, q) = 0`.
pub fn find_degenerate_p(alpha: f64, beta: f64, q: f64, k: u32, bracket: (f64, f64), cfg: &EvalConfig) -> Result<Root> {
    ProblemParameters::new(alpha, beta, bracket.0, q)?;
    find_root(|p| delta(&ProblemParameters::new(alpha, beta, p, q)?, k, cfg), bracket.0, bracket.1)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub p: f64,
    pub q: f64,
    pub k: u32,
    /// `None` where the evaluation was out of range.
    pub delta: Option<f64>,
}

impl Cell {
    /// `-1`, `0` or `1`; `None` for unknown cells.
    pub fn sign(&self) -> Option<i8> {
        self.delta.map(|d| {
            if d > 0.0 {
                1
            } else if d < 0.0 {
                -1
            } else {
                0
            }
        })
    }
}

/// Layers for `k = 0` and each configured mode, in that order; within a
/// layer rows run over `p` and columns over `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelMap {
    pub layers: Vec<u32>,
    pub p: Range,
    pub q: Range,
    pub cells: Vec<Cell>,
}

impl LevelMap {
    pub fn cell(&self, layer: usize, i: usize, j: usize) -> &Cell {
        &self.cells[(layer * self.p.points + i) * self.q.points + j]
    }
}

pub fn level_map(config: &ScanConfig, cfg: &EvalConfig) -> Result<LevelMap> {
    config.validate()?;
    let mut layers = alloc::vec![0];
    layers.extend(config.modes.iter().copied());
    let mut cells = Vec::with_capacity(layers.len() * config.p.points * config.q.points);
    for &k in &layers {
        for i in 0..config.p.points {
            let p = config.p.value(i);
            for j in 0..config.q.points {
                let q = config.q.value(j);
                let params = ProblemParameters::new(config.alpha, config.beta, p, q)?;
                let delta = match delta(&params, k, cfg) {
                    Ok(d) if d.is_finite() => Some(d),
                    Ok(_) | Err(Error::Range { .. }) | Err(Error::Pole { .. }) => None,
                    Err(e) => return Err(e),
                };
                cells.push(Cell { p, q, k, delta });
            }
        }
    }
    Ok(LevelMap {
        layers,
        p: config.p,
        q: config.q,
        cells,
    })
}
