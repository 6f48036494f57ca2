//! Caputo derivatives on uniform grids, plus the exact derivative of the
//! closed-form modes.
//!
//! Both quadratures return one value per grid node. The node at the base
//! point of the operator (`t = 0`) carries the value 0, the limit for any
//! sampled function with bounded derivatives; the node next to it is the
//! least accurate and [`trusted_nodes`] leaves both out.

use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{check, Error, Result};
use crate::modes::ModeSolution;
use crate::specfun::{gamma, EvalConfig};

/// Uniform grid `t_start = t_0 < t_1 < ... < t_{n-1} = t_end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_points: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::Grid("a time grid needs at least 3 points"));
        }
        if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
            return Err(Error::Grid("grid end points must be finite and increasing"));
        }
        Ok(TimeGrid {
            t_start,
            t_end,
            n_points,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn h(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.t_end
        } else {
            self.t_start + i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    /// Samples `g` at every node.
    pub fn sample<F: FnMut(f64) -> f64>(&self, mut g: F) -> Vec<f64> {
        (0..self.n_points).map(|i| g(self.node(i))).collect()
    }
}

/// Indices whose quadrature values enter residual norms: everything except
/// the base node and its neighbour.
pub fn trusted_nodes(grid: &TimeGrid) -> Range<usize> {
    let n = grid.n_points();
    if grid.t_start == 0.0 {
        2..n
    } else {
        0..n.saturating_sub(2)
    }
}

fn check_samples(grid: &TimeGrid, samples: &[f64]) -> Result<()> {
    if samples.len() != grid.n_points() {
        return Err(Error::Grid("sample count differs from the grid size"));
    }
    Ok(())
}

/// `(i+1)^e - i^e` with the `i = 0` weight fixed to 1 (also for `e = 0`).
fn weights(n: usize, e: f64) -> Vec<f64> {
    let mut w = Vec::with_capacity(n);
    let mut prev = 0.0;
    for i in 0..n {
        let next = libm::pow((i + 1) as f64, e);
        w.push(if i == 0 { 1.0 } else { next - prev });
        prev = next;
    }
    w
}

/// L1 approximation of `(1/Γ(1-a)) int_0^t g'(z) (t-z)^(-a) dz` on a grid
/// starting at 0:
///
/// ```text
/// D g(t_n) ~ h^(-a) / Γ(2-a) sum_{j<n} w_{n-j-1} (g_{j+1} - g_j),  w_i = (i+1)^(1-a) - i^(1-a)
/// ```
///
/// At `alpha = 1` this is the backward first difference.
pub fn caputo_forward(grid: &TimeGrid, samples: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check(alpha > 0.0 && alpha <= 1.0, "alpha", alpha)?;
    if grid.t_start() != 0.0 {
        return Err(Error::Grid("forward Caputo grid must start at t = 0"));
    }
    check_samples(grid, samples)?;
    let n = grid.n_points();
    let h = grid.h();
    let w = weights(n, 1.0 - alpha);
    let scale = libm::pow(h, -alpha) / gamma(2.0 - alpha)?;
    let diffs: Vec<f64> = samples.windows(2).map(|s| s[1] - s[0]).collect();
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    for m in 1..n {
        let sum: f64 = (0..m).map(|j| w[m - j - 1] * diffs[j]).sum();
        out.push(scale * sum);
    }
    Ok(out)
}

/// Approximation of `(1/Γ(2-b)) int_t^0 g''(z) (z-t)^(1-b) dz` on a grid
/// ending at 0.
///
/// In the reversed time `s = -t` the operator is the forward Caputo
/// derivative of order `b` of `G(s) = g(-s)`. With `G''` replaced on each
/// interval `[s_j, s_{j+1}]` by a constant `c_j`,
///
/// ```text
/// D g(-s_n) ~ h^(2-b) / Γ(3-b) sum_{j<n} w_{n-j-1} c_j,  w_i = (i+1)^(2-b) - i^(2-b)
/// ```
///
/// where `c_j` is the average of the central second differences at `s_j`
/// and `s_{j+1}` inside, a linear extrapolation on the first interval and
/// the backward second difference on the last one. At `beta = 2` the sum
/// collapses to that backward second difference.
pub fn caputo_backward(grid: &TimeGrid, samples: &[f64], beta: f64) -> Result<Vec<f64>> {
    check(beta > 1.0 && beta <= 2.0, "beta", beta)?;
    if grid.t_end() != 0.0 {
        return Err(Error::Grid("backward Caputo grid must end at t = 0"));
    }
    check_samples(grid, samples)?;
    let n = grid.n_points();
    let h = grid.h();
    // G_j = g(-s_j), s_j = j h
    let g: Vec<f64> = samples.iter().rev().copied().collect();
    let second = |j: usize| (g[j + 1] - 2.0 * g[j] + g[j - 1]) / (h * h);
    let w = weights(n, 2.0 - beta);
    let scale = libm::pow(h, 2.0 - beta) / gamma(3.0 - beta)?;

    let mut reversed = Vec::with_capacity(n);
    reversed.push(0.0);
    for m in 1..n {
        let mut sum = 0.0;
        for j in 0..m {
            let c = if j + 1 == m {
                if m == 1 {
                    second(1)
                } else {
                    second(m - 1)
                }
            } else if j == 0 {
                if n >= 4 {
                    1.5 * second(1) - 0.5 * second(2)
                } else {
                    second(1)
                }
            } else {
                0.5 * (second(j) + second(j + 1))
            };
            sum += w[m - j - 1] * c;
        }
        reversed.push(scale * sum);
    }
    reversed.reverse();
    Ok(reversed)
}

/// Exact Caputo derivative of a closed-form mode at `t`.
pub fn caputo_exact_mode(mode: &ModeSolution, t: f64, cfg: &EvalConfig) -> Result<f64> {
    mode.caputo(t, cfg)
}
