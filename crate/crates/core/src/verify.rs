//! Checks of a candidate `(u, f)` against the equation, the boundary
//! conditions, gluing and the transmitting condition.
//!
//! Series fields are checked through their closed forms ([`verify`]);
//! sampled fields, e.g. read back from a file, through finite differences
//! and Caputo quadrature ([`verify_sampled`]).

use alloc::vec::Vec;

use crate::assembly::{SolutionField, SourceField, XGrid};
use crate::caputo::{caputo_backward, caputo_forward, trusted_nodes, TimeGrid};
use crate::error::{check, Error, Result};
use crate::modes::{Branch, ProblemParameters};
use crate::specfun::EvalConfig;

/// Per-check tolerances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub residual: f64,
    pub boundary: f64,
    pub gluing: f64,
    pub transmitting: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 1e-10,
            boundary: 1e-12,
            gluing: 1e-12,
            transmitting: 1e-10,
        }
    }
}

/// Space grid on `[0, 1]` and time grids on `[0, q]` and `[-p, 0]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grids {
    pub x: XGrid,
    pub upper: TimeGrid,
    pub lower: TimeGrid,
}

impl Grids {
    pub fn new(params: &ProblemParameters, x_intervals: usize, upper_points: usize, lower_points: usize) -> Result<Self> {
        params.validate()?;
        Ok(Grids {
            x: XGrid::new(x_intervals)?,
            upper: TimeGrid::new(0.0, params.q, upper_points)?,
            lower: TimeGrid::new(-params.p, 0.0, lower_points)?,
        })
    }

    /// `n` intervals on `[0, 1]`, on `[0, q]` and on `[-p, 0]`, i.e. the
    /// relative step `h = 1/n` in every direction. `n` must be even.
    pub fn uniform(params: &ProblemParameters, n: usize) -> Result<Self> {
        check(n >= 4, "intervals", n as f64)?;
        Grids::new(params, n, n + 1, n + 1)
    }
}

/// How the time derivatives in the equation residual are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualPath {
    /// Closed-form Caputo derivatives and `u_xx` of every mode.
    Exact,
    /// Caputo quadrature along each x line and central differences in x.
    Quadrature,
}

impl ResidualPath {
    pub fn name(self) -> &'static str {
        match self {
            ResidualPath::Exact => "exact",
            ResidualPath::Quadrature => "quadrature",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub norm: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerificationReport {
    pub residual_upper: f64,
    pub residual_lower: f64,
    pub bc_periodic: f64,
    pub bc_neumann: f64,
    pub bc_bottom: f64,
    pub bc_top: f64,
    pub gluing_gap: f64,
    pub transmitting_gap: f64,
    pub path: ResidualPath,
    pub grids: Grids,
    pub tolerances: Tolerances,
}

impl VerificationReport {
    pub fn checks(&self) -> [CheckResult; 8] {
        let t = &self.tolerances;
        let c = |name, norm: f64, tolerance| CheckResult {
            name,
            norm,
            tolerance,
            pass: norm <= tolerance,
        };
        [
            c("residual_upper", self.residual_upper, t.residual),
            c("residual_lower", self.residual_lower, t.residual),
            c("bc_periodic", self.bc_periodic, t.boundary),
            c("bc_neumann", self.bc_neumann, t.boundary),
            c("bc_bottom", self.bc_bottom, t.boundary),
            c("bc_top", self.bc_top, t.boundary),
            c("gluing", self.gluing_gap, t.gluing),
            c("transmitting", self.transmitting_gap, t.transmitting),
        ]
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.pass)
    }
}

fn max_abs(acc: f64, v: f64) -> f64 {
    // NaN must never read as a pass
    if v.is_nan() || acc.is_nan() {
        f64::NAN
    } else {
        acc.max(v.abs())
    }
}

/// Equation residuals `(upper, lower)` through the closed forms, over
/// every node of the grids.
pub fn pde_residuals_exact(
    field: &SolutionField,
    source: &SourceField,
    grids: &Grids,
    cfg: &EvalConfig,
) -> Result<(f64, f64)> {
    let xs = grids.x.nodes();
    let f: Vec<f64> = xs.iter().map(|&x| source.eval(x)).collect::<Result<_>>()?;
    let branch_max = |branch: Branch, grid: &TimeGrid| -> Result<f64> {
        let mut worst = 0.0;
        for t in grid.nodes() {
            let u = field.coefficients_on(branch, t, cfg)?;
            let d = field.caputo_coefficients_on(branch, t, cfg)?;
            for (&x, &fx) in xs.iter().zip(&f) {
                worst = max_abs(worst, d.eval(x) - u.eval_xx(x) - fx);
            }
        }
        Ok(worst)
    };
    Ok((branch_max(Branch::Upper, &grids.upper)?, branch_max(Branch::Lower, &grids.lower)?))
}

/// Equation residuals `(upper, lower)` through quadrature on samples of
/// the field.
pub fn pde_residuals_quadrature(
    field: &SolutionField,
    source: &SourceField,
    grids: &Grids,
    cfg: &EvalConfig,
) -> Result<(f64, f64)> {
    let sampled = SampledField::sample(field, source, grids, cfg)?;
    sampled.pde_residuals(0.0)
}

/// `(periodic, neumann, bottom, top)` boundary norms of a series field.
/// `u_x(0, t)` is evaluated from the series itself.
pub fn check_boundary(field: &SolutionField, grids: &Grids, cfg: &EvalConfig) -> Result<[f64; 4]> {
    let params = field.params();
    let (mut periodic, mut neumann) = (0.0, 0.0);
    for (branch, grid) in [(Branch::Upper, &grids.upper), (Branch::Lower, &grids.lower)] {
        for t in grid.nodes() {
            let u = field.coefficients_on(branch, t, cfg)?;
            periodic = max_abs(periodic, u.eval(0.0) - u.eval(1.0));
            neumann = max_abs(neumann, u.eval_x(0.0));
        }
    }
    let bottom = field.coefficients_on(Branch::Lower, -params.p, cfg)?;
    let top = field.coefficients_on(Branch::Upper, params.q, cfg)?;
    let (mut b, mut t) = (0.0, 0.0);
    for x in grids.x.nodes() {
        b = max_abs(b, bottom.eval(x));
        t = max_abs(t, top.eval(x));
    }
    Ok([periodic, neumann, b, t])
}

/// `(gluing gap, transmitting gap)` of a series field over the x nodes.
/// Both one-sided limits at `t = 0` come from the closed forms.
pub fn check_gluing_transmitting(field: &SolutionField, x: &XGrid, cfg: &EvalConfig) -> Result<(f64, f64)> {
    let above = field.coefficients_on(Branch::Upper, 0.0, cfg)?;
    let below = field.coefficients_on(Branch::Lower, 0.0, cfg)?;
    let caputo_above = field.caputo_coefficients_on(Branch::Upper, 0.0, cfg)?;
    let slope_below = field.d_dtau_coefficients(0.0, cfg)?;
    let (mut glue, mut transmit) = (0.0, 0.0);
    for xi in x.nodes() {
        glue = max_abs(glue, above.eval(xi) - below.eval(xi));
        transmit = max_abs(transmit, caputo_above.eval(xi) - slope_below.eval(xi));
    }
    Ok((glue, transmit))
}

/// The full condition suite for a series field.
pub fn verify(
    field: &SolutionField,
    source: &SourceField,
    grids: &Grids,
    path: ResidualPath,
    tolerances: Tolerances,
    cfg: &EvalConfig,
) -> Result<VerificationReport> {
    let (residual_upper, residual_lower) = match path {
        ResidualPath::Exact => pde_residuals_exact(field, source, grids, cfg)?,
        ResidualPath::Quadrature => pde_residuals_quadrature(field, source, grids, cfg)?,
    };
    let [bc_periodic, bc_neumann, bc_bottom, bc_top] = check_boundary(field, grids, cfg)?;
    let (gluing_gap, transmitting_gap) = check_gluing_transmitting(field, &grids.x, cfg)?;
    Ok(VerificationReport {
        residual_upper,
        residual_lower,
        bc_periodic,
        bc_neumann,
        bc_bottom,
        bc_top,
        gluing_gap,
        transmitting_gap,
        path,
        grids: *grids,
        tolerances,
    })
}

/// A field known only at grid nodes. Rows are time nodes in increasing
/// order, each holding the values at the x nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    pub params: ProblemParameters,
    pub grids: Grids,
    pub upper: Vec<Vec<f64>>,
    pub lower: Vec<Vec<f64>>,
    pub source: Vec<f64>,
}

impl SampledField {
    pub fn new(
        params: ProblemParameters,
        grids: Grids,
        upper: Vec<Vec<f64>>,
        lower: Vec<Vec<f64>>,
        source: Vec<f64>,
    ) -> Result<Self> {
        params.validate()?;
        let nx = grids.x.intervals() + 1;
        let rows_ok = |rows: &[Vec<f64>], n: usize| rows.len() == n && rows.iter().all(|r| r.len() == nx);
        if !rows_ok(&upper, grids.upper.n_points()) || !rows_ok(&lower, grids.lower.n_points()) || source.len() != nx {
            return Err(Error::Grid("sample shape does not match the grids"));
        }
        Ok(SampledField {
            params,
            grids,
            upper,
            lower,
            source,
        })
    }

    pub fn sample(field: &SolutionField, source: &SourceField, grids: &Grids, cfg: &EvalConfig) -> Result<Self> {
        let xs = grids.x.nodes();
        let rows = |branch: Branch, grid: &TimeGrid| -> Result<Vec<Vec<f64>>> {
            grid.nodes()
                .into_iter()
                .map(|t| {
                    let c = field.coefficients_on(branch, t, cfg)?;
                    Ok(xs.iter().map(|&x| c.eval(x)).collect())
                })
                .collect()
        };
        let f = xs.iter().map(|&x| source.eval(x)).collect::<Result<_>>()?;
        SampledField::new(
            *field.params(),
            *grids,
            rows(Branch::Upper, &grids.upper)?,
            rows(Branch::Lower, &grids.lower)?,
            f,
        )
    }

    /// x nodes used by the residual: all but the two nearest each end.
    fn interior(&self) -> core::ops::RangeInclusive<usize> {
        2..=self.grids.x.intervals() - 2
    }

    fn u_xx(&self, row: &[f64], i: usize) -> f64 {
        let h = self.grids.x.h();
        (row[i - 1] - 2.0 * row[i] + row[i + 1]) / (h * h)
    }

    fn column(rows: &[Vec<f64>], i: usize) -> Vec<f64> {
        rows.iter().map(|r| r[i]).collect()
    }

    /// Equation residuals `(upper, lower)` over interior x nodes and the
    /// time nodes where the quadrature is trusted, skipping nodes with
    /// `|t| < window` times the branch length.
    ///
    /// A solution with a `|t|^alpha` or `|t|^beta` component has a fixed
    /// quadrature error at the first few nodes whatever the step, so a
    /// convergence study of such a solution needs `window > 0`.
    pub fn pde_residuals(&self, window: f64) -> Result<(f64, f64)> {
        check((0.0..1.0).contains(&window), "window", window)?;
        let ProblemParameters { alpha, beta, p, q } = self.params;
        let (mut upper, mut lower) = (0.0, 0.0);
        for i in self.interior() {
            let d = caputo_forward(&self.grids.upper, &Self::column(&self.upper, i), alpha)?;
            for j in trusted_nodes(&self.grids.upper) {
                if self.grids.upper.node(j) >= window * q {
                    upper = max_abs(upper, d[j] - self.u_xx(&self.upper[j], i) - self.source[i]);
                }
            }
            let d = caputo_backward(&self.grids.lower, &Self::column(&self.lower, i), beta)?;
            for j in trusted_nodes(&self.grids.lower) {
                if -self.grids.lower.node(j) >= window * p {
                    lower = max_abs(lower, d[j] - self.u_xx(&self.lower[j], i) - self.source[i]);
                }
            }
        }
        Ok((upper, lower))
    }

    /// `(periodic, neumann, bottom, top)`, with `u_x(0, t)` from the
    /// one-sided second-order difference.
    pub fn boundary(&self) -> [f64; 4] {
        let n = self.grids.x.intervals();
        let h = self.grids.x.h();
        let (mut periodic, mut neumann) = (0.0, 0.0);
        for row in self.upper.iter().chain(&self.lower) {
            periodic = max_abs(periodic, row[0] - row[n]);
            neumann = max_abs(neumann, (-3.0 * row[0] + 4.0 * row[1] - row[2]) / (2.0 * h));
        }
        let bottom = self.lower[0].iter().fold(0.0, |a, &v| max_abs(a, v));
        let top = self.upper[self.upper.len() - 1].iter().fold(0.0, |a, &v| max_abs(a, v));
        [periodic, neumann, bottom, top]
    }

    /// `(gluing gap, transmitting gap)`. The Caputo limit from above is read
    /// off the equation at `t = 0`, `u_xx + f`; the slope from below is the
    /// one-sided second-order difference in `-t`.
    pub fn gluing_transmitting(&self) -> (f64, f64) {
        let above = &self.upper[0];
        let m = self.lower.len() - 1;
        let below = &self.lower[m];
        let h = self.grids.lower.h();
        let glue = above.iter().zip(below).fold(0.0, |a, (&u, &l)| max_abs(a, u - l));
        let mut transmit = 0.0;
        for i in self.interior() {
            let caputo = self.u_xx(above, i) + self.source[i];
            let slope = (-3.0 * below[i] + 4.0 * self.lower[m - 1][i] - self.lower[m - 2][i]) / (2.0 * h);
            transmit = max_abs(transmit, caputo - slope);
        }
        (glue, transmit)
    }

    pub fn verify(&self, tolerances: Tolerances) -> Result<VerificationReport> {
        let (residual_upper, residual_lower) = self.pde_residuals(0.0)?;
        let [bc_periodic, bc_neumann, bc_bottom, bc_top] = self.boundary();
        let (gluing_gap, transmitting_gap) = self.gluing_transmitting();
        Ok(VerificationReport {
            residual_upper,
            residual_lower,
            bc_periodic,
            bc_neumann,
            bc_bottom,
            bc_top,
            gluing_gap,
            transmitting_gap,
            path: ResidualPath::Quadrature,
            grids: self.grids,
            tolerances,
        })
    }
}

/// `verify` for a sampled field.
pub fn verify_sampled(field: &SampledField, tolerances: Tolerances) -> Result<VerificationReport> {
    field.verify(tolerances)
}

/// `log2(e_i / e_{i+1})` for errors measured at successively halved steps.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| libm::log2(w[0] / w[1])).collect()
}

/// Quadrature residuals `(upper, lower)` of a series field on
/// [`Grids::uniform`] with each interval count in `intervals`; see
/// [`SampledField::pde_residuals`] for `window`.
pub fn residual_study(
    field: &SolutionField,
    source: &SourceField,
    intervals: &[usize],
    window: f64,
    cfg: &EvalConfig,
) -> Result<Vec<(f64, f64)>> {
    intervals
        .iter()
        .map(|&n| {
            let grids = Grids::uniform(field.params(), n)?;
            SampledField::sample(field, source, &grids, cfg)?.pde_residuals(window)
        })
        .collect()
}
