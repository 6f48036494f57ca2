//! Series fields in the basis `{1, cos 2k pi x, x sin 2k pi x}` and their
//! projections with the adjoint family `{2(1-x), 4(1-x) cos 2k pi x, 4 sin 2k pi x}`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::modes::{
    Branch, ModeConstants, ModeIndex, ModeInitialData, ModeKernel, ModeSolution, ProblemParameters,
    SourceCoefficients,
};
use crate::specfun::EvalConfig;

pub const DEFAULT_TRUNCATION: usize = 16;
pub const MAX_TRUNCATION: usize = 64;

/// Coefficients `(c0, c1k, c2k)` of `c0 + sum_k c1k cos 2k pi x + c2k x sin 2k pi x`;
/// entry `i` belongs to `k = i + 1`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SeriesCoefficients {
    pub c0: f64,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
}

impl SeriesCoefficients {
    pub fn zeros(k_max: usize) -> Self {
        SeriesCoefficients {
            c0: 0.0,
            c1: alloc::vec![0.0; k_max],
            c2: alloc::vec![0.0; k_max],
        }
    }

    pub fn truncation(&self) -> usize {
        self.c1.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.c0;
        for (i, (a, b)) in self.c1.iter().zip(&self.c2).enumerate() {
            let w = wavenumber(i);
            v += a * libm::cos(w * x) + b * x * libm::sin(w * x);
        }
        v
    }

    /// `d/dx` of the series.
    pub fn eval_x(&self, x: f64) -> f64 {
        let mut v = 0.0;
        for (i, (a, b)) in self.c1.iter().zip(&self.c2).enumerate() {
            let w = wavenumber(i);
            let (s, c) = (libm::sin(w * x), libm::cos(w * x));
            v += -a * w * s + b * (s + w * x * c);
        }
        v
    }

    /// `d^2/dx^2` of the series: `cos -> -w^2 cos`, `x sin -> 2w cos - w^2 x sin`.
    pub fn eval_xx(&self, x: f64) -> f64 {
        let mut v = 0.0;
        for (i, (a, b)) in self.c1.iter().zip(&self.c2).enumerate() {
            let w = wavenumber(i);
            let (s, c) = (libm::sin(w * x), libm::cos(w * x));
            v += (2.0 * w * b - w * w * a) * c - w * w * b * x * s;
        }
        v
    }

    /// Largest absolute coefficient difference.
    pub fn max_diff(&self, other: &SeriesCoefficients) -> f64 {
        let mut d = (self.c0 - other.c0).abs();
        for (a, b) in self.c1.iter().zip(&other.c1).chain(self.c2.iter().zip(&other.c2)) {
            d = d.max((a - b).abs());
        }
        d
    }
}

impl From<&SourceCoefficients> for SeriesCoefficients {
    fn from(s: &SourceCoefficients) -> Self {
        SeriesCoefficients {
            c0: s.f0,
            c1: s.f1k.clone(),
            c2: s.f2k.clone(),
        }
    }
}

/// `2 k pi` for entry `i` (`k = i + 1`).
fn wavenumber(i: usize) -> f64 {
    2.0 * (i + 1) as f64 * PI
}

/// The primal family and its adjoint up to mode `k_max`. Functions are
/// numbered `0 -> 1`, `2k - 1 -> cos 2k pi x`, `2k -> x sin 2k pi x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BiorthogonalBasis {
    k_max: usize,
}

impl BiorthogonalBasis {
    pub fn new(k_max: usize) -> Result<Self> {
        if k_max > MAX_TRUNCATION {
            return Err(Error::Parameter {
                name: "truncation",
                value: k_max as f64,
            });
        }
        Ok(BiorthogonalBasis { k_max })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn len(&self) -> usize {
        2 * self.k_max + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn primal(&self, i: usize, x: f64) -> f64 {
        if i == 0 {
            return 1.0;
        }
        let w = wavenumber((i - 1) / 2);
        if i % 2 == 1 {
            libm::cos(w * x)
        } else {
            x * libm::sin(w * x)
        }
    }

    pub fn adjoint(&self, i: usize, x: f64) -> f64 {
        if i == 0 {
            return 2.0 * (1.0 - x);
        }
        let w = wavenumber((i - 1) / 2);
        if i % 2 == 1 {
            4.0 * (1.0 - x) * libm::cos(w * x)
        } else {
            4.0 * libm::sin(w * x)
        }
    }

    /// `M[j][i] = int_0^1 adjoint_j primal_i dx` by composite Simpson on
    /// `intervals` subintervals; the identity up to quadrature error.
    pub fn pairing_matrix(&self, intervals: usize) -> Result<Vec<Vec<f64>>> {
        let grid = XGrid::new(intervals)?;
        let n = self.len();
        let xs = grid.nodes();
        let primal: Vec<Vec<f64>> = (0..n)
            .map(|i| xs.iter().map(|&x| self.primal(i, x)).collect())
            .collect();
        let mut m = alloc::vec![alloc::vec![0.0; n]; n];
        for (j, row) in m.iter_mut().enumerate() {
            let adj: Vec<f64> = xs.iter().map(|&x| self.adjoint(j, x)).collect();
            for (i, p) in primal.iter().enumerate() {
                let prod: Vec<f64> = adj.iter().zip(p).map(|(a, b)| a * b).collect();
                row[i] = grid.simpson(&prod);
            }
        }
        Ok(m)
    }
}

/// Uniform grid on `[0, 1]` with an even number of intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct XGrid {
    intervals: usize,
}

impl XGrid {
    pub fn new(intervals: usize) -> Result<Self> {
        if intervals < 2 || !intervals.is_multiple_of(2) {
            return Err(Error::Grid("Simpson's rule needs an even, positive number of intervals"));
        }
        Ok(XGrid { intervals })
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn h(&self) -> f64 {
        1.0 / self.intervals as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.intervals {
            1.0
        } else {
            i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.intervals).map(|i| self.node(i)).collect()
    }

    /// Composite Simpson integral of samples at the nodes.
    pub fn simpson(&self, values: &[f64]) -> f64 {
        let n = self.intervals;
        let mut s = values[0] + values[n];
        for (i, v) in values.iter().enumerate().take(n).skip(1) {
            s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        s * self.h() / 3.0
    }
}

/// Coefficients of `g` from samples on a uniform grid of `[0, 1]`:
/// `2 int g (1-x)`, `4 int g (1-x) cos 2k pi x`, `4 int g sin 2k pi x`.
pub fn project(samples: &[f64], k_max: usize) -> Result<SeriesCoefficients> {
    let basis = BiorthogonalBasis::new(k_max)?;
    if samples.len() < 2 {
        return Err(Error::Grid("too few samples"));
    }
    let intervals = samples.len() - 1;
    let required = 2 * k_max + 2;
    if intervals < required {
        return Err(Error::Resolution {
            intervals,
            required,
        });
    }
    let grid = XGrid::new(intervals)?;
    let xs = grid.nodes();
    let moment = |j: usize| -> f64 {
        let prod: Vec<f64> = xs
            .iter()
            .zip(samples)
            .map(|(&x, g)| basis.adjoint(j, x) * g)
            .collect();
        grid.simpson(&prod)
    };
    Ok(SeriesCoefficients {
        c0: moment(0),
        c1: (1..=k_max).map(|k| moment(2 * k - 1)).collect(),
        c2: (1..=k_max).map(|k| moment(2 * k)).collect(),
    })
}

/// The source `f(x)` as a truncated series.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SourceField {
    pub coefficients: SeriesCoefficients,
}

impl SourceField {
    pub fn new(source: &SourceCoefficients) -> Self {
        SourceField {
            coefficients: source.into(),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        Ok(self.coefficients.eval(x))
    }
}

/// Time modes of one index on both branches.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldMode {
    pub index: ModeIndex,
    pub upper_cos: ModeSolution,
    pub upper_xsin: ModeSolution,
    pub lower_cos: ModeSolution,
    pub lower_xsin: ModeSolution,
}

/// `u(x, t)` as a truncated series whose time coefficients are the closed-form modes.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionField {
    params: ProblemParameters,
    zero_upper: ModeSolution,
    zero_lower: ModeSolution,
    modes: Vec<FieldMode>,
}

fn check_x(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain { t: x, lo: 0.0, hi: 1.0 });
    }
    Ok(())
}

impl SolutionField {
    /// Builds the field from initial data and source coefficients. The zero
    /// mode is read from `zero`, mode `k` from `per_mode[k - 1]`.
    pub fn from_data(
        params: ProblemParameters,
        zero: &ModeInitialData,
        per_mode: &[ModeInitialData],
        source: &SourceCoefficients,
    ) -> Result<Self> {
        params.validate()?;
        let k_max = per_mode.len();
        if k_max > MAX_TRUNCATION {
            return Err(Error::Parameter {
                name: "truncation",
                value: k_max as f64,
            });
        }
        if source.truncation() != k_max {
            return Err(Error::Parameter {
                name: "source truncation",
                value: source.truncation() as f64,
            });
        }
        let zero_upper = ModeSolution::zero(
            Branch::Upper,
            params,
            ModeConstants {
                value0: zero.v0_0,
                slope0: 0.0,
                source: source.f0,
            },
        )?;
        let zero_lower = ModeSolution::zero(
            Branch::Lower,
            params,
            ModeConstants {
                value0: zero.w0_0,
                slope0: zero.w0p_0,
                source: source.f0,
            },
        )?;
        let mut modes = Vec::with_capacity(k_max);
        for (i, data) in per_mode.iter().enumerate() {
            let k = i as u32 + 1;
            let build = |branch, kind| ModeSolution::from_data(branch, kind, params, k, data, source);
            use crate::modes::ModeKind::{Cos, XSin};
            modes.push(FieldMode {
                index: ModeIndex::new(k)?,
                upper_cos: build(Branch::Upper, Cos)?,
                upper_xsin: build(Branch::Upper, XSin)?,
                lower_cos: build(Branch::Lower, Cos)?,
                lower_xsin: build(Branch::Lower, XSin)?,
            });
        }
        Ok(SolutionField {
            params,
            zero_upper,
            zero_lower,
            modes,
        })
    }

    /// A field with only the zero mode.
    pub fn zero_mode(params: ProblemParameters, upper: ModeConstants, lower: ModeConstants) -> Result<Self> {
        Ok(SolutionField {
            params,
            zero_upper: ModeSolution::zero(Branch::Upper, params, upper)?,
            zero_lower: ModeSolution::zero(Branch::Lower, params, lower)?,
            modes: Vec::new(),
        })
    }

    /// A field whose only non-zero modes are those of `modes`; indices
    /// missing from `modes` are identically zero.
    pub fn with_modes(params: ProblemParameters, modes: Vec<FieldMode>) -> Result<Self> {
        params.validate()?;
        let k_max = modes.iter().map(|m| m.index.k() as usize).max().unwrap_or(0);
        if k_max > MAX_TRUNCATION {
            return Err(Error::Parameter {
                name: "truncation",
                value: k_max as f64,
            });
        }
        let zero = |branch| ModeSolution::zero(branch, params, ModeConstants::default());
        let mut all = Vec::with_capacity(k_max);
        for k in 1..=k_max as u32 {
            let index = ModeIndex::new(k)?;
            match modes.iter().find(|m| m.index == index) {
                Some(m) => all.push(m.clone()),
                None => {
                    let c = ModeConstants::default();
                    all.push(FieldMode {
                        index,
                        upper_cos: ModeSolution::cos(Branch::Upper, params, index, c, c)?,
                        upper_xsin: ModeSolution::x_sin(Branch::Upper, params, index, c)?,
                        lower_cos: ModeSolution::cos(Branch::Lower, params, index, c, c)?,
                        lower_xsin: ModeSolution::x_sin(Branch::Lower, params, index, c)?,
                    })
                }
            }
        }
        Ok(SolutionField {
            params,
            zero_upper: zero(Branch::Upper)?,
            zero_lower: zero(Branch::Lower)?,
            modes: all,
        })
    }

    pub fn params(&self) -> &ProblemParameters {
        &self.params
    }

    pub fn truncation(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[FieldMode] {
        &self.modes
    }

    pub fn zero_modes(&self) -> (&ModeSolution, &ModeSolution) {
        (&self.zero_upper, &self.zero_lower)
    }

    fn mode_pair<'a>(&self, m: &'a FieldMode, branch: Branch) -> (&'a ModeSolution, &'a ModeSolution) {
        match branch {
            Branch::Upper => (&m.upper_cos, &m.upper_xsin),
            Branch::Lower => (&m.lower_cos, &m.lower_xsin),
        }
    }

    fn zero_of(&self, branch: Branch) -> &ModeSolution {
        match branch {
            Branch::Upper => &self.zero_upper,
            Branch::Lower => &self.zero_lower,
        }
    }

    /// Applies `op` to the zero mode and to both modes of every index on
    /// one branch, sharing one kernel per index.
    fn collect<Z, M>(&self, branch: Branch, t: f64, cfg: &EvalConfig, zero_op: Z, mode_op: M) -> Result<SeriesCoefficients>
    where
        Z: Fn(&ModeSolution) -> Result<f64>,
        M: Fn(&ModeSolution, &mut ModeKernel) -> Result<f64>,
    {
        let mut out = SeriesCoefficients::zeros(self.modes.len());
        out.c0 = zero_op(self.zero_of(branch))?;
        for (i, m) in self.modes.iter().enumerate() {
            let mut kernel = ModeKernel::new(branch, &self.params, m.index, t, cfg)?;
            let (cos, xsin) = self.mode_pair(m, branch);
            out.c1[i] = mode_op(cos, &mut kernel)?;
            out.c2[i] = mode_op(xsin, &mut kernel)?;
        }
        Ok(out)
    }

    /// Time coefficients at `t` on the given branch (both branches are
    /// defined at `t = 0`).
    pub fn coefficients_on(&self, branch: Branch, t: f64, cfg: &EvalConfig) -> Result<SeriesCoefficients> {
        self.collect(branch, t, cfg, |z| z.value(t, cfg), |m, k| m.value_with(k))
    }

    /// Time coefficients at `t`: upper branch for `t >= 0`, lower for `t < 0`.
    pub fn coefficients(&self, t: f64, cfg: &EvalConfig) -> Result<SeriesCoefficients> {
        self.coefficients_on(branch_of(t), t, cfg)
    }

    /// Coefficients of the exact Caputo derivative of `u` in time.
    pub fn caputo_coefficients_on(&self, branch: Branch, t: f64, cfg: &EvalConfig) -> Result<SeriesCoefficients> {
        self.collect(branch, t, cfg, |z| z.caputo(t, cfg), |m, k| m.caputo_with(k))
    }

    /// Coefficients of `d/d(-t) u` on the lower branch.
    pub fn d_dtau_coefficients(&self, t: f64, cfg: &EvalConfig) -> Result<SeriesCoefficients> {
        self.collect(Branch::Lower, t, cfg, |z| z.d_dtau(t, cfg), |m, k| m.d_dtau_with(k))
    }

    pub fn eval(&self, x: f64, t: f64, cfg: &EvalConfig) -> Result<f64> {
        check_x(x)?;
        Ok(self.coefficients(t, cfg)?.eval(x))
    }
}

/// Branch used for a time value.
pub fn branch_of(t: f64) -> Branch {
    if t >= 0.0 {
        Branch::Upper
    } else {
        Branch::Lower
    }
}

/// `u(x, t)` of a field.
pub fn eval_field(field: &SolutionField, x: f64, t: f64, cfg: &EvalConfig) -> Result<f64> {
    field.eval(x, t, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: EvalConfig = EvalConfig {
        precision_bits: None,
    };

    fn sample(intervals: usize, g: impl Fn(f64) -> f64) -> Vec<f64> {
        XGrid::new(intervals).unwrap().nodes().into_iter().map(g).collect()
    }

    #[test]
    fn pairing_is_the_identity() {
        let basis = BiorthogonalBasis::new(6).unwrap();
        let m = basis.pairing_matrix(2048).unwrap();
        for (j, row) in m.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-10, "({j},{i}) = {v}");
            }
        }
    }

    #[test]
    fn projection_examples() {
        let c = project(&sample(512, |_| 1.0), 4).unwrap();
        assert!((c.c0 - 1.0).abs() < 1e-14);
        assert!(c.c1.iter().chain(&c.c2).all(|v| v.abs() < 1e-12));
        let c = project(&sample(1024, |x| x * libm::sin(2.0 * PI * x)), 4).unwrap();
        assert!((c.c2[0] - 1.0).abs() < 1e-10);
        assert!(c.c0.abs() < 1e-12 && c.c1.iter().all(|v| v.abs() < 1e-10));
        assert!(c.c2[1..].iter().all(|v| v.abs() < 1e-10));
        assert!(matches!(project(&sample(8, |_| 1.0), 4), Err(Error::Resolution { .. })));
        assert!(project(&[1.0; 12], 2).is_err());
    }

    #[test]
    fn reconstruction_error_decreases_with_truncation() {
        // g(0) = g(1) and g'(0) = 0
        let g = |x: f64| libm::cos(2.0 * PI * x) * libm::exp(x * (1.0 - x)) + x * x * (1.0 - x) * (1.0 - x);
        let intervals = 4096;
        let samples = sample(intervals, g);
        let xs = XGrid::new(intervals).unwrap().nodes();
        let mut last = f64::INFINITY;
        for k in [4, 8, 16, 32] {
            let c = project(&samples, k).unwrap();
            let err: f64 = xs.iter().zip(&samples).map(|(&x, v)| (c.eval(x) - v).powi(2)).sum::<f64>() / xs.len() as f64;
            let err = libm::sqrt(err);
            assert!(err < last, "K={k}: {err} >= {last}");
            last = err;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn derivatives_match_differences() {
        let c = SeriesCoefficients {
            c0: 0.3,
            c1: alloc::vec![1.0, -0.5, 0.25],
            c2: alloc::vec![0.7, 0.2, -0.4],
        };
        let h = 1e-4;
        for &x in &[0.1, 0.37, 0.8] {
            let d1 = (c.eval(x + h) - c.eval(x - h)) / (2.0 * h);
            let d2 = (c.eval(x + h) - 2.0 * c.eval(x) + c.eval(x - h)) / (h * h);
            assert!((c.eval_x(x) - d1).abs() < 1e-5);
            assert!((c.eval_xx(x) - d2).abs() < 1e-3 * (1.0 + d2.abs()));
        }
        assert!(c.eval_x(0.0).abs() < 1e-15);
        assert!((c.eval(0.0) - c.eval(1.0)).abs() < 1e-13);
    }

    #[test]
    fn field_evaluation() {
        let params = ProblemParameters::new(0.5, 1.5, 1.0, 1.0).unwrap();
        let zero = ModeInitialData::default();
        let field = SolutionField::from_data(params, &zero, &[ModeInitialData::default(); 3], &SourceCoefficients::new(0.0, alloc::vec![0.0; 3], alloc::vec![0.0; 3]).unwrap()).unwrap();
        assert_eq!(field.eval(0.3, 0.5, &CFG).unwrap(), 0.0);
        assert_eq!(field.eval(0.3, -0.5, &CFG).unwrap(), 0.0);
        assert!(field.eval(1.3, 0.5, &CFG).is_err());
        assert!(field.eval(0.3, 1.5, &CFG).is_err());

        let upper = ModeConstants { value0: 1.0, slope0: 0.0, source: 2.0 };
        let lower = ModeConstants { value0: 1.0, slope0: 0.5, source: 2.0 };
        let f = SolutionField::zero_mode(params, upper, lower).unwrap();
        let a = f.eval(0.1, 0.4, &CFG).unwrap();
        assert_eq!(a, f.eval(0.9, 0.4, &CFG).unwrap());

        let mut data = ModeInitialData::default();
        data.v1k_0 = 2.0;
        data.w1k_0 = 2.0;
        data.v2k_0 = 5.0;
        data.w2k_0 = 5.0;
        let per = [ModeInitialData::default(), data];
        let src = SourceCoefficients::new(0.0, alloc::vec![0.0, 1.0], alloc::vec![0.0, 0.0]).unwrap();
        let field = SolutionField::from_data(params, &ModeInitialData::default(), &per, &src).unwrap();
        let t = 0.2;
        let coeffs = field.coefficients(t, &CFG).unwrap();
        // x = 1/2: cos(2 m pi / 2) = cos(m pi) = 1 for m = 2, x sin(m pi) = 0
        let v = field.eval(0.5, t, &CFG).unwrap();
        assert!((v - coeffs.c1[1]).abs() < 1e-14);
        // both branches agree at t = 0
        let up = field.coefficients_on(Branch::Upper, 0.0, &CFG).unwrap();
        let down = field.coefficients_on(Branch::Lower, 0.0, &CFG).unwrap();
        assert_eq!(up, down);
    }

    #[test]
    fn projection_recovers_field_coefficients() {
        let params = ProblemParameters::new(0.7, 1.4, 1.0, 1.0).unwrap();
        let per: Vec<ModeInitialData> = (0..4)
            .map(|i| {
                let v = 0.3 * i as f64 - 0.5;
                ModeInitialData { v1k_0: v, w1k_0: v, v2k_0: 1.0 - v, w2k_0: 1.0 - v, w1kp_0: 0.2, w2kp_0: -0.1, ..Default::default() }
            })
            .collect();
        let src = SourceCoefficients::new(0.4, alloc::vec![1.0, 0.5, 0.0, -0.3], alloc::vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let zero = ModeInitialData { v0_0: 0.2, w0_0: 0.2, w0p_0: 1.0, ..Default::default() };
        let field = SolutionField::from_data(params, &zero, &per, &src).unwrap();
        for &t in &[0.3, -0.6] {
            let coeffs = field.coefficients(t, &CFG).unwrap();
            let samples = sample(4096, |x| coeffs.eval(x));
            let proj = project(&samples, 4).unwrap();
            assert!(proj.max_diff(&coeffs) < 1e-8, "t={t}");
        }
    }
}
