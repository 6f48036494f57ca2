//! Determination of the unknown constants, the uniqueness determinants and
//! explicit nontrivial solutions where a determinant vanishes.

use alloc::vec::Vec;

use crate::assembly::{FieldMode, SolutionField, SourceField, SeriesCoefficients};
use crate::error::{check, Error, Result};
use crate::modes::{Branch, ModeConstants, ModeIndex, ModeSolution, ProblemParameters};
use crate::specfun::{bivariate_ml, gamma, ml_family, BivariateMlSpec, EvalConfig};

/// `p + p^beta / Γ(beta+1) - q^alpha / Γ(alpha+1)`.
pub fn delta0(params: &ProblemParameters) -> Result<f64> {
    params.validate()?;
    let ProblemParameters { alpha, beta, p, q } = *params;
    Ok(p + libm::pow(p, beta) / gamma(beta + 1.0)? - libm::pow(q, alpha) / gamma(alpha + 1.0)?)
}

/// The two mode-block coefficients
/// `A = p^beta E_{beta,beta+1}(-lam p^beta) + p E_{beta,2}(-lam p^beta)` and
/// `B = q^alpha E_{alpha,alpha+1}(-lam q^alpha)`.
pub fn mode_coefficients(params: &ProblemParameters, index: ModeIndex, cfg: &EvalConfig) -> Result<(f64, f64)> {
    params.validate()?;
    let ProblemParameters { alpha, beta, p, q } = *params;
    let lam = index.lam();
    let pb = libm::pow(p, beta);
    let qa = libm::pow(q, alpha);
    let zp = -lam * pb;
    let zq = -lam * qa;
    let a = pb * ml_family(beta, beta + 1.0, 1, zp, cfg)? + p * ml_family(beta, 2.0, 1, zp, cfg)?;
    let b = qa * ml_family(alpha, alpha + 1.0, 1, zq, cfg)?;
    Ok((a, b))
}

/// `Δ_k = A - B` (see [`mode_coefficients`]).
pub fn delta_k(params: &ProblemParameters, index: ModeIndex, cfg: &EvalConfig) -> Result<f64> {
    let (a, b) = mode_coefficients(params, index, cfg)?;
    Ok(a - b)
}

/// Determinant of a small dense matrix by Gaussian elimination with
/// partial pivoting.
pub fn determinant<const N: usize>(mut m: [[f64; N]; N]) -> f64 {
    let mut det = 1.0;
    for col in 0..N {
        let piv = (col..N)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..N {
            let factor = m[row][col] / m[col][col];
            for c in col..N {
                m[row][c] -= factor * m[col][c];
            }
        }
    }
    det
}

/// Solves `m x = rhs`; a pivot below `1e-13` times the largest entry is
/// treated as singular.
pub fn solve<const N: usize>(mut m: [[f64; N]; N], mut rhs: [f64; N]) -> Result<[f64; N]> {
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    for col in 0..N {
        let piv = (col..N)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        if m[piv][col].abs() <= 1e-13 * scale {
            return Err(Error::Precondition {
                what: "system is singular",
                value: m[piv][col],
            });
        }
        m.swap(piv, col);
        rhs.swap(piv, col);
        for row in col + 1..N {
            let factor = m[row][col] / m[col][col];
            for c in col..N {
                m[row][c] -= factor * m[col][c];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let tail: f64 = (row + 1..N).map(|c| m[row][c] * x[c]).sum();
        x[row] = (rhs[row] - tail) / m[row][row];
    }
    Ok(x)
}

/// Conditions at `t = -p` and `t = q` for the zero mode in the unknowns
/// `(W_0(0), W_0'(0))`; the source follows as `f_0 = W_0'(0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroSystem {
    pub matrix: [[f64; 2]; 2],
}

impl ZeroSystem {
    /// Equals `-Δ_0`.
    pub fn determinant(&self) -> f64 {
        determinant(self.matrix)
    }

    /// Solution of the homogeneous system, `[W_0(0), W_0'(0), f_0]`.
    pub fn solve_homogeneous(&self) -> Result<[f64; 3]> {
        let [w, wp] = solve(self.matrix, [0.0; 2])?;
        Ok([w, wp, wp])
    }
}

pub fn assemble_zero_system(params: &ProblemParameters) -> Result<ZeroSystem> {
    params.validate()?;
    let ProblemParameters { alpha, beta, p, q } = *params;
    Ok(ZeroSystem {
        matrix: [
            [1.0, libm::pow(p, beta) / gamma(beta + 1.0)? + p],
            [1.0, libm::pow(q, alpha) / gamma(alpha + 1.0)?],
        ],
    })
}

/// Unknown order of [`ModeSystem`].
pub const MODE_UNKNOWNS: [&str; 6] = ["W1k(0)", "W1k'(0)", "W2k(0)", "W2k'(0)", "f1k", "f2k"];

/// The six homogeneous relations for the constants of mode `k`:
///
/// ```text
/// f1 - W1' - lam W1 + 4k pi W2 = 0           (transmitting, cos)
/// f2 - W2' - lam W2            = 0           (transmitting, x sin)
/// W2 + A W2'                   = 0           (t = -p, x sin)
/// W2 + B W2'                   = 0           (t = q,  x sin)
/// W1 + A W1' + 4k pi (P2 W2 + P3 W2' + P4 f2) = 0   (t = -p, cos)
/// W1 + B W1' + 4k pi (Q2 W2 + Q4 f2)          = 0   (t = q,  cos)
/// ```
///
/// with, for `zp = -lam p^beta` and `zq = -lam q^alpha`,
/// `P2 = p^beta (E2_{beta,beta+1} - E_{beta,beta+1})(zp)`, `P3 = p^(beta+1) E2_{beta,beta+2}(zp)`,
/// `P4 = p^(2beta) E2_{beta,2beta+1}(zp)`, `Q2 = q^alpha (E2_{alpha,alpha+1} - E_{alpha,alpha+1})(zq)`,
/// `Q4 = q^(2alpha) E2_{alpha,2alpha+1}(zq)`. The last two rows are the
/// boundary conditions of the cosine mode after eliminating `f1` with the
/// first row; the `x sin` mode enters them through the coupling terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeSystem {
    pub index: ModeIndex,
    pub a: f64,
    pub b: f64,
    pub matrix: [[f64; 6]; 6],
}

impl ModeSystem {
    /// Rows 3-4 restricted to `(W2(0), W2'(0))`; determinant `-Δ_k`.
    pub fn w2_block(&self) -> [[f64; 2]; 2] {
        [
            [self.matrix[2][2], self.matrix[2][3]],
            [self.matrix[3][2], self.matrix[3][3]],
        ]
    }

    /// Rows 5-6 restricted to `(W1(0), W1'(0))`; determinant `-Δ_k`.
    pub fn w1_block(&self) -> [[f64; 2]; 2] {
        [
            [self.matrix[4][0], self.matrix[4][1]],
            [self.matrix[5][0], self.matrix[5][1]],
        ]
    }

    /// Full 6x6 determinant, `Δ_k^2` (the system is block triangular).
    pub fn determinant(&self) -> f64 {
        determinant(self.matrix)
    }

    /// Solution of the homogeneous system in the order of [`MODE_UNKNOWNS`].
    pub fn solve_homogeneous(&self) -> Result<[f64; 6]> {
        solve(self.matrix, [0.0; 6])
    }
}

fn collapsed(order: f64, delta1: f64, z: f64, cfg: &EvalConfig) -> Result<f64> {
    bivariate_ml(&BivariateMlSpec::collapsed(order, delta1, z), cfg)
}

pub fn assemble_mode_system(params: &ProblemParameters, index: ModeIndex, cfg: &EvalConfig) -> Result<ModeSystem> {
    let (a, b) = mode_coefficients(params, index, cfg)?;
    let ProblemParameters { alpha, beta, p, q } = *params;
    let lam = index.lam();
    let c = index.coupling();
    let pb = libm::pow(p, beta);
    let qa = libm::pow(q, alpha);
    let (zp, zq) = (-lam * pb, -lam * qa);
    let p2 = pb * (collapsed(beta, beta + 1.0, zp, cfg)? - ml_family(beta, beta + 1.0, 1, zp, cfg)?);
    let p3 = pb * p * collapsed(beta, beta + 2.0, zp, cfg)?;
    let p4 = pb * pb * collapsed(beta, 2.0 * beta + 1.0, zp, cfg)?;
    let q2 = qa * (collapsed(alpha, alpha + 1.0, zq, cfg)? - ml_family(alpha, alpha + 1.0, 1, zq, cfg)?);
    let q4 = qa * qa * collapsed(alpha, 2.0 * alpha + 1.0, zq, cfg)?;
    Ok(ModeSystem {
        index,
        a,
        b,
        matrix: [
            [-lam, -1.0, c, 0.0, 1.0, 0.0],
            [0.0, 0.0, -lam, -1.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, a, 0.0, 0.0],
            [0.0, 0.0, 1.0, b, 0.0, 0.0],
            [1.0, a, c * p2, c * p3, 0.0, c * p4],
            [1.0, b, c * q2, 0.0, 0.0, c * q4],
        ],
    })
}

/// Outcome of the determinant analysis.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Unique,
    /// `Δ_0` vanishes; `modes` lists any vanishing `Δ_k` as well.
    DegenerateZeroMode { modes: Vec<u32> },
    /// Some `Δ_k` vanish while `Δ_0` does not.
    DegenerateModes(Vec<u32>),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Unique => "unique",
            Verdict::DegenerateZeroMode { .. } => "degenerate_zero_mode",
            Verdict::DegenerateModes(_) => "degenerate_mode",
        }
    }

    pub fn is_unique(&self) -> bool {
        matches!(self, Verdict::Unique)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeterminantReport {
    pub params: ProblemParameters,
    pub delta0: f64,
    /// `Δ_k` for `k = 1..=K`.
    pub deltas: Vec<f64>,
    pub verdict: Verdict,
    pub tolerance: f64,
}

/// `1e-9 (1 + |p| + |q|)`.
pub fn default_tolerance(params: &ProblemParameters) -> f64 {
    1e-9 * (1.0 + params.p.abs() + params.q.abs())
}

/// Evaluates `Δ_0, Δ_1..Δ_K` and flags every value with `|Δ| <= tol`.
pub fn classify(params: &ProblemParameters, k_max: u32, tol: f64, cfg: &EvalConfig) -> Result<DeterminantReport> {
    check(k_max >= 1, "K", f64::from(k_max))?;
    check(tol > 0.0 && tol.is_finite(), "tolerance", tol)?;
    let d0 = delta0(params)?;
    let mut deltas = Vec::with_capacity(k_max as usize);
    let mut modes = Vec::new();
    for k in 1..=k_max {
        let d = delta_k(params, ModeIndex::new(k)?, cfg)?;
        if d.abs() <= tol {
            modes.push(k);
        }
        deltas.push(d);
    }
    let verdict = if d0.abs() <= tol {
        Verdict::DegenerateZeroMode { modes }
    } else if modes.is_empty() {
        Verdict::Unique
    } else {
        Verdict::DegenerateModes(modes)
    };
    Ok(DeterminantReport {
        params: *params,
        delta0: d0,
        deltas,
        verdict,
        tolerance: tol,
    })
}

/// Free constants of a nontrivial solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FreeConstants {
    ZeroMode { f0: f64 },
    Mode { m: u32, w1mp0: f64, w2mp0: f64 },
}

/// A nontrivial pair `(u, f)` on a degeneracy locus.
///
/// The solution is available twice: [`NontrivialSolution::u`] and
/// [`NontrivialSolution::f`] evaluate the explicit formulas, and
/// [`NontrivialSolution::field`] carries the same solution as general mode
/// solutions with the constants the formulas imply.
#[derive(Clone, Debug, PartialEq)]
pub struct NontrivialSolution {
    pub params: ProblemParameters,
    pub free: FreeConstants,
    pub field: SolutionField,
    pub source: SourceField,
    /// `E_{alpha,1}(-lam q^alpha)` and `q^alpha E_{alpha,alpha+1}(-lam q^alpha)` for a mode solution.
    eq1: f64,
    bq: f64,
    cfg: EvalConfig,
}

/// `f0 != 0` on `Δ_0 = 0`:
///
/// ```text
/// u(t) = (t^alpha - q^alpha) f0 / Γ(alpha+1),                       t >= 0
/// u(t) = [((-t)^beta - p^beta) / Γ(beta+1) - t - p] f0,              t <= 0
/// f    = f0
/// ```
pub fn build_nontrivial_zero(params: &ProblemParameters, f0: f64, tol: Option<f64>) -> Result<NontrivialSolution> {
    let d0 = delta0(params)?;
    let tol = tol.unwrap_or_else(|| default_tolerance(params));
    if d0.abs() > tol {
        return Err(Error::Precondition {
            what: "delta0 is not zero",
            value: d0,
        });
    }
    check(f0 != 0.0 && f0.is_finite(), "f0", f0)?;
    let ProblemParameters { alpha, beta, p, q } = *params;
    let upper = ModeConstants {
        value0: -libm::pow(q, alpha) / gamma(alpha + 1.0)? * f0,
        slope0: 0.0,
        source: f0,
    };
    let lower = ModeConstants {
        value0: -(libm::pow(p, beta) / gamma(beta + 1.0)? + p) * f0,
        slope0: f0,
        source: f0,
    };
    Ok(NontrivialSolution {
        params: *params,
        free: FreeConstants::ZeroMode { f0 },
        field: SolutionField::zero_mode(*params, upper, lower)?,
        source: SourceField {
            coefficients: SeriesCoefficients {
                c0: f0,
                ..SeriesCoefficients::default()
            },
        },
        eq1: 0.0,
        bq: 0.0,
        cfg: EvalConfig::default(),
    })
}

/// `(W1m'(0), W2m'(0)) != 0` on `Δ_m = 0`. With `Eq = E_{alpha,1}(-lam q^alpha)`,
/// `B = q^alpha E_{alpha,alpha+1}(-lam q^alpha)` and `lam = (2m pi)^2`, every mode
/// starts from `V(0) = W(0) = -B W'(0)` and the source is
///
/// ```text
/// f_m(x) = (Eq W1' + 4m pi B W2') cos 2m pi x + Eq W2' x sin 2m pi x.
/// ```
///
/// When `W2m'(0) != 0` the cosine mode only meets both end conditions if
/// the two entries of [`coupling_defect`] agree and vanish.
pub fn build_nontrivial_mode(
    params: &ProblemParameters,
    m: u32,
    w1mp0: f64,
    w2mp0: f64,
    tol: Option<f64>,
    cfg: &EvalConfig,
) -> Result<NontrivialSolution> {
    let index = ModeIndex::new(m)?;
    let d = delta_k(params, index, cfg)?;
    let tol = tol.unwrap_or_else(|| default_tolerance(params));
    if d.abs() > tol {
        return Err(Error::Precondition {
            what: "delta_m is not zero",
            value: d,
        });
    }
    check(w1mp0.is_finite(), "w1mp0", w1mp0)?;
    check(w2mp0.is_finite(), "w2mp0", w2mp0)?;
    if w1mp0 == 0.0 && w2mp0 == 0.0 {
        return Err(Error::Parameter {
            name: "w1mp0, w2mp0",
            value: 0.0,
        });
    }
    let ProblemParameters { alpha, q, .. } = *params;
    let qa = libm::pow(q, alpha);
    let zq = -index.lam() * qa;
    let eq1 = ml_family(alpha, 1.0, 1, zq, cfg)?;
    let bq = qa * ml_family(alpha, alpha + 1.0, 1, zq, cfg)?;
    let c = index.coupling();
    let f1 = eq1 * w1mp0 + c * bq * w2mp0;
    let f2 = eq1 * w2mp0;
    let cos = |slope: f64, upper: bool| ModeConstants {
        value0: -bq * slope,
        slope0: if upper { 0.0 } else { slope },
        source: 0.0,
    };
    let with_source = |mut k: ModeConstants, f: f64| {
        k.source = f;
        k
    };
    let (u1, u2) = (with_source(cos(w1mp0, true), f1), with_source(cos(w2mp0, true), f2));
    let (l1, l2) = (with_source(cos(w1mp0, false), f1), with_source(cos(w2mp0, false), f2));
    let mode = FieldMode {
        index,
        upper_cos: ModeSolution::cos(Branch::Upper, *params, index, u1, u2)?,
        upper_xsin: ModeSolution::x_sin(Branch::Upper, *params, index, u2)?,
        lower_cos: ModeSolution::cos(Branch::Lower, *params, index, l1, l2)?,
        lower_xsin: ModeSolution::x_sin(Branch::Lower, *params, index, l2)?,
    };
    let mut coeffs = SeriesCoefficients::zeros(m as usize);
    coeffs.c1[m as usize - 1] = f1;
    coeffs.c2[m as usize - 1] = f2;
    Ok(NontrivialSolution {
        params: *params,
        free: FreeConstants::Mode { m, w1mp0, w2mp0 },
        field: SolutionField::with_modes(*params, alloc::vec![mode])?,
        source: SourceField { coefficients: coeffs },
        eq1,
        bq,
        cfg: *cfg,
    })
}

/// Residuals of the cosine-mode end conditions at `t = -p` and `t = q`
/// produced by `W2m'(0) = 1` in the construction of [`build_nontrivial_mode`]
/// (with `W1m'(0) = 0`). Both are zero exactly when the `x sin` component
/// can be switched on without breaking the end conditions.
pub fn coupling_defect(params: &ProblemParameters, m: u32, cfg: &EvalConfig) -> Result<(f64, f64)> {
    let index = ModeIndex::new(m)?;
    let sys = assemble_mode_system(params, index, cfg)?;
    let (_, b) = (sys.a, sys.b);
    let qa = libm::pow(params.q, params.alpha);
    let eq1 = ml_family(params.alpha, 1.0, 1, -index.lam() * qa, cfg)?;
    // unknowns: W1 = W1' = 0, W2 = -B, W2' = 1, f1 = 4m pi B, f2 = Eq
    let x = [0.0, 0.0, -b, 1.0, index.coupling() * b, eq1];
    let row = |r: usize| -> f64 { sys.matrix[r].iter().zip(&x).map(|(a, v)| a * v).sum() };
    Ok((row(4), row(5)))
}

impl NontrivialSolution {
    pub fn mode_index(&self) -> Option<ModeIndex> {
        match self.free {
            FreeConstants::ZeroMode { .. } => None,
            FreeConstants::Mode { m, .. } => ModeIndex::new(m).ok(),
        }
    }

    /// Time coefficients `(zero mode, cos, x sin)` from the explicit formulas.
    pub fn time_coefficients(&self, t: f64) -> Result<(f64, f64, f64)> {
        let ProblemParameters { alpha, beta, p, q } = self.params;
        if !(t >= -p && t <= q) {
            return Err(Error::Domain { t, lo: -p, hi: q });
        }
        let (m, w1, w2) = match self.free {
            FreeConstants::ZeroMode { f0 } => {
                let u0 = if t >= 0.0 {
                    (libm::pow(t, alpha) - libm::pow(q, alpha)) / gamma(alpha + 1.0)? * f0
                } else {
                    ((libm::pow(-t, beta) - libm::pow(p, beta)) / gamma(beta + 1.0)? - t - p) * f0
                };
                return Ok((u0, 0.0, 0.0));
            }
            FreeConstants::Mode { m, w1mp0, w2mp0 } => (m, w1mp0, w2mp0),
        };
        let index = ModeIndex::new(m)?;
        let lam = index.lam();
        let c = index.coupling();
        let cfg = &self.cfg;
        let (eq1, bq) = (self.eq1, self.bq);
        if t >= 0.0 {
            let ta = libm::pow(t, alpha);
            let z = -lam * ta;
            let e1 = ml_family(alpha, 1.0, 1, z, cfg)?;
            let ea1 = ml_family(alpha, alpha + 1.0, 1, z, cfg)?;
            let core = ta * ea1 * eq1 - bq * e1;
            let v2 = core * w2;
            let v1 = w1 * core
                + c * ta
                    * w2
                    * (bq * (ea1 - collapsed(alpha, alpha + 1.0, z, cfg)?)
                        + ta * eq1 * collapsed(alpha, 2.0 * alpha + 1.0, z, cfg)?);
            Ok((0.0, v1, v2))
        } else {
            let s = -t;
            let sb = libm::pow(s, beta);
            let z = -lam * sb;
            let e1 = ml_family(beta, 1.0, 1, z, cfg)?;
            let e2 = ml_family(beta, 2.0, 1, z, cfg)?;
            let eb1 = ml_family(beta, beta + 1.0, 1, z, cfg)?;
            let core = sb * eq1 * eb1 - bq * e1 + s * e2;
            let w2t = core * w2;
            let w1t = core * w1
                + c * sb
                    * w2
                    * (bq * (eb1 - collapsed(beta, beta + 1.0, z, cfg)?)
                        + s * collapsed(beta, beta + 2.0, z, cfg)?
                        + sb * eq1 * collapsed(beta, 2.0 * beta + 1.0, z, cfg)?);
            Ok((0.0, w1t, w2t))
        }
    }

    /// `u(x, t)` from the explicit formulas.
    pub fn u(&self, x: f64, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain { t: x, lo: 0.0, hi: 1.0 });
        }
        let (u0, a, b) = self.time_coefficients(t)?;
        Ok(match self.free {
            FreeConstants::ZeroMode { .. } => u0,
            FreeConstants::Mode { m, .. } => {
                let w = 2.0 * f64::from(m) * core::f64::consts::PI;
                a * libm::cos(w * x) + b * x * libm::sin(w * x)
            }
        })
    }

    /// `f(x)` from the explicit formulas.
    pub fn f(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain { t: x, lo: 0.0, hi: 1.0 });
        }
        Ok(match self.free {
            FreeConstants::ZeroMode { f0 } => f0,
            FreeConstants::Mode { m, w1mp0, w2mp0 } => {
                let index = ModeIndex::new(m)?;
                let w = 2.0 * f64::from(m) * core::f64::consts::PI;
                (self.eq1 * w1mp0 + index.coupling() * self.bq * w2mp0) * libm::cos(w * x)
                    + self.eq1 * w2mp0 * x * libm::sin(w * x)
            }
        })
    }
}
