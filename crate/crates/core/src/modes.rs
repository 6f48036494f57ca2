//! Closed-form time modes of the separated problem.
//!
//! Above the type-change line (`t >= 0`) the modes `V_0, V_1k, V_2k` solve
//! Caputo equations of order `alpha`; below it (`t <= 0`) the modes
//! `W_0, W_1k, W_2k` solve equations of order `beta` in the reversed time
//! `tau = -t`. Every lower-branch derivative in this module is taken with
//! respect to `tau`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{check, Error, Result};
use crate::specfun::{bivariate_ml, gamma, ml_family, BivariateMlSpec, EvalConfig};

/// Orders and domain extents: `0 < alpha <= 1`, `1 < beta <= 2`, `p, q > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemParameters {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
}

impl ProblemParameters {
    pub fn new(alpha: f64, beta: f64, p: f64, q: f64) -> Result<Self> {
        let params = ProblemParameters { alpha, beta, p, q };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check(self.alpha > 0.0 && self.alpha <= 1.0, "alpha", self.alpha)?;
        check(self.beta > 1.0 && self.beta <= 2.0, "beta", self.beta)?;
        check(self.p > 0.0 && self.p.is_finite(), "p", self.p)?;
        check(self.q > 0.0 && self.q.is_finite(), "q", self.q)
    }
}

/// Mode number `k >= 1` with eigenvalue `(2 k pi)^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeIndex {
    k: u32,
}

impl ModeIndex {
    pub fn new(k: u32) -> Result<Self> {
        check(k >= 1, "k", f64::from(k))?;
        Ok(ModeIndex { k })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `(2 k pi)^2`.
    pub fn lam(&self) -> f64 {
        let w = 2.0 * f64::from(self.k) * PI;
        w * w
    }

    /// `4 k pi`, the weight with which the `x sin` mode drives the cosine mode.
    pub fn coupling(&self) -> f64 {
        4.0 * f64::from(self.k) * PI
    }
}

/// Values at `t = 0` of the modes of one index and the `tau`-derivatives of
/// the lower-branch modes.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ModeInitialData {
    pub v0_0: f64,
    pub v1k_0: f64,
    pub v2k_0: f64,
    pub w0_0: f64,
    pub w1k_0: f64,
    pub w2k_0: f64,
    pub w0p_0: f64,
    pub w1kp_0: f64,
    pub w2kp_0: f64,
}

impl ModeInitialData {
    /// Continuity across `t = 0`: the upper and lower values agree.
    pub fn is_glued(&self) -> bool {
        self.v0_0 == self.w0_0 && self.v1k_0 == self.w1k_0 && self.v2k_0 == self.w2k_0
    }
}

/// Coefficients of the source in the basis `{1, cos 2k pi x, x sin 2k pi x}`;
/// entry `i` of `f1k`/`f2k` belongs to `k = i + 1`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SourceCoefficients {
    pub f0: f64,
    pub f1k: Vec<f64>,
    pub f2k: Vec<f64>,
}

impl SourceCoefficients {
    pub fn new(f0: f64, f1k: Vec<f64>, f2k: Vec<f64>) -> Result<Self> {
        if f1k.len() != f2k.len() {
            return Err(Error::Parameter {
                name: "f2k length",
                value: f2k.len() as f64,
            });
        }
        Ok(SourceCoefficients { f0, f1k, f2k })
    }

    pub fn truncation(&self) -> usize {
        self.f1k.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `t in [0, q]`, order `alpha`.
    Upper,
    /// `t in [-p, 0]`, order `beta`.
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeKind {
    /// Coefficient of `1`.
    Zero,
    /// Coefficient of `cos 2k pi x`.
    Cos,
    /// Coefficient of `x sin 2k pi x`.
    XSin,
}

/// Constants of one mode: value at 0, `tau`-slope at 0 (lower branch only)
/// and the source coefficient.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ModeConstants {
    pub value0: f64,
    pub slope0: f64,
    pub source: f64,
}

/// Special-function values shared by all modes of one index at one time.
///
/// With `s = t` (upper) or `s = -t` (lower), order `a` and `z = -lam s^a`,
/// the kernel holds `E_{a,b}(z)` and `E^2_{a,b}(z) = sum (n+1) z^n / Γ(a n + b)`
/// for the handful of `b` the modes need. Values are computed on first use.
#[derive(Clone, Debug)]
pub struct ModeKernel {
    branch: Branch,
    order: f64,
    s: f64,
    z: f64,
    cfg: EvalConfig,
    cache: [Option<f64>; Term::COUNT],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Term {
    E1,
    E2,
    EA,
    EA1,
    C1,
    C2,
    CA,
    CA1,
    CA2,
    C2A,
    C2A1,
}

impl Term {
    const COUNT: usize = 11;

    /// `(second order?, second parameter)` for the branch order `a`.
    fn shape(self, a: f64) -> (bool, f64) {
        match self {
            Term::E1 => (false, 1.0),
            Term::E2 => (false, 2.0),
            Term::EA => (false, a),
            Term::EA1 => (false, a + 1.0),
            Term::C1 => (true, 1.0),
            Term::C2 => (true, 2.0),
            Term::CA => (true, a),
            Term::CA1 => (true, a + 1.0),
            Term::CA2 => (true, a + 2.0),
            Term::C2A => (true, 2.0 * a),
            Term::C2A1 => (true, 2.0 * a + 1.0),
        }
    }
}

impl ModeKernel {
    pub fn new(
        branch: Branch,
        params: &ProblemParameters,
        index: ModeIndex,
        t: f64,
        cfg: &EvalConfig,
    ) -> Result<Self> {
        let s = branch_time(branch, params, t)?;
        let order = branch_order(branch, params);
        Ok(ModeKernel {
            branch,
            order,
            s,
            z: -index.lam() * libm::pow(s, order),
            cfg: *cfg,
            cache: [None; Term::COUNT],
        })
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    /// `t` for the upper branch, `-t` for the lower.
    pub fn s(&self) -> f64 {
        self.s
    }

    fn get(&mut self, term: Term) -> Result<f64> {
        let slot = term as usize;
        if let Some(v) = self.cache[slot] {
            return Ok(v);
        }
        let (second, b) = term.shape(self.order);
        let v = if second {
            bivariate_ml(&BivariateMlSpec::collapsed(self.order, b, self.z), &self.cfg)?
        } else {
            ml_family(self.order, b, 1, self.z, &self.cfg)?
        };
        self.cache[slot] = Some(v);
        Ok(v)
    }

    /// `s^e`.
    fn pw(&self, e: f64) -> f64 {
        libm::pow(self.s, e)
    }
}

fn branch_order(branch: Branch, params: &ProblemParameters) -> f64 {
    match branch {
        Branch::Upper => params.alpha,
        Branch::Lower => params.beta,
    }
}

/// Checks `t` against the branch domain and returns the branch time `s >= 0`.
fn branch_time(branch: Branch, params: &ProblemParameters, t: f64) -> Result<f64> {
    let (lo, hi) = match branch {
        Branch::Upper => (0.0, params.q),
        Branch::Lower => (-params.p, 0.0),
    };
    if !(t >= lo && t <= hi) {
        return Err(Error::Domain { t, lo, hi });
    }
    Ok(match branch {
        Branch::Upper => t,
        Branch::Lower => -t,
    })
}

/// One time mode in closed form.
///
/// Upper branch, `s = t`, `z = -lam s^alpha`:
///
/// ```text
/// V_0  = c0 + f0 s^a / Γ(a+1)
/// V_2k = c2 E_{a,1} + f2 s^a E_{a,a+1}
/// V_1k = c1 E_{a,1} + f1 s^a E_{a,a+1} + 4k pi (c2 s^a E2_{a,a+1} + f2 s^2a E2_{a,2a+1})
/// ```
///
/// Lower branch, `s = -t`, order `b = beta`, slopes `d = dW/ds (0)`:
///
/// ```text
/// W_0  = c0 + d0 s + f0 s^b / Γ(b+1)
/// W_2k = c2 E_{b,1} + d2 s E_{b,2} + f2 s^b E_{b,b+1}
/// W_1k = c1 E_{b,1} + d1 s E_{b,2} + f1 s^b E_{b,b+1}
///        + 4k pi (c2 s^b E2_{b,b+1} + d2 s^(b+1) E2_{b,b+2} + f2 s^2b E2_{b,2b+1})
/// ```
///
/// `E2` is the bivariate Mittag-Leffler series with all auxiliary parameters
/// one and equal arguments, i.e. `sum (n+1) z^n / Γ(a n + delta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSolution {
    pub branch: Branch,
    pub kind: ModeKind,
    pub params: ProblemParameters,
    pub index: Option<ModeIndex>,
    pub own: ModeConstants,
    /// Constants of the `x sin` mode of the same index; present for cosine modes.
    pub partner: Option<ModeConstants>,
}

impl ModeSolution {
    pub fn zero(branch: Branch, params: ProblemParameters, own: ModeConstants) -> Result<Self> {
        params.validate()?;
        Ok(ModeSolution {
            branch,
            kind: ModeKind::Zero,
            params,
            index: None,
            own,
            partner: None,
        })
    }

    pub fn x_sin(
        branch: Branch,
        params: ProblemParameters,
        index: ModeIndex,
        own: ModeConstants,
    ) -> Result<Self> {
        params.validate()?;
        Ok(ModeSolution {
            branch,
            kind: ModeKind::XSin,
            params,
            index: Some(index),
            own,
            partner: None,
        })
    }

    pub fn cos(
        branch: Branch,
        params: ProblemParameters,
        index: ModeIndex,
        own: ModeConstants,
        partner: ModeConstants,
    ) -> Result<Self> {
        params.validate()?;
        Ok(ModeSolution {
            branch,
            kind: ModeKind::Cos,
            params,
            index: Some(index),
            own,
            partner: Some(partner),
        })
    }

    /// Picks the constants of one mode out of the stored initial data and
    /// source coefficients. `k` is ignored for the zero mode.
    pub fn from_data(
        branch: Branch,
        kind: ModeKind,
        params: ProblemParameters,
        k: u32,
        data: &ModeInitialData,
        source: &SourceCoefficients,
    ) -> Result<Self> {
        let upper = branch == Branch::Upper;
        let pick = |v: f64, w: f64, wp: f64, f: f64| ModeConstants {
            value0: if upper { v } else { w },
            slope0: if upper { 0.0 } else { wp },
            source: f,
        };
        if kind == ModeKind::Zero {
            return Self::zero(branch, params, pick(data.v0_0, data.w0_0, data.w0p_0, source.f0));
        }
        let index = ModeIndex::new(k)?;
        let i = k as usize - 1;
        if i >= source.truncation() {
            return Err(Error::Parameter {
                name: "k",
                value: f64::from(k),
            });
        }
        let xsin = pick(data.v2k_0, data.w2k_0, data.w2kp_0, source.f2k[i]);
        match kind {
            ModeKind::XSin => Self::x_sin(branch, params, index, xsin),
            _ => Self::cos(
                branch,
                params,
                index,
                pick(data.v1k_0, data.w1k_0, data.w1kp_0, source.f1k[i]),
                xsin,
            ),
        }
    }

    fn order(&self) -> f64 {
        branch_order(self.branch, &self.params)
    }

    /// A kernel at `t` for this mode's branch and index.
    pub fn kernel(&self, t: f64, cfg: &EvalConfig) -> Result<Option<ModeKernel>> {
        match self.index {
            Some(index) => ModeKernel::new(self.branch, &self.params, index, t, cfg).map(Some),
            None => {
                branch_time(self.branch, &self.params, t)?;
                Ok(None)
            }
        }
    }

    fn check_kernel(&self, kernel: &ModeKernel) -> Result<()> {
        if kernel.branch != self.branch {
            return Err(Error::Parameter {
                name: "kernel branch",
                value: kernel.s,
            });
        }
        Ok(())
    }

    /// Mode value at `t`.
    pub fn value(&self, t: f64, cfg: &EvalConfig) -> Result<f64> {
        match self.kernel(t, cfg)? {
            Some(mut kernel) => self.value_with(&mut kernel),
            None => Ok(self.zero_value(branch_time(self.branch, &self.params, t)?)),
        }
    }

    fn zero_value(&self, s: f64) -> f64 {
        let a = self.order();
        let c = self.own;
        let forcing = c.source * libm::pow(s, a) / gamma_unchecked(a + 1.0);
        match self.branch {
            Branch::Upper => c.value0 + forcing,
            Branch::Lower => c.value0 + c.slope0 * s + forcing,
        }
    }

    /// Mode value from a kernel built at the evaluation time. The zero mode
    /// needs no kernel and is rejected here; use [`ModeSolution::value`].
    pub fn value_with(&self, kernel: &mut ModeKernel) -> Result<f64> {
        self.check_kernel(kernel)?;
        let index = self.index.ok_or(Error::Parameter {
            name: "index",
            value: 0.0,
        })?;
        let a = self.order();
        let s = kernel.s;
        let lower = self.branch == Branch::Lower;
        let base = |kernel: &mut ModeKernel, c: ModeConstants| -> Result<f64> {
            let mut v = c.value0 * kernel.get(Term::E1)?
                + c.source * kernel.pw(a) * kernel.get(Term::EA1)?;
            if lower {
                v += c.slope0 * s * kernel.get(Term::E2)?;
            }
            Ok(v)
        };
        let mut v = base(kernel, self.own)?;
        if let Some(c2) = self.partner {
            let mut coupled = c2.value0 * kernel.pw(a) * kernel.get(Term::CA1)?
                + c2.source * kernel.pw(2.0 * a) * kernel.get(Term::C2A1)?;
            if lower {
                coupled += c2.slope0 * kernel.pw(a + 1.0) * kernel.get(Term::CA2)?;
            }
            v += index.coupling() * coupled;
        }
        Ok(v)
    }
}

fn gamma_unchecked(x: f64) -> f64 {
    // Only called with x > 1.
    gamma(x).unwrap_or(f64::NAN)
}

impl ModeSolution {
    /// `d/d(-t)` of a lower-branch mode at `t in [-p, 0]`:
    ///
    /// ```text
    /// W_0'  = d0 + f0 s^(b-1) / Γ(b)
    /// W_2k' = -lam c2 s^(b-1) E_{b,b} + d2 E_{b,1} + f2 s^(b-1) E_{b,b}
    /// W_1k' = -lam c1 s^(b-1) E_{b,b} + d1 E_{b,1} + f1 s^(b-1) E_{b,b}
    ///         + 4k pi (c2 s^(b-1) E2_{b,b} + d2 s^b E2_{b,b+1} + f2 s^(2b-1) E2_{b,2b})
    /// ```
    pub fn d_dtau(&self, t: f64, cfg: &EvalConfig) -> Result<f64> {
        if self.branch != Branch::Lower {
            return Err(Error::Domain {
                t,
                lo: -self.params.p,
                hi: 0.0,
            });
        }
        match self.kernel(t, cfg)? {
            Some(mut kernel) => self.d_dtau_with(&mut kernel),
            None => {
                let b = self.params.beta;
                let c = self.own;
                Ok(c.slope0 + c.source * libm::pow(-t, b - 1.0) / gamma_unchecked(b))
            }
        }
    }

    pub fn d_dtau_with(&self, kernel: &mut ModeKernel) -> Result<f64> {
        self.check_kernel(kernel)?;
        let index = self.index.ok_or(Error::Parameter {
            name: "index",
            value: 0.0,
        })?;
        if self.branch != Branch::Lower {
            return Err(Error::Parameter {
                name: "branch",
                value: kernel.s,
            });
        }
        let b = self.params.beta;
        let c = self.own;
        let sb1 = kernel.pw(b - 1.0);
        let mut v = (c.source - index.lam() * c.value0) * sb1 * kernel.get(Term::EA)?
            + c.slope0 * kernel.get(Term::E1)?;
        if let Some(c2) = self.partner {
            let coupled = c2.value0 * sb1 * kernel.get(Term::CA)?
                + c2.slope0 * kernel.pw(b) * kernel.get(Term::CA1)?
                + c2.source * kernel.pw(2.0 * b - 1.0) * kernel.get(Term::C2A)?;
            v += index.coupling() * coupled;
        }
        Ok(v)
    }

    /// Caputo derivative of the mode (order `alpha` from 0 above the line,
    /// order `beta` toward 0 below it) from the Mittag-Leffler
    /// differentiation rules:
    ///
    /// ```text
    /// D (zero)  = f0
    /// D (x sin) = -lam (c2 E_{a,1} + d2 s E_{a,2}) + f2 E_{a,1}
    /// D (cos)   = -lam (c1 E_{a,1} + d1 s E_{a,2}) + f1 E_{a,1}
    ///             + 4k pi (c2 E2_{a,1} + d2 s E2_{a,2} + f2 s^a E2_{a,a+1})
    /// ```
    ///
    /// Slopes `d` are zero on the upper branch.
    pub fn caputo(&self, t: f64, cfg: &EvalConfig) -> Result<f64> {
        match self.kernel(t, cfg)? {
            Some(mut kernel) => self.caputo_with(&mut kernel),
            None => Ok(self.own.source),
        }
    }

    pub fn caputo_with(&self, kernel: &mut ModeKernel) -> Result<f64> {
        self.check_kernel(kernel)?;
        let index = self.index.ok_or(Error::Parameter {
            name: "index",
            value: 0.0,
        })?;
        let a = self.order();
        let s = kernel.s;
        let lower = self.branch == Branch::Lower;
        let c = self.own;
        let e1 = kernel.get(Term::E1)?;
        let mut homogeneous = c.value0 * e1;
        if lower {
            homogeneous += c.slope0 * s * kernel.get(Term::E2)?;
        }
        let mut v = c.source * e1 - index.lam() * homogeneous;
        if let Some(c2) = self.partner {
            let mut coupled = c2.value0 * kernel.get(Term::C1)?
                + c2.source * kernel.pw(a) * kernel.get(Term::CA1)?;
            if lower {
                coupled += c2.slope0 * s * kernel.get(Term::C2)?;
            }
            v += index.coupling() * coupled;
        }
        Ok(v)
    }

    /// Right side of the mode equation, `f - lam X` for the `x sin` mode and
    /// `f + 4k pi X_2 - lam X` for the cosine mode, with the values `X`
    /// taken from the closed forms.
    pub fn equation_rhs(&self, t: f64, cfg: &EvalConfig) -> Result<f64> {
        let index = match self.index {
            None => return Ok(self.own.source),
            Some(index) => index,
        };
        let mut kernel = ModeKernel::new(self.branch, &self.params, index, t, cfg)?;
        let mut rhs = self.own.source - index.lam() * self.value_with(&mut kernel)?;
        if let Some(c2) = self.partner {
            let xsin = ModeSolution::x_sin(self.branch, self.params, index, c2)?;
            rhs += index.coupling() * xsin.value_with(&mut kernel)?;
        }
        Ok(rhs)
    }
}

/// `d/d(-t)` of a lower-branch mode.
pub fn d_dt_neg_w(mode: &ModeSolution, t: f64, cfg: &EvalConfig) -> Result<f64> {
    mode.d_dtau(t, cfg)
}
