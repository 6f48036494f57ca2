//! Two-variable Mittag-Leffler-type function
//!
//! ```text
//! E_1(x, y) = sum_{m,n} (g1)_{a1 m} (g2)_{b1 n} / Γ(d1 + a2 m + b2 n)
//!                       * x^m / Γ(d2 + a3 m) * y^n / Γ(d3 + b3 n)
//! ```
//!
//! with the generalized Pochhammer symbol `(g)_{a m} = Γ(g + a m) / Γ(g)`.
//! When `g1 = g2 = a1 = b1 = d2 = d3 = a3 = b3 = 1`, `a2 = b2` and `x = y`,
//! the factorials cancel and the diagonal sums collapse to
//! `sum_s (s + 1) z^s / Γ(d1 + a2 s)`, which is evaluated through
//! [`ml_family`] with order 2. The double sum stays available as an
//! independent route.

use alloc::collections::BTreeMap;

use num_bigint::BigInt;

use super::gamma::{ln_abs_rgamma, rgamma, BigGamma};
use super::mittag_leffler::{ml_family, EvalConfig};
use crate::bigfloat::BigFloat;
use crate::error::{check, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BivariateMlSpec {
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

impl BivariateMlSpec {
    /// The shape that appears in the mode solutions: every auxiliary
    /// parameter equal to one, `a2 = b2 = order`, equal arguments.
    pub fn collapsed(order: f64, delta1: f64, z: f64) -> Self {
        BivariateMlSpec {
            gamma1: 1.0,
            gamma2: 1.0,
            a1: 1.0,
            b1: 1.0,
            delta1,
            a2: order,
            b2: order,
            delta2: 1.0,
            a3: 1.0,
            delta3: 1.0,
            b3: 1.0,
            x: z,
            y: z,
        }
    }

    pub fn is_collapsible(&self) -> bool {
        self.gamma1 == 1.0
            && self.gamma2 == 1.0
            && self.a1 == 1.0
            && self.b1 == 1.0
            && self.delta2 == 1.0
            && self.delta3 == 1.0
            && self.a3 == 1.0
            && self.b3 == 1.0
            && self.a2 == self.b2
            && self.x == self.y
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("a1", self.a1),
            ("b1", self.b1),
            ("delta1", self.delta1),
            ("a2", self.a2),
            ("b2", self.b2),
            ("delta2", self.delta2),
            ("a3", self.a3),
            ("delta3", self.delta3),
            ("b3", self.b3),
        ] {
            check(v > 0.0 && v.is_finite(), name, v)?;
        }
        check(self.x.is_finite(), "x", self.x)?;
        check(self.y.is_finite(), "y", self.y)
    }
}

pub fn bivariate_ml(spec: &BivariateMlSpec, cfg: &EvalConfig) -> Result<f64> {
    spec.validate()?;
    eval_unchecked(spec, cfg)
}

fn eval_unchecked(spec: &BivariateMlSpec, cfg: &EvalConfig) -> Result<f64> {
    if spec.is_collapsible() {
        ml_family(spec.a2, spec.delta1, 2, spec.x, cfg)
    } else {
        double_sum(spec, cfg)
    }
}

/// `t^(d1 - gamma - 1) E_1(... d1 - gamma ... | x t^a2, y t^b2)`: the
/// Riemann-Liouville derivative of order `gamma_ord` of
/// `t^(d1 - 1) E_1(spec | x t^a2, y t^b2)`. Here `spec.x` and `spec.y` are
/// the coefficients multiplying the powers of `t`.
pub fn bivariate_ml_derivative(
    spec: &BivariateMlSpec,
    gamma_ord: f64,
    t: f64,
    cfg: &EvalConfig,
) -> Result<f64> {
    spec.validate()?;
    check(gamma_ord >= 0.0 && gamma_ord.is_finite(), "gamma_ord", gamma_ord)?;
    check(t > 0.0 && t.is_finite(), "t", t)?;
    let shifted = BivariateMlSpec {
        delta1: spec.delta1 - gamma_ord,
        x: spec.x * libm::pow(t, spec.a2),
        y: spec.y * libm::pow(t, spec.b2),
        ..*spec
    };
    Ok(libm::pow(t, spec.delta1 - gamma_ord - 1.0) * eval_unchecked(&shifted, cfg)?)
}

/// The general double series summed term by term in high precision,
/// regardless of whether the spec collapses.
pub fn bivariate_ml_double_sum(spec: &BivariateMlSpec, cfg: &EvalConfig) -> Result<f64> {
    spec.validate()?;
    double_sum(spec, cfg)
}

const MAX_INDEX: usize = 20_000;

fn ln_gamma_pos(x: f64) -> f64 {
    libm::lgamma(x)
}

/// ln |term(m, n)| in double precision, for sizing the high-precision pass.
fn ln_term(spec: &BivariateMlSpec, m: usize, n: usize) -> f64 {
    let (mf, nf) = (m as f64, n as f64);
    let mut l = ln_gamma_pos(spec.gamma1 + spec.a1 * mf) - ln_gamma_pos(spec.gamma1)
        + ln_gamma_pos(spec.gamma2 + spec.b1 * nf)
        - ln_gamma_pos(spec.gamma2);
    l += ln_abs_rgamma(spec.delta1 + spec.a2 * mf + spec.b2 * nf).0;
    l += ln_abs_rgamma(spec.delta2 + spec.a3 * mf).0;
    l += ln_abs_rgamma(spec.delta3 + spec.b3 * nf).0;
    if m > 0 {
        l += mf * libm::log(spec.x.abs());
    }
    if n > 0 {
        l += nf * libm::log(spec.y.abs());
    }
    l
}

/// Index ranges `n < extent[m]` outside of which every term is below `peak - cutoff`.
fn extents(spec: &BivariateMlSpec, cutoff: f64) -> Result<(f64, alloc::vec::Vec<usize>)> {
    let mut rows = alloc::vec::Vec::new();
    let mut peak = f64::NEG_INFINITY;
    let y_zero = spec.y == 0.0;
    let x_zero = spec.x == 0.0;
    for m in 0..MAX_INDEX {
        let mut row_peak = f64::NEG_INFINITY;
        let mut n = 0;
        loop {
            let l = ln_term(spec, m, n);
            row_peak = row_peak.max(l);
            peak = peak.max(l);
            n += 1;
            if y_zero || (n > 2 && l < row_peak - cutoff && l < peak - cutoff) {
                break;
            }
            if n >= MAX_INDEX {
                return Err(Error::Range {
                    what: "y",
                    value: spec.y,
                });
            }
        }
        rows.push(n);
        if x_zero || (m > 2 && row_peak < peak - cutoff && ln_term(spec, m, 0) < peak - cutoff) {
            return Ok((peak, rows));
        }
    }
    Err(Error::Range {
        what: "x",
        value: spec.x,
    })
}

fn key(v: &BigFloat) -> (BigInt, i64) {
    v.normalized_key()
}

fn double_sum(spec: &BivariateMlSpec, cfg: &EvalConfig) -> Result<f64> {
    if spec.x.abs() > 1e3 || spec.y.abs() > 1e3 {
        return Err(Error::Range {
            what: "argument",
            value: spec.x.abs().max(spec.y.abs()),
        });
    }
    let (peak, _) = extents(spec, 200.0)?;
    let bits = cfg.precision_bits.unwrap_or_else(|| {
        let spread = libm::log2(1.0 + spec.x.abs() + spec.y.abs());
        (peak.max(0.0) / core::f64::consts::LN_2 + 2.0 * spread) as u32 + 96
    });
    let wp = bits + 16;
    let (_, rows) = extents(spec, core::f64::consts::LN_2 * f64::from(wp + 16))?;

    let gamma = BigGamma::new(bits);
    let mut memo: BTreeMap<(BigInt, i64), BigFloat> = BTreeMap::new();
    let mut rg = |arg: BigFloat| -> BigFloat {
        let k = key(&arg);
        if let Some(v) = memo.get(&k) {
            return v.clone();
        }
        let a = arg.to_f64();
        let v = if a <= 0.0 {
            BigFloat::from_f64(rgamma(a))
        } else {
            gamma.rgamma(&arg)
        };
        memo.insert(k, v.clone());
        v
    };
    let big = BigFloat::from_f64;
    let exact = wp + 128;
    let pochhammer = |rg: &mut dyn FnMut(BigFloat) -> BigFloat, g: f64, step: f64, i: usize| {
        let arg = big(g).add(&big(step).mul_i64(i as i64, exact), exact);
        rg(big(g)).div(&rg(arg), wp)
    };

    let xb = big(spec.x);
    let yb = big(spec.y);
    let mut sum = BigFloat::zero();
    let mut xpow = BigFloat::one();
    for (m, &n_extent) in rows.iter().enumerate() {
        let poch_m = pochhammer(&mut rg, spec.gamma1, spec.a1, m);
        let arg2 = big(spec.delta2).add(&big(spec.a3).mul_i64(m as i64, exact), exact);
        let x_part = xpow.mul(&poch_m, wp).mul(&rg(arg2), wp);
        let mut ypow = BigFloat::one();
        for n in 0..n_extent {
            let poch_n = pochhammer(&mut rg, spec.gamma2, spec.b1, n);
            let arg3 = big(spec.delta3).add(&big(spec.b3).mul_i64(n as i64, exact), exact);
            let arg1 = big(spec.delta1)
                .add(&big(spec.a2).mul_i64(m as i64, exact), exact)
                .add(&big(spec.b2).mul_i64(n as i64, exact), exact);
            let term = x_part
                .mul(&ypow, wp)
                .mul(&poch_n, wp)
                .mul(&rg(arg3), wp)
                .mul(&rg(arg1), wp);
            sum = sum.add(&term, wp);
            ypow = ypow.mul(&yb, wp);
        }
        xpow = xpow.mul(&xb, wp);
    }
    Ok(sum.to_f64())
}
