//! Gamma function in double precision and at arbitrary precision.

use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::bigfloat::{self, BigFloat};
use crate::error::{Error, Result};

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && libm::floor(x) == x
}

/// Γ(x). Errors at the poles `0, -1, -2, ...`.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() || is_nonpositive_integer(x) {
        return Err(Error::Pole { x });
    }
    Ok(libm::tgamma(x))
}

/// 1/Γ(x), continued by zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 170.0 {
        return libm::exp(-libm::lgamma(x));
    }
    if x < -170.0 {
        let (ln_abs, sign) = ln_abs_rgamma(x);
        return sign * libm::exp(ln_abs);
    }
    1.0 / libm::tgamma(x)
}

/// `(ln |1/Γ(x)|, sign(1/Γ(x)))`; `(-inf, 0)` at poles.
pub fn ln_abs_rgamma(x: f64) -> (f64, f64) {
    if is_nonpositive_integer(x) {
        return (f64::NEG_INFINITY, 0.0);
    }
    let (lg, sign) = libm::lgamma_r(x);
    (-lg, f64::from(sign))
}

/// Bernoulli-based Stirling coefficients `B_2j / (2j (2j - 1))` for `j = 1..=n`,
/// from the integer tangent numbers.
fn stirling_coefficients(n: usize, prec: u32) -> Vec<BigFloat> {
    // Tangent numbers T_1..T_n (Brent & Harvey, integer recurrence).
    let mut t: Vec<BigInt> = alloc::vec![BigInt::from(0); n + 1];
    if n >= 1 {
        t[1] = BigInt::from(1);
    }
    for k in 2..=n {
        t[k] = &t[k - 1] * (k as u64 - 1);
    }
    for k in 2..=n {
        for j in k..=n {
            t[j] = &t[j - 1] * (j as u64 - k as u64) + &t[j] * (j as u64 - k as u64 + 2);
        }
    }
    // B_2j = (-1)^(j-1) 2j T_j / (4^j (4^j - 1))
    // => B_2j / (2j (2j-1)) = (-1)^(j-1) T_j / ((2j-1) 4^j (4^j - 1))
    (1..=n)
        .map(|j| {
            let four_j = BigInt::from(1) << (2 * j);
            let den = (&four_j - 1) * four_j * (2 * j as u64 - 1);
            let mut c = BigFloat::from_bigint(t[j].clone()).div(&BigFloat::from_bigint(den), prec);
            if j % 2 == 0 {
                c = c.neg();
            }
            c
        })
        .collect()
}

/// Precomputed constants for evaluating 1/Γ at a fixed working precision.
pub(crate) struct BigGamma {
    prec: u32,
    ln2: BigFloat,
    half_ln_2pi: BigFloat,
    coeffs: Vec<BigFloat>,
    /// Arguments are shifted up to at least this value before Stirling's series.
    shift_to: i64,
}

impl BigGamma {
    pub(crate) fn new(prec: u32) -> Self {
        let wp = prec + 32;
        let ln2 = bigfloat::ln2(wp);
        let two_pi = bigfloat::pi(wp).mul_pow2(1);
        let half_ln_2pi = bigfloat::ln(&two_pi, &ln2, wp).mul_pow2(-1);
        // The smallest Stirling term at argument w is about exp(-2 pi w); w = 0.2 prec
        // puts it near 2^(-1.8 prec), and ~0.16 prec terms reach 2^(-prec).
        let shift_to = 16 + i64::from(prec) / 5;
        let n = 8 + prec as usize / 5;
        let coeffs = stirling_coefficients(n, wp);
        BigGamma {
            prec: wp,
            ln2,
            half_ln_2pi,
            coeffs,
            shift_to,
        }
    }

    /// 1/Γ(y) for `y > 0`.
    pub(crate) fn rgamma(&self, y: &BigFloat) -> BigFloat {
        let wp = self.prec;
        debug_assert!(!y.is_negative() && !y.is_zero());
        let y_approx = y.to_f64();
        let mut w = y.clone();
        let mut prod = BigFloat::one();
        let shift = libm::ceil(self.shift_to as f64 - y_approx);
        if shift > 0.0 {
            for _ in 0..shift as i64 {
                prod = prod.mul(&w, wp);
                w = w.add(&BigFloat::one(), wp);
            }
        }
        // ln Γ(w) = (w - 1/2) ln w - w + ln(2 pi)/2 + sum_j c_j w^(1-2j)
        let ln_w = bigfloat::ln(&w, &self.ln2, wp);
        let mut lg = w
            .sub(&BigFloat::from_f64(0.5), wp)
            .mul(&ln_w, wp)
            .sub(&w, wp)
            .add(&self.half_ln_2pi, wp);
        let inv_w = BigFloat::one().div(&w, wp);
        let inv_w2 = inv_w.mul(&inv_w, wp);
        let mut power = inv_w;
        let floor = lg.magnitude().max(0) - i64::from(wp);
        for c in &self.coeffs {
            let term = c.mul(&power, wp);
            lg = lg.add(&term, wp);
            if term.magnitude() < floor {
                break;
            }
            power = power.mul(&inv_w2, wp);
        }
        prod.mul(&bigfloat::exp(&lg.neg(), &self.ln2, wp), wp)
    }
}
