//! Minimal binary floating point with caller-chosen precision.
//!
//! A value is `mant * 2^exp` with a signed big-integer mantissa. Every
//! arithmetic operation takes the target precision in bits and truncates the
//! mantissa to it, so rounding error per operation is below one unit in the
//! last kept bit. This is all the high-precision Mittag-Leffler path needs:
//! addition, multiplication, division, `exp`, `ln` and a couple of constants.

use core::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Self {
        BigFloat {
            mant: BigInt::from(v),
            exp: 0,
        }
    }

    pub fn from_bigint(v: BigInt) -> Self {
        BigFloat { mant: v, exp: 0 }
    }

    /// Exact conversion; panics on non-finite input.
    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "BigFloat::from_f64 on non-finite value");
        if v == 0.0 {
            return Self::zero();
        }
        let bits = v.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let mut mant = BigInt::from(m);
        if negative {
            mant = -mant;
        }
        BigFloat { mant, exp: e }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.sign() == Sign::Minus
    }

    /// Position of the leading bit: `|self|` lies in `[2^(m-1), 2^m)`.
    /// Returns `i64::MIN` for zero.
    pub fn magnitude(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.mant.bits() as i64 + self.exp
        }
    }

    fn rounded(mut self, prec: u32) -> Self {
        let bits = self.mant.bits();
        if bits > u64::from(prec) {
            let shift = bits - u64::from(prec);
            let negative = self.is_negative();
            let mag = self.mant.magnitude() >> shift;
            self.mant = BigInt::from_biguint(if negative { Sign::Minus } else { Sign::Plus }, mag);
            self.exp += shift as i64;
        }
        if self.mant.is_zero() {
            self.exp = 0;
        }
        self
    }

    pub fn neg(&self) -> Self {
        BigFloat {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn mul_pow2(&self, n: i64) -> Self {
        BigFloat {
            mant: self.mant.clone(),
            exp: self.exp + n,
        }
    }

    pub fn add(&self, other: &Self, prec: u32) -> Self {
        if self.is_zero() {
            return other.clone().rounded(prec);
        }
        if other.is_zero() {
            return self.clone().rounded(prec);
        }
        // Operands far below the target precision of the larger one are dropped.
        let gap = self.magnitude() - other.magnitude();
        let limit = i64::from(prec) + 2;
        if gap > limit {
            return self.clone().rounded(prec);
        }
        if -gap > limit {
            return other.clone().rounded(prec);
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let shift = (hi.exp - lo.exp) as usize;
        let mant = (&hi.mant << shift) + &lo.mant;
        BigFloat { mant, exp: lo.exp }.rounded(prec)
    }

    pub fn sub(&self, other: &Self, prec: u32) -> Self {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Self, prec: u32) -> Self {
        BigFloat {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
        .rounded(prec)
    }

    pub fn mul_i64(&self, k: i64, prec: u32) -> Self {
        BigFloat {
            mant: &self.mant * k,
            exp: self.exp,
        }
        .rounded(prec)
    }

    /// Panics on division by zero.
    pub fn div(&self, other: &Self, prec: u32) -> Self {
        assert!(!other.is_zero(), "BigFloat division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let want = i64::from(prec) + 2;
        let shift = (want + other.mant.bits() as i64 - self.mant.bits() as i64).max(0);
        let num = &self.mant << (shift as usize);
        BigFloat {
            mant: num / &other.mant,
            exp: self.exp - other.exp - shift,
        }
        .rounded(prec)
    }

    pub fn div_i64(&self, k: i64, prec: u32) -> Self {
        self.div(&Self::from_i64(k), prec)
    }

    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (ma, mb) = (self.magnitude(), other.magnitude());
        if ma != mb {
            return ma.cmp(&mb);
        }
        let e = self.exp.min(other.exp);
        let a = self.mant.abs() << ((self.exp - e) as usize);
        let b = other.mant.abs() << ((other.exp - e) as usize);
        a.cmp(&b)
    }

    /// Nearest-ish `f64` (truncated to 64 significant bits first). Saturates
    /// to infinity on overflow and flushes to zero on underflow.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (top, exp) = if bits > 64 {
            let shift = bits - 64;
            (self.mant.magnitude() >> shift, self.exp + shift as i64)
        } else {
            (self.mant.magnitude().clone(), self.exp)
        };
        let top = top.to_u64().expect("mantissa fits in 64 bits") as f64;
        let exp = exp.clamp(-4000, 4000) as i32;
        let v = libm::scalbn(top, exp);
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    /// Canonical `(mantissa, exponent)` with trailing zero bits removed, so
    /// equal values give equal keys.
    pub fn normalized_key(&self) -> (BigInt, i64) {
        if self.is_zero() {
            return (BigInt::zero(), 0);
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        (&self.mant >> (tz as usize), self.exp + tz as i64)
    }

    /// Integer part toward zero, for values that fit in an `i64`.
    fn trunc_i64(&self) -> Option<i64> {
        if self.exp >= 0 {
            (&self.mant << (self.exp as usize)).to_i64()
        } else {
            let shift = (-self.exp) as u64;
            let mag = self.mant.magnitude() >> shift;
            let v = mag.to_i64()?;
            Some(if self.is_negative() { -v } else { v })
        }
    }
}

/// `ln 2` via `2 atanh(1/3)`.
pub fn ln2(prec: u32) -> BigFloat {
    let wp = prec + 16;
    atanh_inv(3, wp).mul_pow2(1).rounded(prec)
}

/// `atanh(1/n)` for an integer `n > 1`.
fn atanh_inv(n: i64, prec: u32) -> BigFloat {
    let n2 = n * n;
    let mut power = BigFloat::one().div_i64(n, prec);
    let mut sum = power.clone();
    let mut k = 1i64;
    loop {
        power = power.div_i64(n2, prec);
        let term = power.div_i64(2 * k + 1, prec);
        if term.is_zero() || term.magnitude() < sum.magnitude() - i64::from(prec) - 2 {
            break;
        }
        sum = sum.add(&term, prec);
        k += 1;
    }
    sum
}

/// `atan(1/n)` for an integer `n > 1`.
fn atan_inv(n: i64, prec: u32) -> BigFloat {
    let n2 = n * n;
    let mut power = BigFloat::one().div_i64(n, prec);
    let mut sum = power.clone();
    let mut k = 1i64;
    loop {
        power = power.div_i64(n2, prec);
        let term = power.div_i64(2 * k + 1, prec);
        if term.is_zero() || term.magnitude() < sum.magnitude() - i64::from(prec) - 2 {
            break;
        }
        sum = if k % 2 == 1 {
            sum.sub(&term, prec)
        } else {
            sum.add(&term, prec)
        };
        k += 1;
    }
    sum
}

/// Machin's formula.
pub fn pi(prec: u32) -> BigFloat {
    let wp = prec + 16;
    let a = atan_inv(5, wp).mul_i64(16, wp);
    let b = atan_inv(239, wp).mul_i64(4, wp);
    a.sub(&b, wp).rounded(prec)
}

/// `e^x`. `ln2` must carry at least `prec` bits.
pub fn exp(x: &BigFloat, ln2: &BigFloat, prec: u32) -> BigFloat {
    const HALVINGS: i64 = 12;
    let wp = prec + HALVINGS as u32 + 16;
    let n = x.div(ln2, 64 + x.magnitude().max(0) as u32).trunc_i64().expect("exp argument in range");
    let r = x.sub(&ln2.mul_i64(n, wp + 64), wp).mul_pow2(-HALVINGS);
    let mut term = BigFloat::one();
    let mut sum = BigFloat::one();
    let mut k = 1i64;
    loop {
        term = term.mul(&r, wp).div_i64(k, wp);
        if term.is_zero() || term.magnitude() < -i64::from(wp) {
            break;
        }
        sum = sum.add(&term, wp);
        k += 1;
    }
    for _ in 0..HALVINGS {
        sum = sum.mul(&sum, wp);
    }
    sum.mul_pow2(n).rounded(prec)
}

/// Natural logarithm of a positive value.
pub fn ln(x: &BigFloat, ln2: &BigFloat, prec: u32) -> BigFloat {
    assert!(!x.is_zero() && !x.is_negative(), "ln of non-positive value");
    let wp = prec + 16;
    // x = m * 2^e with m in [1/sqrt2, sqrt2)
    let mut e = x.magnitude();
    let mut m = x.mul_pow2(-e);
    if m.to_f64() < core::f64::consts::FRAC_1_SQRT_2 {
        m = m.mul_pow2(1);
        e -= 1;
    }
    let one = BigFloat::one();
    let u = m.sub(&one, wp).div(&m.add(&one, wp), wp);
    let u2 = u.mul(&u, wp);
    let mut power = u.clone();
    let mut sum = u.clone();
    let mut k = 1i64;
    if !u.is_zero() {
        loop {
            power = power.mul(&u2, wp);
            let term = power.div_i64(2 * k + 1, wp);
            if term.is_zero() || term.magnitude() < sum.magnitude() - i64::from(wp) {
                break;
            }
            sum = sum.add(&term, wp);
            k += 1;
        }
    }
    let log_m = sum.mul_pow2(1);
    ln2.mul_i64(e, wp).add(&log_m, wp).rounded(prec)
}
