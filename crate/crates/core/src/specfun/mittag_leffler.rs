//! Mittag-Leffler functions with an integer upper parameter.
//!
//! The workhorse is
//!
//! ```text
//! E^g_{a,b}(z) = sum_{s>=0} C(s+g-1, g-1) z^s / Γ(a s + b)
//! ```
//!
//! which is the two-parameter function for `g = 1`, the equal-argument
//! bivariate series for `g = 2`, and `E^{(k)}_{a,b} / k!` (shifted) for
//! `g = k + 1`. Three evaluation regimes are used on the negative axis,
//! chosen from the scale `r = |z|^(1/a)` that controls the largest series term
//! (about `e^r`):
//!
//! * `r <= 2`: plain double-precision series.
//! * `2 < r < 36`: the same series summed in [`BigFloat`] with enough bits to
//!   absorb the `e^r` cancellation.
//! * `r >= 36`: the algebraic asymptotic expansion, plus the two decaying
//!   oscillatory saddle contributions when `1 < a <= 2`.
//!
//! Non-negative arguments have no cancellation and always use the double
//! series.

use num_bigint::BigInt;

use super::gamma::{ln_abs_rgamma, rgamma, BigGamma};
use crate::bigfloat::BigFloat;
use crate::error::{Error, Result};

/// Largest |z| accepted.
pub const MAX_ARGUMENT: f64 = 1e6;
/// Scale `|z|^(1/a)` at or above which the asymptotic expansion is used.
pub const ASYMPTOTIC_SCALE: f64 = 36.0;
/// Scale at or below which double-precision summation is accurate.
pub const DOUBLE_SCALE: f64 = 2.0;
const MAX_BITS: u32 = 1 << 16;
const MAX_TERMS: usize = 200_000;

/// Evaluation knobs shared by every special-function entry point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalConfig {
    /// Fixed mantissa width for the high-precision path. `None` picks the
    /// width from the argument.
    pub precision_bits: Option<u32>,
}

/// Which regime produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    DoubleSeries,
    BigFloatSeries { bits: u32 },
    Asymptotic,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::DoubleSeries => "double-series",
            Method::BigFloatSeries { .. } => "bigfloat-series",
            Method::Asymptotic => "asymptotic",
        }
    }
}

/// `E^g_{a,b}(z)` for any real `b`; terms with Γ at a pole contribute zero.
pub fn ml_family(alpha: f64, beta: f64, order: u32, z: f64, cfg: &EvalConfig) -> Result<f64> {
    ml_family_traced(alpha, beta, order, z, cfg).map(|(v, _)| v)
}

pub fn ml_family_traced(
    alpha: f64,
    beta: f64,
    order: u32,
    z: f64,
    cfg: &EvalConfig,
) -> Result<(f64, Method)> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter {
            name: "alpha",
            value: alpha,
        });
    }
    if !beta.is_finite() {
        return Err(Error::Parameter {
            name: "beta",
            value: beta,
        });
    }
    if order == 0 {
        return Err(Error::Parameter {
            name: "order",
            value: 0.0,
        });
    }
    if !z.is_finite() || z.abs() > MAX_ARGUMENT {
        return Err(Error::Range {
            what: "argument",
            value: z,
        });
    }
    if z == 0.0 {
        return Ok((rgamma(beta), Method::Exact));
    }
    if z > 0.0 {
        return series_f64(alpha, beta, order, z).map(|v| (v, Method::DoubleSeries));
    }
    let x = -z;
    let scale = libm::pow(x, 1.0 / alpha);
    if scale <= DOUBLE_SCALE {
        return series_f64(alpha, beta, order, z).map(|v| (v, Method::DoubleSeries));
    }
    if scale >= ASYMPTOTIC_SCALE {
        if alpha <= 1.0 || (alpha <= 2.0 && order <= 2) {
            return Ok((asymptotic(alpha, beta, order, x), Method::Asymptotic));
        }
        return Err(Error::Range {
            what: "argument",
            value: z,
        });
    }
    let bits = match cfg.precision_bits {
        Some(b) => b.max(64),
        None => required_bits(alpha, beta, order, x),
    };
    if bits > MAX_BITS {
        return Err(Error::Range {
            what: "argument",
            value: z,
        });
    }
    series_big(alpha, beta, order, z, bits).map(|v| (v, Method::BigFloatSeries { bits }))
}

fn ln_binomial(s: usize, order: u32) -> f64 {
    // ln C(s + g - 1, g - 1)
    let g = order as usize;
    (1..g).map(|i| libm::log((s + i) as f64 / i as f64)).sum()
}

fn binomial_f64(s: usize, order: u32) -> f64 {
    let g = order as usize;
    (1..g).fold(1.0, |acc, i| acc * (s + i) as f64 / i as f64)
}

fn series_f64(alpha: f64, beta: f64, order: u32, z: f64) -> Result<f64> {
    let ln_abs_z = libm::log(z.abs());
    let mut sum = 0.0f64;
    let mut zpow = 1.0f64;
    let mut prev = f64::INFINITY;
    for s in 0..MAX_TERMS {
        let y = alpha * s as f64 + beta;
        let coeff = binomial_f64(s, order);
        let term = if y < 170.0 && zpow.is_finite() {
            coeff * zpow * rgamma(y)
        } else {
            let (lr, sign) = ln_abs_rgamma(y);
            let odd = s % 2 == 1 && z < 0.0;
            let mag = libm::exp(ln_binomial(s, order) + s as f64 * ln_abs_z + lr);
            if odd {
                -sign * mag
            } else {
                sign * mag
            }
        };
        sum += term;
        if !sum.is_finite() {
            return Err(Error::Range {
                what: "argument",
                value: z,
            });
        }
        let mag = term.abs();
        if s > 0 && y > 1.0 && mag <= 1e-17 * sum.abs() && mag <= 0.5 * prev {
            return Ok(sum);
        }
        if mag != 0.0 {
            prev = mag;
        }
        zpow *= z;
    }
    Err(Error::Range {
        what: "argument",
        value: z,
    })
}

/// Bits needed so that the largest term's rounding error stays far below
/// the (much smaller) sum.
fn required_bits(alpha: f64, beta: f64, order: u32, x: f64) -> u32 {
    let ln_x = libm::log(x);
    let mut best = 0.0f64;
    for s in 0..MAX_TERMS {
        let y = alpha * s as f64 + beta;
        if y <= 0.0 {
            continue;
        }
        let l = ln_binomial(s, order) + s as f64 * ln_x - libm::lgamma(y);
        best = best.max(l);
        if y > 2.0 && l < best - 40.0 {
            break;
        }
    }
    let peak_bits = libm::ceil(best / core::f64::consts::LN_2) as u32;
    let decay_bits = libm::ceil(f64::from(order) * libm::log2(1.0 + x)) as u32;
    peak_bits + decay_bits + 96
}

fn series_big(alpha: f64, beta: f64, order: u32, z: f64, bits: u32) -> Result<f64> {
    let gamma = BigGamma::new(bits);
    let wp = bits + 16;
    let step = BigFloat::from_f64(alpha);
    let zb = BigFloat::from_f64(z);
    let mut y = BigFloat::from_f64(beta);
    let mut zpow = BigFloat::one();
    let mut coeff = BigInt::from(1u32);
    let mut sum = BigFloat::zero();
    let mut peak = i64::MIN;
    let mut prev = i64::MAX;
    for s in 0..MAX_TERMS {
        let y_f = y.to_f64();
        let rg = if y_f <= 0.0 {
            BigFloat::from_f64(rgamma(y_f))
        } else {
            gamma.rgamma(&y)
        };
        let term = zpow
            .mul(&rg, wp)
            .mul(&BigFloat::from_bigint(coeff.clone()), wp);
        sum = sum.add(&term, wp);
        let mag = term.magnitude();
        peak = peak.max(mag);
        if s > 0 && y_f > 1.0 && !term.is_zero() {
            let negligible = mag < sum.magnitude() - 72 || mag < peak - i64::from(wp);
            if negligible && mag < prev {
                return Ok(sum.to_f64());
            }
        }
        if !term.is_zero() {
            prev = mag;
        }
        zpow = zpow.mul(&zb, wp);
        y = y.add(&step, wp + 64);
        coeff = coeff * (s as u64 + u64::from(order)) / (s as u64 + 1);
    }
    Err(Error::Range {
        what: "argument",
        value: z,
    })
}

/// Large-|z| expansion of `E^g_{a,b}(-x)`.
fn asymptotic(alpha: f64, beta: f64, order: u32, x: f64) -> f64 {
    // Algebraic part: sum_k C(g+k-1, k) (-1)^k x^(-g-k) / Γ(b - a (g+k)),
    // truncated at its smallest term. The factor 1/Γ dips to zero near its
    // poles, so the stopping rule watches the envelope Γ(a n + 1 - b) / π
    // instead of the terms themselves.
    let ln_x = libm::log(x);
    let g = order as usize;
    let mut sum = 0.0f64;
    let mut last = f64::INFINITY;
    for k in 0..400usize {
        let n = g + k;
        let arg = beta - alpha * n as f64;
        let (lr, sign) = ln_abs_rgamma(arg);
        let ln_scale = ln_binomial(k, order) - n as f64 * ln_x;
        let ln_env = if 1.0 - arg > 0.5 {
            libm::lgamma(1.0 - arg) - libm::log(core::f64::consts::PI)
        } else {
            lr
        };
        let env = libm::exp(ln_scale + ln_env);
        if env > last {
            break;
        }
        last = env;
        if sign != 0.0 {
            let mag = libm::exp(ln_scale + lr);
            sum += if k % 2 == 1 { -sign * mag } else { sign * mag };
        }
        if env < 1e-18 * sum.abs() {
            break;
        }
    }
    if alpha > 1.0 {
        sum += saddle_contribution(alpha, beta, order, x);
    } else if alpha == 1.0 && libm::floor(beta) == beta {
        // Single real pole at s = -x; it only matters when every algebraic
        // term vanishes, as for E_{1,1}(-x) = e^(-x).
        let w = -x;
        let base = libm::pow(w, 1.0 - beta) * libm::exp(w);
        sum += match order {
            1 => base,
            _ => (w + 2.0 - beta) * base,
        };
    }
    sum
}

/// Residues at the poles `s = x^(1/a) e^(±iπ/a)` of the Laplace kernel,
/// which sit on the principal sheet only when `a > 1`.
fn saddle_contribution(alpha: f64, beta: f64, order: u32, x: f64) -> f64 {
    let theta = core::f64::consts::PI / alpha;
    let rho = libm::pow(x, 1.0 / alpha);
    let damp = libm::exp(rho * libm::cos(theta));
    let phase = rho * libm::sin(theta);
    // Re[w^c e^w] for w = rho e^{i theta}
    let re = |c: f64| libm::pow(rho, c) * damp * libm::cos(phase + c * theta);
    match order {
        1 => 2.0 / alpha * re(1.0 - beta),
        2 => 2.0 / (alpha * alpha) * (re(2.0 - beta) + (alpha - beta + 1.0) * re(1.0 - beta)),
        _ => unreachable!("caller restricts the saddle expansion to order <= 2"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    const CFG: EvalConfig = EvalConfig {
        precision_bits: None,
    };

    #[test]
    fn regimes_are_selected_by_scale() {
        let m = |a, b, z| ml_family_traced(a, b, 1, z, &CFG).unwrap().1;
        assert_eq!(m(0.5, 1.0, 0.0), Method::Exact);
        assert_eq!(m(0.5, 1.0, 3.0), Method::DoubleSeries);
        assert_eq!(m(1.0, 1.0, -1.5), Method::DoubleSeries);
        assert!(matches!(m(1.0, 1.0, -10.0), Method::BigFloatSeries { .. }));
        assert_eq!(m(1.0, 1.0, -40.0), Method::Asymptotic);
    }

    #[test]
    fn big_and_asymptotic_agree_across_the_switch() {
        // Just below and above the switching scale the two regimes must coincide.
        for &(a, b, g) in &[
            (0.5, 1.0, 1u32),
            (0.9, 1.9, 1),
            (1.0, 2.0, 2),
            (1.5, 2.5, 1),
            (1.5, 1.5, 2),
            (1.9, 2.9, 1),
            (0.5, 1.5, 2),
        ] {
            let x = libm::pow(ASYMPTOTIC_SCALE, a);
            let below = series_big(a, b, g, -x, required_bits(a, b, g, x)).unwrap();
            let above = asymptotic(a, b, g, x);
            assert!(rel(above, below) < 1e-11, "a={a} b={b} g={g}: {above} vs {below}");
        }
    }

    #[test]
    fn precision_override_changes_only_accuracy() {
        let fixed = EvalConfig {
            precision_bits: Some(400),
        };
        let a = ml_family(0.8, 1.0, 1, -9.0, &CFG).unwrap();
        let (b, method) = ml_family_traced(0.8, 1.0, 1, -9.0, &fixed).unwrap();
        assert_eq!(method, Method::BigFloatSeries { bits: 400 });
        assert!(rel(a, b) < 1e-14);
    }

    #[test]
    fn out_of_envelope_arguments_are_range_errors() {
        assert!(matches!(
            ml_family(0.5, 1.0, 1, -2e6, &CFG),
            Err(Error::Range { .. })
        ));
        // Overflow on the positive axis.
        assert!(matches!(
            ml_family(0.3, 1.0, 1, 50.0, &CFG),
            Err(Error::Range { .. })
        ));
        // Third-order saddle expansion is not implemented.
        assert!(matches!(
            ml_family(1.5, 1.0, 3, -1000.0, &CFG),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn nonpositive_beta_uses_reciprocal_gamma_continuation() {
        // E_{1,0}(z) = z e^z
        for &z in &[-0.5, 0.7, -8.0, -60.0] {
            let v = ml_family(1.0, 0.0, 1, z, &CFG).unwrap();
            assert!(rel(v, z * libm::exp(z)) < 1e-10, "z={z}");
        }
    }
}
