//! Special functions: Γ, the two-parameter Mittag-Leffler function, the
//! bivariate Mittag-Leffler-type series `E_1` and the fractional
//! differentiation identities they satisfy.

mod bivariate;
mod gamma;
mod mittag_leffler;

pub use bivariate::{bivariate_ml, bivariate_ml_derivative, bivariate_ml_double_sum, BivariateMlSpec};
pub use gamma::{gamma, ln_abs_rgamma, rgamma};
pub use mittag_leffler::{
    ml_family, ml_family_traced, EvalConfig, Method, ASYMPTOTIC_SCALE, DOUBLE_SCALE, MAX_ARGUMENT,
};

use crate::error::{check, Result};

/// Arguments of `E_{alpha,beta}(z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MlArgs {
    pub alpha: f64,
    pub beta: f64,
    pub z: f64,
}

impl MlArgs {
    pub fn new(alpha: f64, beta: f64, z: f64) -> Result<Self> {
        let args = MlArgs { alpha, beta, z };
        args.validate()?;
        Ok(args)
    }

    pub fn validate(&self) -> Result<()> {
        check(self.alpha > 0.0 && self.alpha.is_finite(), "alpha", self.alpha)?;
        check(self.beta > 0.0 && self.beta.is_finite(), "beta", self.beta)?;
        check(self.z.is_finite(), "z", self.z)
    }
}

/// `E_{alpha,beta}(z) = sum_k z^k / Γ(alpha k + beta)`.
pub fn mittag_leffler(args: &MlArgs) -> Result<f64> {
    mittag_leffler_with(args, &EvalConfig::default())
}

pub fn mittag_leffler_with(args: &MlArgs, cfg: &EvalConfig) -> Result<f64> {
    args.validate()?;
    ml_family(args.alpha, args.beta, 1, args.z, cfg)
}

/// `E_{alpha,beta}(z)` with the parameter `beta` allowed to be any real;
/// needed after derivative shifts such as `E_{1,0}`.
pub fn mittag_leffler_ext(alpha: f64, beta: f64, z: f64, cfg: &EvalConfig) -> Result<f64> {
    ml_family(alpha, beta, 1, z, cfg)
}

/// k-th derivative in `z`: `E^{(k)}_{a,b}(z) = k! sum_s C(s+k, k) z^s / Γ(a s + a k + b)`.
pub fn ml_kth_derivative(alpha: f64, beta: f64, k: u32, z: f64, cfg: &EvalConfig) -> Result<f64> {
    let factorial: f64 = (1..=k).map(f64::from).product();
    Ok(factorial * ml_family(alpha, alpha * f64::from(k) + beta, k + 1, z, cfg)?)
}

/// Right-hand side of the Riemann-Liouville differentiation rule
///
/// ```text
/// D^gamma [ t^(a k + b - 1) E^{(k)}_{a,b}(lambda t^a) ] = t^(a k + b - gamma - 1) E^{(k)}_{a,b-gamma}(lambda t^a)
/// ```
///
/// With `gamma_ord = 0` this is the undifferentiated expression itself.
pub fn ml_derivative_power(
    alpha: f64,
    beta: f64,
    gamma_ord: f64,
    lambda: f64,
    t: f64,
    k_ord: u32,
    cfg: &EvalConfig,
) -> Result<f64> {
    check(alpha > 0.0 && alpha.is_finite(), "alpha", alpha)?;
    check(beta > 0.0 && beta.is_finite(), "beta", beta)?;
    check(gamma_ord >= 0.0 && gamma_ord.is_finite(), "gamma_ord", gamma_ord)?;
    check(lambda.is_finite(), "lambda", lambda)?;
    check(t > 0.0 && t.is_finite(), "t", t)?;
    let power = alpha * f64::from(k_ord) + beta - gamma_ord - 1.0;
    let z = lambda * libm::pow(t, alpha);
    Ok(libm::pow(t, power) * ml_kth_derivative(alpha, beta - gamma_ord, k_ord, z, cfg)?)
}
