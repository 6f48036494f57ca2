//! Reference values computed independently with mpmath (direct series
//! summation at 400-digit working precision, see `oracle/generate.py`).

use fracmix_core::specfun::{gamma, ml_family, EvalConfig};

const CFG: EvalConfig = EvalConfig {
    precision_bits: None,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn gamma_reference() {
    assert!(rel(gamma(2.5).unwrap(), 1.329_340_388_179_137_020_5) < 1e-15);
}

const ML: &[(f64, f64, f64, f64)] = &[
    (0.8, 1.0, -2.0, 0.18979669236370564843),
    (0.5, 1.0, -0.5, 0.61569034419292587487),
    (0.5, 1.0, -3.0, 0.17900115118138995042),
    (0.5, 1.5, -6.0, 0.15120390536657694094),
    (0.5, 1.5, -20.0, 0.048591282562947434034),
    (0.7, 1.3, -15.0, 0.045122384718874450406),
    (0.9, 1.9, -40.0, 0.024931413757555195988),
    (0.9, 1.9, -1000.0, 0.00099989471164056784015),
    (1.5, 1.0, -30.0, -0.014470224834105874553),
    (1.5, 2.5, -200.0, 0.0050070501212396848863),
    (1.5, 2.5, -400.0, 0.0025017629479701754368),
    (1.9, 1.9, -500.0, 0.0058571672493801741945),
    (1.3, 2.3, -300.0, 0.0033359173683005065053),
    (1.7, 1.0, -100.0, -0.0080180226327738006802),
    (2.0, 3.0, -1000.0, 0.000021317303440107721723),
    (0.3, 1.3, -2.0, 0.35488388691606233071),
    (0.6, 1.6, 3.0, 284.61687042160342977),
    (1.5, 1.5, 20.0, 389.17064910603575476),
    (0.5, 0.5, -10.0, 0.0027796561095304283729),
    (1.2, 2.2, -50.0, 0.020071913653904663377),
    // asymptotic regime with 1/Γ vanishing at some term indices
    (0.4, 1.0, -24.3897999750275076, 0.02715495030487227),
    (0.4, 1.4, -24.3897999750275076, 0.039887373028528928),
];

#[test]
fn mittag_leffler_reference() {
    for &(a, b, z, want) in ML {
        let got = ml_family(a, b, 1, z, &CFG).unwrap();
        let tol = if z.abs() <= 50.0 { 1e-10 } else { 1e-8 };
        assert!(rel(got, want) < tol, "E_({a},{b})({z}) = {got}, want {want}");
    }
}

/// `sum_s (s+1) z^s / Γ(a s + d)`.
const COLLAPSED: &[(f64, f64, f64, f64)] = &[
    (0.5, 1.5, -1.0, 0.27321201478389856507),
    (0.5, 1.5, -5.0, 0.021332789764826310194),
    (0.8, 2.6, -5.0, 0.034739002178265284916),
    (1.5, 2.5, -50.0, -0.00018887404374848727633),
    (1.5, 4.0, -400.0, 6.2588140183378313472e-6),
    (0.9, 1.9, -300.0, 1.1809873537436539522e-6),
    (1.0, 2.0, -1.0, 0.3678794411714423216),
    (2.0, 3.0, -900.0, -0.016467193734881029833),
    (1.8, 1.8, -1000.0, -0.00019502678005293380983),
    (0.5, 2.0, -30.0, 0.0010693656098037319183),
    (0.4, 1.0, -24.3897999750275076, 0.0003875730898191193),
    (0.4, 1.4, -24.3897999750275076, 0.0010974824411212893),
    (0.4, 1.8, -24.3897999750275076, 0.0015904144612552892),
];

#[test]
fn second_order_family_reference() {
    for &(a, d, z, want) in COLLAPSED {
        let got = ml_family(a, d, 2, z, &CFG).unwrap();
        let tol = if z.abs() <= 50.0 { 1e-10 } else { 1e-8 };
        assert!(rel(got, want) < tol, "E2_({a},{d})({z}) = {got}, want {want}");
    }
}
