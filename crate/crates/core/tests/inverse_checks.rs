use fracmix_core::error::Error;
use fracmix_core::inverse::*;
use fracmix_core::modes::{ModeIndex, ProblemParameters};
use fracmix_core::scan::find_degenerate_q;
use fracmix_core::specfun::{gamma, EvalConfig};
use proptest::prelude::*;

const CFG: EvalConfig = EvalConfig {
    precision_bits: None,
};

fn params(alpha: f64, beta: f64, p: f64, q: f64) -> ProblemParameters {
    ProblemParameters::new(alpha, beta, p, q).unwrap()
}

fn k(k: u32) -> ModeIndex {
    ModeIndex::new(k).unwrap()
}

// values from an independent multiprecision evaluation, see tests/oracle/generate.py
#[test]
fn determinant_oracle_values() {
    let cases = [
        ((0.5, 1.5, 1.0, 1.0), 1, 0.014867616635191504992),
        ((1.0, 2.0, 1.0, 1.0), 1, -0.02533029591058444268),
        ((0.5, 1.5, 0.5, 0.2), 2, 0.0051134297632248327519),
        ((0.7, 1.2, 1.3, 0.4), 3, 0.0023014050404298875303),
    ];
    for ((a, b, p, q), m, want) in cases {
        let got = delta_k(&params(a, b, p, q), k(m), &CFG).unwrap();
        assert!((got - want).abs() <= 1e-10 * want.abs(), "{got} vs {want}");
    }
    let d0 = delta0(&params(0.5, 1.5, 1.0, 1.0)).unwrap();
    assert!((d0 - 0.62387361096816247537).abs() < 1e-14);
}

#[test]
fn classical_orders() {
    assert_eq!(delta0(&params(1.0, 2.0, 1.0, 1.0)).unwrap(), 0.5);
    let sys = assemble_zero_system(&params(1.0, 2.0, 1.0, 1.0)).unwrap();
    assert_eq!(sys.matrix, [[1.0, 1.5], [1.0, 1.0]]);
    assert_eq!(sys.determinant(), -0.5);
    let report = classify(&params(1.0, 2.0, 1.0, 1.0), 8, 1e-9, &CFG).unwrap();
    assert!(report.verdict.is_unique());
    for (i, d) in report.deltas.iter().enumerate() {
        let lam = (2.0 * (i + 1) as f64 * std::f64::consts::PI).powi(2);
        let want = -(1.0 - (-lam).exp()) / lam;
        assert!((d - want).abs() < 1e-12, "k = {}: {d} vs {want}", i + 1);
    }
    let report = classify(&params(1.0, 2.0, 1.0, 1.5), 8, 1e-9, &CFG).unwrap();
    assert_eq!(report.verdict.name(), "degenerate_zero_mode");
}

#[test]
fn tolerance_monotone_classification() {
    let pr = params(0.5, 1.5, 1.0, 1.0);
    let report = classify(&pr, 5, 10.0, &CFG).unwrap();
    assert_eq!(report.verdict, Verdict::DegenerateZeroMode { modes: vec![1, 2, 3, 4, 5] });
}

#[test]
fn nontrivial_zero_limits() {
    let pr = params(0.6, 1.7, 0.9, 1.0);
    let qa = gamma(1.6).unwrap() * (0.9 + 0.9f64.powf(1.7) / gamma(2.7).unwrap());
    let pr = params(pr.alpha, pr.beta, pr.p, qa.powf(1.0 / 0.6));
    let sol = build_nontrivial_zero(&pr, 0.8, None).unwrap();
    // jump at t = 0 is f0 Δ0
    let jump = sol.u(0.5, 0.0).unwrap() - sol.u(0.5, -1e-300).unwrap();
    assert!(jump.abs() < 1e-14);
    let (upper, lower) = sol.field.zero_modes();
    assert!((upper.caputo(0.0, &CFG).unwrap() - 0.8).abs() < 1e-14);
    assert!((lower.d_dtau(0.0, &CFG).unwrap() - 0.8).abs() < 1e-14);
}

#[test]
fn pure_cos_mode_when_w2_slope_vanishes() {
    let root = find_degenerate_q(1.0, 2.0, 1.02, 1, (1e-3, 0.2), &CFG).unwrap();
    let pr = params(1.0, 2.0, 1.02, root.value);
    let sol = build_nontrivial_mode(&pr, 1, 0.4, 0.0, None, &CFG).unwrap();
    for t in [-0.7, -0.2, 0.0, 0.01, root.value] {
        let (_, _, x_sin) = sol.time_coefficients(t).unwrap();
        assert_eq!(x_sin, 0.0);
    }
    assert!(matches!(
        build_nontrivial_mode(&params(1.0, 2.0, 1.0, 1.0), 1, 1.0, 0.0, None, &CFG),
        Err(Error::Precondition { .. })
    ));
}

#[test]
fn x_sin_mode_top_condition() {
    // V2m(q) = 0 by cancellation whatever W2m'(0)
    let root = find_degenerate_q(1.0, 2.0, 1.02, 1, (1e-3, 0.2), &CFG).unwrap();
    let pr = params(1.0, 2.0, 1.02, root.value);
    let sol = build_nontrivial_mode(&pr, 1, 0.0, 1.0, None, &CFG).unwrap();
    let (_, _, v2) = sol.time_coefficients(pr.q).unwrap();
    assert!(v2.abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn determinant_consistency(
        alpha in 0.1f64..=1.0,
        beta in 1.01f64..=2.0,
        p in 0.01f64..=3.0,
        q in 0.01f64..=3.0,
        m in 1u32..=16,
    ) {
        let pr = params(alpha, beta, p, q);
        let d0 = delta0(&pr).unwrap();
        let zero = assemble_zero_system(&pr).unwrap();
        let scale = zero.matrix[0][1].abs().max(zero.matrix[1][1].abs());
        prop_assert!((zero.determinant() + d0).abs() <= 1e-12 * scale);
        let dk = delta_k(&pr, k(m), &CFG).unwrap();
        let sys = assemble_mode_system(&pr, k(m), &CFG).unwrap();
        let scale = sys.a.abs().max(sys.b.abs());
        prop_assert!((determinant(sys.w2_block()) + dk).abs() <= 1e-12 * scale);
        prop_assert!((determinant(sys.w1_block()) + dk).abs() <= 1e-12 * scale);
    }

    #[test]
    fn unique_means_trivial(
        alpha in 0.1f64..=1.0,
        beta in 1.01f64..=2.0,
        p in 0.01f64..=3.0,
        q in 0.01f64..=3.0,
        m in 1u32..=16,
    ) {
        let pr = params(alpha, beta, p, q);
        let dk = delta_k(&pr, k(m), &CFG).unwrap();
        let d0 = delta0(&pr).unwrap();
        prop_assume!(d0.abs() > 1e-6 && dk.abs() > 1e-6);
        let zero = assemble_zero_system(&pr).unwrap().solve_homogeneous().unwrap();
        prop_assert!(zero.iter().all(|v| v.abs() <= 1e-10));
        let modes = assemble_mode_system(&pr, k(m), &CFG).unwrap().solve_homogeneous().unwrap();
        prop_assert!(modes.iter().all(|v| v.abs() <= 1e-10));
    }

    #[test]
    fn zero_mode_construction_is_linear(
        p in 0.05f64..=2.0,
        f0 in -3.0f64..3.0,
        c in -4.0f64..4.0,
        x in 0.0f64..=1.0,
        s in 0.0f64..=1.0,
    ) {
        prop_assume!(f0.abs() > 1e-3 && c.abs() > 1e-3);
        let pr = params(1.0, 2.0, p, p + p * p / 2.0);
        let t = -p + s * (pr.p + pr.q);
        let one = build_nontrivial_zero(&pr, f0, None).unwrap();
        let scaled = build_nontrivial_zero(&pr, c * f0, None).unwrap();
        let (a, b) = (one.u(x, t).unwrap(), scaled.u(x, t).unwrap());
        prop_assert!((b - c * a).abs() <= 1e-13 * (1.0 + b.abs()));
        prop_assert_eq!(scaled.f(x).unwrap(), c * f0);
    }
}

#[test]
fn no_mode_root_at_unit_lower_height() {
    // A(p=1) = 0.0398 exceeds B(q) for every q since B increases to 1/lam = 0.0253
    let r = find_degenerate_q(0.5, 1.5, 1.0, 1, (0.01, 5.0), &CFG);
    assert!(matches!(r, Err(Error::NoSignChange { .. })), "{r:?}");
    let d = delta_k(&params(0.5, 1.5, 1.0, 0.01), k(1), &CFG).unwrap();
    assert!((d - 0.0180192770611).abs() < 1e-11);
}
