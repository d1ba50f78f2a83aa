//! Closed-form oracles for the radial quadrature engine, an independent
//! high-order cross-check, and the engine's honesty, removable-singularity
//! and log-substitution guarantees.

use hardy_core::profile::Profile;
use hardy_core::quad::{
    integrate_radial, lp_norm, EndpointTransform, QuadError, QuadratureSpec,
};
use hardy_core::suite::{difference_integral, DEFAULT_SINGULARITY_WINDOW};
use hardy_core::C64;

// ---------------------------------------------------------------------------
// Independent reference rule (no shared code with the engine's G7–K15)
// ---------------------------------------------------------------------------

/// Legendre polynomial value and derivative via the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre nodes and weights on [−1, 1], Newton-refined.
fn gauss_nodes(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            for _ in 0..60 {
                let (p, dp) = legendre_pair(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_pair(n, x);
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite Gauss–Legendre with Kahan summation, far above the engine's
/// 15-point rule in order so it serves as an independent oracle.
fn panelled_gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, order: usize, panels: usize) -> f64 {
    let nodes = gauss_nodes(order);
    let width = (b - a) / panels as f64;
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * width;
        for &(x, w) in &nodes {
            let term = 0.5 * width * w * f(mid + 0.5 * width * x);
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    sum
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

#[test]
fn monomial_weights_integrate_to_one_over_q() {
    let spec = QuadratureSpec::default();
    for q in [2.0, 3.5, 4.0] {
        let res = integrate_radial(|r| r.powf(q - 1.0), 0.0, 1.0, &spec).unwrap();
        assert!(
            (res.value - 1.0 / q).abs() <= 1e-12,
            "∫₀¹ r^{{Q−1}} dr at Q = {q}: got {}",
            res.value
        );
        assert!(res.error_estimate >= 0.0);
        assert!(res.error_estimate <= (1e-10 * res.value.abs()).max(1e-14) * (1.0 + 1e-12));
    }
}

#[test]
fn singular_log_weight_matches_its_antiderivative() {
    // ∫₀^{1/2} dr/(r log²(1/r)) = [1/log(1/r)]₀^{1/2} = 1/log 2.  In
    // t = log(1/r) the integrand density is exactly t^{−2}, so the improper
    // endpoint is finished through the declared tail exponent 2.
    let spec = QuadratureSpec::default()
        .with_transform(EndpointTransform::LogAtZero { tail_exponent: Some(2.0) });
    let f = |r: f64| {
        let t = r.recip().ln();
        (r * t * t).recip()
    };
    let res = integrate_radial(f, 0.0, 0.5, &spec).unwrap();
    let oracle = 2.0_f64.ln().recip();
    assert!(
        ((res.value - oracle) / oracle).abs() <= 1e-9,
        "got {}, want 1/log 2 = {oracle}",
        res.value
    );
}

#[test]
fn centred_parabola_with_linear_weight_gives_one_sixth() {
    let res = integrate_radial(
        |r| (1.0 - 2.0 * r).powi(2) * r,
        0.0,
        1.0,
        &QuadratureSpec::default(),
    )
    .unwrap();
    assert!((res.value - 1.0 / 6.0).abs() <= 1e-12, "got {}", res.value);
}

// ---------------------------------------------------------------------------
// Lp norms
// ---------------------------------------------------------------------------

#[test]
fn unit_profile_l2_norm_with_polar_weight() {
    // φ ≡ 1 under the measure r^{Q−1} dr with Q = 2, p = 2: the weight folds
    // into the integrand as r^{(Q−1)/p} = r^{1/2}, and the norm is (1/2)^{1/2}.
    let spec = QuadratureSpec::default();
    let (norm, inner) = lp_norm(|r| C64::new(r.sqrt(), 0.0), 2.0, 0.0, 1.0, &spec).unwrap();
    assert!((norm - 0.5_f64.sqrt()).abs() <= 1e-12, "got {norm}");
    assert!(inner.error_estimate >= 0.0);
}

#[test]
fn reciprocal_profile_l1_norm_is_log_two() {
    let spec = QuadratureSpec::default();
    let (norm, _) = lp_norm(|r| C64::new(r.recip(), 0.0), 1.0, 1.0, 2.0, &spec).unwrap();
    assert!((norm - 2.0_f64.ln()).abs() <= 1e-12, "got {norm}");
}

#[test]
fn bump_cubed_norm_matches_an_independent_high_order_rule() {
    // |bump|³ integrates to ≈ 3e−16 (the bump peaks at e^{−1/0.09} ≈ 1.5e−5),
    // far below the default absolute floor of 1e−14, so the oracle run drops
    // the floor to make the relative tolerance bind.
    let bump = Profile::bump(0.2, 0.8).expect("valid");
    let spec = QuadratureSpec::default().with_tols(1e-12, 1e-30);
    let (norm, _) = lp_norm(|r| bump.g(r), 3.0, 0.0, 1.0, &spec).unwrap();

    let oracle_integral = panelled_gauss(|r| bump.g(r).norm().powi(3), 0.2, 0.8, 40, 16);
    let oracle = oracle_integral.cbrt();
    assert!(
        ((norm - oracle) / oracle).abs() <= 1e-10,
        "engine {norm} vs order-40 reference {oracle}"
    );
}

#[test]
fn lp_norm_rejects_exponents_below_one() {
    let spec = QuadratureSpec::default();
    for p in [0.5, 0.0, -1.0, f64::NAN] {
        assert!(lp_norm(|r| C64::new(r, 0.0), p, 0.0, 1.0, &spec).is_err(), "p = {p}");
    }
}

// ---------------------------------------------------------------------------
// Engine invariants
// ---------------------------------------------------------------------------

#[test]
fn error_estimates_stay_honest_as_tolerances_tighten() {
    // For every registry integrand and a ladder of shrinking tolerances, the
    // deviation from a trusted reference value must stay within the estimate
    // the engine reports at that tolerance, and the estimate itself must meet
    // the requested tolerance.
    let bump = Profile::bump(0.2, 0.8).expect("valid");
    let bump_ref = panelled_gauss(|r| bump.g(r).norm().powi(3), 0.2, 0.8, 40, 16);
    let log_weight_ref = 2.0_f64.ln().recip() - 1e6_f64.ln().recip();

    type Case = (&'static str, Box<dyn Fn(f64) -> f64>, f64, f64, f64, EndpointTransform);
    let registry: Vec<Case> = vec![
        ("cubic", Box::new(|r: f64| r * r * r), 0.0, 1.0, 0.25, EndpointTransform::None),
        (
            "parabola",
            Box::new(|r: f64| (1.0 - 2.0 * r).powi(2) * r),
            0.0,
            1.0,
            1.0 / 6.0,
            EndpointTransform::None,
        ),
        (
            "fractional power",
            Box::new(|r: f64| r.powf(2.5)),
            0.0,
            1.0,
            1.0 / 3.5,
            EndpointTransform::None,
        ),
        (
            "bump cubed",
            Box::new(move |r: f64| bump.g(r).norm().powi(3)),
            0.2,
            0.8,
            bump_ref,
            EndpointTransform::None,
        ),
        (
            "log weight",
            Box::new(|r: f64| {
                let t = r.recip().ln();
                (r * t * t).recip()
            }),
            1e-6,
            0.5,
            log_weight_ref,
            EndpointTransform::LogAtZero { tail_exponent: None },
        ),
    ];

    for (name, f, lo, hi, reference, transform) in &registry {
        for rel_tol in [1e-6, 5e-7, 1e-8, 5e-9, 1e-10, 5e-11] {
            let spec = QuadratureSpec::default()
                .with_transform(*transform)
                .with_tols(rel_tol, 1e-16);
            let res = integrate_radial(f, *lo, *hi, &spec).unwrap();
            let deviation = (res.value - reference).abs();
            assert!(
                deviation <= res.error_estimate + 1e-13 * reference.abs(),
                "{name} at rel_tol {rel_tol}: deviation {deviation:e} \
                 exceeds estimate {:e}",
                res.error_estimate
            );
            assert!(res.error_estimate >= 0.0);
            assert!(
                res.error_estimate <= (rel_tol * res.value.abs()).max(1e-16) * (1.0 + 1e-12),
                "{name} at rel_tol {rel_tol}: estimate {:e} misses the tolerance",
                res.error_estimate
            );
        }
    }
}

#[test]
fn removable_singularity_window_is_insensitive_to_halving() {
    // Difference-type integrals patch |g−g_R|^p/(r|log(R/r)|^p) with its
    // analytic limit |g′(R)·R|^p inside a window of half-width 1e−6 in
    // s = log(R/r).  Halving the window must not move the value.
    let spec = QuadratureSpec::default();
    let profiles =
        [Profile::bump(0.2, 0.8).expect("valid"), Profile::polybump(0.1, 0.9, 2).expect("valid")];
    for profile in &profiles {
        for big_r in [0.4, 0.6] {
            for p in [2.0, 3.0] {
                let base =
                    difference_integral(profile, big_r, p, DEFAULT_SINGULARITY_WINDOW, &spec)
                        .unwrap();
                let halved =
                    difference_integral(profile, big_r, p, DEFAULT_SINGULARITY_WINDOW / 2.0, &spec)
                        .unwrap();
                let shift = ((base.value - halved.value) / base.value).abs();
                assert!(
                    shift < 1e-9,
                    "{} at R = {big_r}, p = {p}: window halving moved the value by {shift:e}",
                    profile.name()
                );
            }
        }
    }
}

#[test]
fn log_substitution_reduces_subdivision_counts() {
    // Integrands whose mass is spread logarithmically defeat direct
    // bisection; the exact change of variables t = log(1/r) flattens them.
    let log_weight = |r: f64| {
        let t = r.recip().ln();
        (r * t * t).recip()
    };
    let plain = QuadratureSpec::default();
    let substituted =
        plain.with_transform(EndpointTransform::LogAtZero { tail_exponent: None });

    for (name, f, lo, hi) in [
        ("log weight", &log_weight as &dyn Fn(f64) -> f64, 1e-8, 0.5),
        ("near-critical power", &|r: f64| r.powf(-0.9), 1e-10, 1.0),
    ] {
        let direct = integrate_radial(f, lo, hi, &plain).unwrap();
        let logged = integrate_radial(f, lo, hi, &substituted).unwrap();
        assert!(
            ((direct.value - logged.value) / logged.value).abs() <= 1e-8,
            "{name}: {} vs {}",
            direct.value,
            logged.value
        );
        assert!(
            direct.subdivisions_used >= 2 * logged.subdivisions_used.max(1),
            "{name}: direct used {} subdivisions, substituted {}",
            direct.subdivisions_used,
            logged.subdivisions_used
        );
    }
}

// ---------------------------------------------------------------------------
// Failure modes
// ---------------------------------------------------------------------------

#[test]
fn exhausted_budgets_report_the_partial_value() {
    let cramped = QuadratureSpec { max_subdivisions: 3, ..QuadratureSpec::default() };
    let err = integrate_radial(|r| (r - 0.333).abs().powf(-0.5), 0.0, 1.0, &cramped).unwrap_err();
    match err {
        QuadError::NotConverged { partial, error_estimate, subdivisions } => {
            // True value 2(√0.333 + √0.667) ≈ 2.787; the partial value must
            // be in its vicinity and the estimate must admit the shortfall.
            assert!(partial.is_finite() && partial > 1.0 && partial < 4.0, "partial {partial}");
            assert!(error_estimate > 0.0);
            assert!(subdivisions <= 3);
        }
        other => panic!("expected NotConverged, got {other:?}"),
    }
}

#[test]
fn non_finite_integrand_values_are_located() {
    let err = integrate_radial(
        |r| if r > 0.5 { f64::NAN } else { 1.0 },
        0.0,
        1.0,
        &QuadratureSpec::default(),
    )
    .unwrap_err();
    match err {
        // The location is the offending segment's representative point.
        QuadError::NonFinite { r } => assert!((0.0..=1.0).contains(&r), "reported r = {r}"),
        other => panic!("expected NonFinite, got {other:?}"),
    }
}

#[test]
fn improper_endpoints_demand_declared_tails() {
    let plain = QuadratureSpec::default();
    assert!(matches!(
        integrate_radial(|r| (-r).exp(), 0.0, f64::INFINITY, &plain),
        Err(QuadError::ImproperEndpoint(_))
    ));

    let undeclared = plain.with_transform(EndpointTransform::LogAtZero { tail_exponent: None });
    assert!(matches!(
        integrate_radial(|r| r, 0.0, 1.0, &undeclared),
        Err(QuadError::ImproperEndpoint(_))
    ));

    // A tail exponent of 1 makes ∫ σ^{−e} dσ divergent.
    let divergent =
        plain.with_transform(EndpointTransform::LogAtZero { tail_exponent: Some(1.0) });
    let f = |r: f64| (r * r.recip().ln()).recip();
    assert!(matches!(integrate_radial(f, 0.0, 0.5, &divergent), Err(QuadError::BadTail { .. })));

    // Declaring exponent 3 for a genuinely t^{−2} tail is caught at the cut.
    let wrong = plain.with_transform(EndpointTransform::LogAtZero { tail_exponent: Some(3.0) });
    let g = |r: f64| {
        let t = r.recip().ln();
        (r * t * t).recip()
    };
    assert!(matches!(integrate_radial(g, 0.0, 0.5, &wrong), Err(QuadError::TailMismatch { .. })));
}

#[test]
fn malformed_intervals_are_rejected() {
    let spec = QuadratureSpec::default();
    for (lo, hi) in [(1.0, 0.5), (-1.0, 1.0), (f64::NAN, 1.0), (0.0, f64::NAN)] {
        assert!(
            matches!(integrate_radial(|r| r, lo, hi, &spec), Err(QuadError::BadInterval { .. })),
            "interval [{lo}, {hi}] was accepted"
        );
    }
    // Degenerate interval integrates to exactly zero.
    let res = integrate_radial(|r| r, 0.7, 0.7, &spec).unwrap();
    assert_eq!(res.value, 0.0);
    assert_eq!(res.subdivisions_used, 0);
}
