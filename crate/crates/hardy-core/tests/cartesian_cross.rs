//! Cross-validation of the full-dimensional box pipeline against the
//! reduced radial pipeline, plus the box-integrator oracles.
//!
//! For a radial function `f(x) = g(|x|)` on isotropic `ℝⁿ`, every norm in
//! the verified statements factors through the sphere:
//! `‖·‖ⁿ-dim = ω^{1/p}·‖·‖reduced` with `ω = |S^{n−1}|`. The two pipelines
//! share no integration code — tensor Gauss (or Monte Carlo) over a box on
//! one side, adaptive 1-D quadrature in logarithmic coordinates on the
//! other — so agreement pins the radial reduction itself.

use hardy_core::cartesian::{
    dilation_scaling_check, integrate_box, radial_component_samples, unit_sphere_measure,
    verify_ckn_fullgrad, verify_lh2_fullgrad, BoxDomain, BoxIntegrand, BoxMethod,
    CartesianTestFunction, DEFAULT_TENSOR_ORDER,
};
use hardy_core::group::{GroupSpec, QuasiNormKind, QuasiNormSpec};
use hardy_core::profile::Profile;
use hardy_core::quad::QuadratureSpec;
use hardy_core::suite::{verify_crit_log_hardy, verify_lh2, InequalityCase, TheoremId};

const TENSOR: BoxMethod = BoxMethod::TensorGauss { order: DEFAULT_TENSOR_ORDER };

fn isotropic_case(theorem: TheoremId, n: usize, p: f64, big_r: f64, profile: Profile) -> InequalityCase {
    let group = GroupSpec::make_group(&vec![1.0; n]).unwrap();
    let norm = QuasiNormSpec::new(QuasiNormKind::Euclidean, &group).unwrap();
    InequalityCase { theorem, group, norm, p, big_r, profile }
}

/// Relative agreement within `max(1e−4, 3σ)`, the combined statistical
/// error entering as σ.
fn assert_cross_agreement(label: &str, box_value: f64, radial_value: f64, sigma: f64) {
    let scale = box_value.abs().max(radial_value.abs());
    let tol = (1e-4 * scale).max(3.0 * sigma);
    assert!(
        (box_value - radial_value).abs() <= tol,
        "{label}: box pipeline {box_value} vs radial pipeline {radial_value} \
         (allowed {tol}, σ = {sigma})"
    );
}

/// 1σ error of a quotient `num/den` from the errors of its parts.
fn quotient_sigma(num: f64, err_num: f64, den: f64, err_den: f64) -> f64 {
    if num == 0.0 || den == 0.0 {
        return 0.0;
    }
    (num / den).abs() * (err_num / num.abs() + err_den / den.abs())
}

#[test]
fn radial_lh2_norms_agree_across_pipelines_for_p2_and_p3() {
    let profile = Profile::bump(0.2, 0.8).unwrap();
    let n = 2usize;
    let big_r = 4.0;
    let omega = unit_sphere_measure(n).unwrap();
    let spec = QuadratureSpec::default();

    for p in [2.0, 3.0] {
        let f = CartesianTestFunction::Radial { profile: profile.clone() };
        let chain = verify_lh2_fullgrad(&f, p, n, big_r, &TENSOR, 1e-6).unwrap();
        assert!(chain.pass(), "chain failed: {chain:?}");
        // Radial functions have no angular gradient: the two right-hand
        // sides must coincide to quadrature accuracy.
        assert!(
            (chain.mid - chain.rhs).abs() <= 1e-8 * chain.rhs,
            "p = {p}: mid {} vs rhs {}",
            chain.mid,
            chain.rhs
        );

        let case = isotropic_case(TheoremId::Lh2, n, p, big_r, profile.clone());
        let radial = verify_lh2(&case, &spec, 1e-6).unwrap();
        let fold = omega.powf(1.0 / p);
        assert_cross_agreement(
            &format!("LH2 lhs, p = {p}"),
            chain.lhs / fold,
            radial.lhs,
            chain.err_lhs / fold + radial.err_lhs,
        );
        assert_cross_agreement(
            &format!("LH2 rhs, p = {p}"),
            chain.rhs / fold,
            radial.rhs,
            chain.err_rhs / fold + radial.err_rhs,
        );
        // The ratio inherits both norms' errors; compose them.
        let sigma_ratio = quotient_sigma(chain.lhs, chain.err_lhs, chain.mid, chain.err_mid)
            + quotient_sigma(radial.lhs, radial.err_lhs, radial.rhs, radial.err_rhs);
        assert_cross_agreement(
            &format!("LH2 ratio, p = {p}"),
            chain.ratio_lhs_mid(),
            radial.ratio,
            sigma_ratio,
        );
    }
}

#[test]
fn radial_ckn_matches_the_radial_critical_log_verifier() {
    let profile = Profile::bump(0.1, 0.5).unwrap();
    let n = 2usize;
    let omega = unit_sphere_measure(n).unwrap();

    let f = CartesianTestFunction::Radial { profile: profile.clone() };
    let chain = verify_ckn_fullgrad(&f, n, &TENSOR, 1e-6).unwrap();
    assert!(chain.pass(), "chain failed: {chain:?}");

    let case = isotropic_case(TheoremId::CritLog, n, n as f64, 1.0, profile);
    let radial = verify_crit_log_hardy(&case, &QuadratureSpec::default(), 1e-6).unwrap();

    let fold = omega.powf(1.0 / n as f64);
    assert_cross_agreement(
        "CKN lhs",
        chain.lhs / fold,
        radial.lhs,
        chain.err_lhs / fold + radial.err_lhs,
    );
    assert_cross_agreement(
        "CKN rhs",
        chain.rhs / fold,
        radial.rhs,
        chain.err_rhs / fold + radial.err_rhs,
    );
    let sigma_ratio = quotient_sigma(chain.lhs, chain.err_lhs, chain.mid, chain.err_mid)
        + quotient_sigma(radial.lhs, radial.err_lhs, radial.rhs, radial.err_rhs);
    assert_cross_agreement("CKN ratio", chain.ratio_lhs_mid(), radial.ratio, sigma_ratio);
}

#[test]
fn radial_agreement_extends_to_n3_by_monte_carlo() {
    let profile = Profile::bump(0.2, 0.8).unwrap();
    let n = 3usize;
    let p = 2.0;
    let big_r = 4.0;
    let omega = unit_sphere_measure(n).unwrap();
    let mc = BoxMethod::MonteCarlo { samples: 2_000_000, seed: 42 };

    let f = CartesianTestFunction::Radial { profile: profile.clone() };
    let chain = verify_lh2_fullgrad(&f, p, n, big_r, &mc, 1e-6).unwrap();
    assert!(chain.pass(), "chain failed: {chain:?}");

    let case = isotropic_case(TheoremId::Lh2, n, p, big_r, profile);
    let radial = verify_lh2(&case, &QuadratureSpec::default(), 1e-6).unwrap();

    let fold = omega.powf(1.0 / p);
    assert_cross_agreement(
        "LH2 n=3 lhs",
        chain.lhs / fold,
        radial.lhs,
        chain.err_lhs / fold + radial.err_lhs,
    );
    assert_cross_agreement(
        "LH2 n=3 rhs",
        chain.rhs / fold,
        radial.rhs,
        chain.err_rhs / fold + radial.err_rhs,
    );
}

#[test]
fn angular_lh2_chain_holds_within_monte_carlo_three_sigma() {
    // Non-radial test function: the radial-direction norm is genuinely
    // smaller than the full-gradient norm, so both chain steps carry
    // information.
    let f = CartesianTestFunction::parse("bump-angular").unwrap();
    let mc = BoxMethod::MonteCarlo { samples: 10_000_000, seed: 42 };
    let chain = verify_lh2_fullgrad(&f, 2.0, 2, 4.0, &mc, 1e-6).unwrap();
    assert!(chain.pass(), "chain failed: {chain:?}");
    assert!(
        chain.mid + 3.0 * (chain.err_mid + chain.err_rhs) < chain.rhs,
        "angular slack should exceed 3σ: mid {} rhs {}",
        chain.mid,
        chain.rhs
    );
}

#[test]
fn angular_ckn_chain_holds_within_monte_carlo_three_sigma() {
    let f = CartesianTestFunction::Angular { profile: Profile::bump(0.2, 0.8).unwrap() };
    let mc = BoxMethod::MonteCarlo { samples: 4_000_000, seed: 42 };
    let chain = verify_ckn_fullgrad(&f, 2, &mc, 1e-6).unwrap();
    assert!(chain.pass(), "chain failed: {chain:?}");
    assert!(chain.lhs > 0.0);
}

#[test]
fn gaussian_box_integral_matches_pi_to_1e8() {
    let g = |x: &[f64]| (-(x[0] * x[0] + x[1] * x[1])).exp();
    let domain = BoxDomain::centred_cube(2, 6.0).unwrap();
    let r = integrate_box(&BoxIntegrand::smooth(&g), &domain, &TENSOR).unwrap();
    assert!(
        (r.value - std::f64::consts::PI).abs() < 1e-8,
        "got {} (error estimate {})",
        r.value,
        r.error_estimate
    );
}

#[test]
fn isotropic_dilation_scales_volume_by_lambda_to_minus_q() {
    let g = |x: &[f64]| (-x.iter().map(|v| v * v).sum::<f64>()).exp();
    let domain = BoxDomain::centred_cube(2, 6.0).unwrap();
    let check =
        dilation_scaling_check(&BoxIntegrand::smooth(&g), &domain, 2.0, &TENSOR).unwrap();
    assert!(
        (check.ratio - 0.25).abs() < 1e-6,
        "λ = 2 in n = 2 should scale by 2^−2, got {}",
        check.ratio
    );
}

#[test]
fn pointwise_radial_component_bound_holds_on_1e5_samples() {
    for f in [
        CartesianTestFunction::Angular { profile: Profile::bump(0.2, 0.8).unwrap() },
        CartesianTestFunction::Angular { profile: Profile::polybump(0.1, 0.9, 2).unwrap() },
        CartesianTestFunction::Radial { profile: Profile::powerlaw(-0.5, 0.2, 2.0).unwrap() },
    ] {
        let report = radial_component_samples(&f, 2, 100_000, 42).unwrap();
        assert_eq!(
            report.violations, 0,
            "{}: {} violations, max relative excess {}",
            f.name(),
            report.violations,
            report.max_relative_excess
        );
    }
}

#[test]
fn monte_carlo_value_is_independent_of_thread_partitioning() {
    let g = |x: &[f64]| (x[0] * x[1]).cos() + x[0].powi(2);
    let domain = BoxDomain::centred_cube(2, 2.0).unwrap();
    let mc = BoxMethod::MonteCarlo { samples: 500_000, seed: 9 };

    let wide = integrate_box(&BoxIntegrand::smooth(&g), &domain, &mc).unwrap();
    let narrow = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| integrate_box(&BoxIntegrand::smooth(&g), &domain, &mc).unwrap());
    assert_eq!(wide.value.to_bits(), narrow.value.to_bits());
    assert_eq!(wide.error_estimate.to_bits(), narrow.error_estimate.to_bits());
}
