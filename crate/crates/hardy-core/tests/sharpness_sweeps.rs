//! Near-extremal family sweeps: frozen ratio references, independent
//! window-coordinate quadrature oracles, member admissibility, configuration
//! validation, and partial-result semantics.

use hardy_core::profile::finite_diff_check;
use hardy_core::quad::QuadratureSpec;
use hardy_core::sharpness::{
    default_epsilon_grid, sweep, FamilyId, FamilyParams, SweepResult, TestFamily,
};
use hardy_core::suite::{verify_case, CaseError, TheoremId, DEFAULT_TOL_MARGIN};

fn family(id: FamilyId, p: f64, q_dim: f64) -> TestFamily {
    TestFamily::new(id, FamilyParams { p, q_dim, big_r: 1.0 }, default_epsilon_grid(id))
        .expect("valid family")
}

fn ratios(result: &SweepResult) -> Vec<f64> {
    result
        .entries
        .iter()
        .map(|e| e.ratio().unwrap_or_else(|| panic!("member ε = {} failed", e.eps)))
        .collect()
}

/// Shared assertions: complete sweep, published grid, ceiling, and frozen
/// per-ε ratios to ±2e−3 (frozen from rel-1e−10 runs; the slack absorbs
/// quadrature-tolerance drift, not construction changes).
fn check_sweep(result: &SweepResult, frozen: &[f64]) -> Vec<f64> {
    assert!(result.complete, "{}: member failures", result.family);
    let got = ratios(result);
    assert_eq!(got.len(), frozen.len());
    for (i, (&g, &f)) in got.iter().zip(frozen).enumerate() {
        assert!(
            (g - f).abs() <= 2e-3,
            "{} entry {i}: ratio {g:.16} drifted from frozen {f:.16}",
            result.family
        );
        assert!(g <= 1.0 + 1e-6, "{} entry {i}: ratio {g} above ceiling", result.family);
    }
    let max = result.max_ratio.expect("complete sweep has a max");
    assert!(max <= 1.0 + DEFAULT_TOL_MARGIN, "max ratio invariant violated: {max}");
    got
}

// ---------------------------------------------------------------------------
// Frozen sweeps per family
// ---------------------------------------------------------------------------

#[test]
fn critical_hardy_family_approaches_its_constant() {
    let spec = QuadratureSpec::default();
    let frozen: [(f64, [f64; 4]); 3] = [
        (2.0, [0.9411605366450894, 0.9506952661336412, 0.9567504465879300, 0.9616883746503676]),
        (3.0, [0.9682254772980189, 0.9743190087028242, 0.9780042439358299, 0.9809109253090449]),
        (4.0, [0.9756248869411822, 0.9806043022367164, 0.9835577005970324, 0.9858580492318106]),
    ];
    for (p, expect) in frozen {
        let fam = family(FamilyId::Lh2LogPower, p, 2.0);
        assert!((fam.constant() - p / (p - 1.0)).abs() < 1e-15);
        let result = sweep(&fam, &spec, DEFAULT_TOL_MARGIN);
        assert_eq!(result.theorem, TheoremId::Lh2);
        let got = check_sweep(&result, &expect);
        // Ratios increase as ε shrinks and the smallest-ε member clears the
        // sharpness threshold (desk-scale evidence, not a proof).
        assert!(got.windows(2).all(|w| w[1] > w[0]), "p = {p}: not increasing: {got:?}");
        assert!(got[3] >= 0.95, "p = {p}: final ratio {benchmark}", benchmark = got[3]);
        assert!(result.tail_nondecreasing);
        assert_eq!(result.final_ratio, Some(got[3]));
        assert_eq!(result.max_ratio, Some(got[3]));
    }
}

#[test]
fn critical_ball_family_approaches_its_constant() {
    let spec = QuadratureSpec::default();
    let frozen: [(f64, [f64; 4]); 2] = [
        (2.0, [0.9385791780335351, 0.9524565811104895, 0.9605811726970092, 0.9639142025295855]),
        (3.0, [0.8646190212038524, 0.8917937121058306, 0.9084915139082962, 0.9183416668494566]),
    ];
    for (q, expect) in frozen {
        let fam = family(FamilyId::CritLogLogCut, q, q);
        assert!((fam.constant() - q.powf(q)).abs() < 1e-12);
        assert_eq!(fam.params().p, q, "exponent is pinned to Q");
        let result = sweep(&fam, &spec, DEFAULT_TOL_MARGIN);
        assert_eq!(result.theorem, TheoremId::CritLog);
        let got = check_sweep(&result, &expect);
        assert!(got.windows(2).all(|w| w[1] > w[0]), "Q = {q}: not increasing: {got:?}");
        assert!(got[3] >= 0.9, "Q = {q}: final ratio {}", got[3]);
        assert!(result.tail_nondecreasing);
    }
}

#[test]
fn subcritical_family_approaches_its_constant() {
    let spec = QuadratureSpec::default();
    let frozen: [((f64, f64), [f64; 4]); 3] = [
        (
            (2.0, 4.0),
            [0.9803794089349238, 0.9949846031004442, 0.9991924381499170, 0.9997979259828362],
        ),
        (
            (2.0, 3.0),
            [0.9803794089349240, 0.9949846031004445, 0.9991924381499172, 0.9997700113171027],
        ),
        (
            (3.0, 5.5),
            [0.9509162142651392, 0.9878995315200280, 0.9981365912797144, 0.9995422853101720],
        ),
    ];
    let mut first_entries = Vec::new();
    for ((p, q), expect) in frozen {
        let fam = family(FamilyId::ClassicalPower, p, q);
        assert!((fam.constant() - p / (q - p)).abs() < 1e-15);
        assert_eq!(fam.params().big_r, 1.0, "anchor is pinned");
        let result = sweep(&fam, &spec, DEFAULT_TOL_MARGIN);
        assert_eq!(result.theorem, TheoremId::ClassicalLp);
        let got = check_sweep(&result, &expect);
        assert!(got.windows(2).all(|w| w[1] > w[0]), "(p,Q)=({p},{q}): {got:?}");
        assert!(got[3] >= 0.95, "(p,Q)=({p},{q}): final ratio {}", got[3]);
        if p == 2.0 {
            first_entries.push(got[0]);
        }
    }
    // Substituting t → γt maps the (2,3) member onto the (2,4) member while
    // the plateau length is pinned by the taper budget (larger ε), so those
    // sweeps coincide until the f64 amplitude budget starts binding.
    let dev = (first_entries[0] - first_entries[1]).abs() / first_entries[0];
    assert!(dev <= 1e-12, "reparametrization symmetry broke: {first_entries:?}");
}

#[test]
fn unit_ball_family_plateaus_below_its_constant() {
    // The window length is capped at log-depth 600 to keep every radius
    // inside f64 range, which pins all members with ε ≤ (1/600)^{1/2} to the
    // same profile. The family therefore stalls far below the constant
    // n/(n−1); the plateau values are frozen honestly rather than dressed up
    // as near-extremality. Validity (ceiling) still holds throughout.
    let spec = QuadratureSpec::default();
    let frozen: [(f64, [f64; 4]); 2] = [
        (2.0, [0.5029941288774755, 0.6286728326287820, 0.6286728326287820, 0.6286728326287820]),
        (3.0, [0.6078584395785176, 0.7279836986005328, 0.7279836986005328, 0.7279836986005328]),
    ];
    for (n, expect) in frozen {
        let fam = family(FamilyId::EtLogConc, n, n);
        assert!((fam.constant() - n / (n - 1.0)).abs() < 1e-15);
        assert_eq!(fam.params().p, n);
        assert_eq!(fam.params().big_r, 1.0);
        let result = sweep(&fam, &spec, DEFAULT_TOL_MARGIN);
        assert_eq!(result.theorem, TheoremId::EdmundsTriebel);
        let got = check_sweep(&result, &expect);
        assert_eq!(got[1], got[2], "capped members should be identical");
        assert_eq!(got[2], got[3], "capped members should be identical");
        assert!(result.tail_nondecreasing, "a flat tail counts as nondecreasing");
    }
}

#[test]
fn registry_log_profiles_reach_their_honest_ratios() {
    // The registry logpower profile spends a quarter of its log-log window
    // on each ramp, so at ε = 1e−3 it stalls around 0.72–0.79 — well short
    // of the dedicated family, whose ramp lengths are pinned in the window
    // coordinate instead of scaling with the support. Frozen honestly.
    use hardy_core::group::{GroupSpec, QuasiNormKind, QuasiNormSpec};
    use hardy_core::profile::Profile;
    use hardy_core::suite::{verify_lh2, InequalityCase};

    let eps = 1e-3;
    for (p, expect) in [(2.0, 0.7152897249967106), (3.0, 0.7909293717377701)] {
        let beta = (p - 1.0) / p;
        let group = GroupSpec::make_group(&[1.0, 1.0]).expect("valid");
        let norm = QuasiNormSpec::new(QuasiNormKind::Euclidean, &group).expect("valid");
        let case = InequalityCase {
            theorem: TheoremId::Lh2,
            group,
            norm,
            p,
            big_r: 1.0,
            profile: Profile::logpower(beta, eps, 1.0 - eps, 1.0).expect("valid"),
        };
        let res = verify_lh2(&case, &QuadratureSpec::default(), DEFAULT_TOL_MARGIN).unwrap();
        assert!(res.pass);
        assert!(
            (res.ratio - expect).abs() <= 2e-3,
            "p = {p}: ratio {:.16} drifted from frozen {expect:.16}",
            res.ratio
        );
    }
}

// ---------------------------------------------------------------------------
// Independent quadrature oracle
// ---------------------------------------------------------------------------

/// Legendre polynomial P_n and its derivative at x (three-term recurrence).
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre nodes and weights on [−1, 1] via Newton iteration.
fn gauss_rule(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..60 {
            let (p, dp) = legendre_pair(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, z);
        rule.push((z, 2.0 / ((1.0 - z * z) * dp * dp)));
    }
    rule
}

/// Composite Gauss–Legendre with Kahan summation.
fn panelled_gauss(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let rule = gauss_rule(20);
    let width = (hi - lo) / panels as f64;
    let (mut sum, mut comp) = (0.0, 0.0);
    for panel in 0..panels {
        let mid = lo + (panel as f64 + 0.5) * width;
        for &(z, w) in &rule {
            let term = w * 0.5 * width * f(mid + 0.5 * width * z);
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    sum
}

/// Composite Gauss–Legendre of `exp(ln_f)` in log space: returns the log of
/// the integral via a two-pass log-sum-exp, so integrands whose p-th powers
/// overflow f64 stay representable.
fn panelled_gauss_log(ln_f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let rule = gauss_rule(20);
    let width = (hi - lo) / panels as f64;
    let mut terms = Vec::with_capacity(panels * rule.len());
    for panel in 0..panels {
        let mid = lo + (panel as f64 + 0.5) * width;
        for &(z, w) in &rule {
            let v = ln_f(mid + 0.5 * width * z);
            if v.is_finite() {
                terms.push(v + (w * 0.5 * width).ln());
            }
        }
    }
    let peak = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - peak).exp()).sum();
    peak + sum.ln()
}

#[test]
fn independent_quadrature_confirms_swept_ratios() {
    // Each family member is re-integrated with a composite Gauss–Legendre
    // rule in the coordinate where its window is defined, using only the
    // profile's `g`/`dg` evaluations — no shared code with the adaptive
    // engine or the verifier's integrand assembly. In those coordinates the
    // densities are O(1): e.g. the critical-Hardy pair reduces to m(τ)^p and
    // |βm + m′|^p for the window m.
    let spec = QuadratureSpec::default();

    // Critical Hardy family: lhs = ∫|g|^p e^{(1−p)τ} dτ, rhs = ∫|g′r|^p e^τ dτ
    // over τ = log log(R/r).
    for (p, eps) in [(2.0, 0.1), (3.0, 0.003), (4.0, 0.01)] {
        let fam = family(FamilyId::Lh2LogPower, p, 2.0);
        let case = fam.case(eps).unwrap();
        let engine = verify_case(&case, &spec, DEFAULT_TOL_MARGIN).unwrap();
        let profile = &case.profile;
        let (a, b) = profile.support();
        let (tau_lo, tau_hi) = ((1.0 / b).ln().ln(), (1.0 / a).ln().ln());
        let lhs = panelled_gauss(
            |tau| {
                let r = (-tau.exp()).exp();
                profile.g(r).norm().powf(p) * ((1.0 - p) * tau).exp()
            },
            tau_lo,
            tau_hi,
            300,
        );
        let rhs = panelled_gauss(
            |tau| {
                let r = (-tau.exp()).exp();
                (profile.dg(r).norm() * r).powf(p) * tau.exp()
            },
            tau_lo,
            tau_hi,
            300,
        );
        let oracle = (lhs / rhs).powf(1.0 / p) * (p - 1.0) / p;
        let dev = (engine.ratio - oracle).abs() / oracle;
        assert!(dev <= 1e-7, "p = {p}, ε = {eps}: engine {} vs oracle {oracle}", engine.ratio);
    }

    // Critical ball family: lhs = ∫|g|^Q e^τ dτ, rhs = ∫|g′r|^Q e^{(Q+1)τ} dτ
    // over τ = log log(1/r).
    for (q, eps) in [(2.0, 0.1), (3.0, 0.003)] {
        let fam = family(FamilyId::CritLogLogCut, q, q);
        let case = fam.case(eps).unwrap();
        let engine = verify_case(&case, &spec, DEFAULT_TOL_MARGIN).unwrap();
        let profile = &case.profile;
        let (a, b) = profile.support();
        let (tau_lo, tau_hi) = ((1.0 / b).ln().ln(), (1.0 / a).ln().ln());
        let lhs = panelled_gauss(
            |tau| {
                let r = (-tau.exp()).exp();
                profile.g(r).norm().powf(q) * tau.exp()
            },
            tau_lo,
            tau_hi,
            300,
        );
        let rhs = panelled_gauss(
            |tau| {
                let r = (-tau.exp()).exp();
                (profile.dg(r).norm() * r).powf(q) * ((q + 1.0) * tau).exp()
            },
            tau_lo,
            tau_hi,
            300,
        );
        let oracle = (lhs / rhs).powf(1.0 / q) / q;
        let dev = (engine.ratio - oracle).abs() / oracle;
        assert!(dev <= 1e-7, "Q = {q}, ε = {eps}: engine {} vs oracle {oracle}", engine.ratio);
    }

    // Subcritical family: amplitudes reach e^{670}, so both densities are
    // integrated in log space over t = log(1/r):
    // ln lhs = p·ln|g| − (Q−p)t, ln rhs = p·ln|g′r| − (Q−p)t.
    for (p, q, eps) in [(2.0, 4.0, 0.1), (2.0, 4.0, 0.01), (3.0, 5.5, 0.01)] {
        let fam = family(FamilyId::ClassicalPower, p, q);
        let case = fam.case(eps).unwrap();
        let engine = verify_case(&case, &spec, DEFAULT_TOL_MARGIN).unwrap();
        let profile = &case.profile;
        let (a, b) = profile.support();
        let (t_lo, t_hi) = (-b.ln(), -a.ln());
        let ln_lhs = panelled_gauss_log(
            |t| {
                let g = profile.g((-t).exp()).norm();
                if g == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    p * g.ln() - (q - p) * t
                }
            },
            t_lo,
            t_hi,
            400,
        );
        let ln_rhs = panelled_gauss_log(
            |t| {
                let d = profile.dg((-t).exp()).norm();
                if d == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    p * (d.ln() - t) - (q - p) * t
                }
            },
            t_lo,
            t_hi,
            400,
        );
        let oracle = ((ln_lhs - ln_rhs) / p).exp() * (q - p) / p;
        let dev = (engine.ratio - oracle).abs() / oracle;
        assert!(
            dev <= 1e-7,
            "(p,Q)=({p},{q}), ε = {eps}: engine {} vs oracle {oracle}",
            engine.ratio
        );
    }

    // Unit-ball family: lhs = ∫|g|^n e^{(1−n)τ} dτ, rhs = ∫|g′r|^n e^τ dτ
    // over τ = log(1 + log(1/r)).
    for (n, eps) in [(2.0, 0.1), (2.0, 0.003), (3.0, 0.003)] {
        let fam = family(FamilyId::EtLogConc, n, n);
        let case = fam.case(eps).unwrap();
        let engine = verify_case(&case, &spec, DEFAULT_TOL_MARGIN).unwrap();
        let profile = &case.profile;
        let (a, b) = profile.support();
        let (tau_lo, tau_hi) = ((1.0 - b.ln()).ln(), (1.0 - a.ln()).ln());
        let lhs = panelled_gauss(
            |tau| {
                let r = (1.0 - tau.exp()).exp();
                profile.g(r).norm().powf(n) * ((1.0 - n) * tau).exp()
            },
            tau_lo,
            tau_hi,
            300,
        );
        let rhs = panelled_gauss(
            |tau| {
                let r = (1.0 - tau.exp()).exp();
                (profile.dg(r).norm() * r).powf(n) * tau.exp()
            },
            tau_lo,
            tau_hi,
            300,
        );
        let oracle = (lhs / rhs).powf(1.0 / n) * (n - 1.0) / n;
        let dev = (engine.ratio - oracle).abs() / oracle;
        assert!(dev <= 1e-7, "n = {n}, ε = {eps}: engine {} vs oracle {oracle}", engine.ratio);
    }
}

// ---------------------------------------------------------------------------
// Member admissibility
// ---------------------------------------------------------------------------

#[test]
fn family_members_are_admissible_profiles() {
    let sample_radii = [0.02, 0.05, 0.15, 0.35];
    let configs: [(FamilyId, f64, f64); 4] = [
        (FamilyId::Lh2LogPower, 3.0, 2.0),
        (FamilyId::CritLogLogCut, 2.0, 2.0),
        (FamilyId::ClassicalPower, 2.0, 4.0),
        (FamilyId::EtLogConc, 2.0, 2.0),
    ];
    for (id, p, q) in configs {
        let fam = family(id, p, q);
        for &eps in fam.epsilon_grid() {
            let profile = fam.member(eps).unwrap();
            let (a, b) = profile.support();
            assert!(a > 0.0 && a < b && b.is_finite(), "{id}: support ({a}, {b})");
            match id {
                // Ball-type members keep their support strictly inside the
                // unit ball; the critical-Hardy member stays inside (0, R).
                FamilyId::Lh2LogPower | FamilyId::CritLogLogCut | FamilyId::EtLogConc => {
                    assert!(b < 1.0, "{id}: support leaks to the anchor: b = {b}")
                }
                FamilyId::ClassicalPower => {}
            }
            // Vanishing at and beyond both support edges.
            for r in [a, b, 0.5 * a, 1.5 * b] {
                assert_eq!(profile.g(r).norm(), 0.0, "{id}, ε = {eps}: g({r}) ≠ 0");
            }
            // The analytic derivative passes a central-difference gate on
            // interior radii (all four lie inside every member's support).
            let dev = finite_diff_check(&profile, &sample_radii, 1e-7).unwrap();
            assert!(dev <= 1e-6, "{id}, ε = {eps}: fd deviation {dev:e}");
            for &r in &sample_radii {
                assert!(profile.g(r).norm().is_finite());
                assert!(profile.dg(r).norm().is_finite());
            }
        }
        assert!(fam.member(0.0).is_err());
        assert!(fam.member(0.5).is_err());
        assert!(fam.member(-0.1).is_err());
    }
}

// ---------------------------------------------------------------------------
// Configuration validation and partial results
// ---------------------------------------------------------------------------

#[test]
fn misconfigured_families_are_rejected() {
    let grid = || vec![0.1, 0.03];
    let params = |p: f64, q: f64| FamilyParams { p, q_dim: q, big_r: 1.0 };

    // Grid validation: empty, non-decreasing, out of range.
    assert!(matches!(
        TestFamily::new(FamilyId::Lh2LogPower, params(2.0, 2.0), vec![]),
        Err(CaseError::Parameter(_))
    ));
    assert!(TestFamily::new(FamilyId::Lh2LogPower, params(2.0, 2.0), vec![0.1, 0.1]).is_err());
    assert!(TestFamily::new(FamilyId::Lh2LogPower, params(2.0, 2.0), vec![0.03, 0.1]).is_err());
    assert!(TestFamily::new(FamilyId::Lh2LogPower, params(2.0, 2.0), vec![0.5, 0.1]).is_err());
    assert!(TestFamily::new(FamilyId::Lh2LogPower, params(2.0, 2.0), vec![0.1, 0.0]).is_err());

    // Theorem preconditions.
    assert!(TestFamily::new(FamilyId::Lh2LogPower, params(1.0, 2.0), grid()).is_err());
    assert!(TestFamily::new(FamilyId::Lh2LogPower, params(f64::NAN, 2.0), grid()).is_err());
    assert!(
        TestFamily::new(FamilyId::Lh2LogPower, FamilyParams { p: 2.0, q_dim: 2.0, big_r: 0.0 }, grid())
            .is_err()
    );
    assert!(TestFamily::new(FamilyId::CritLogLogCut, params(2.0, 1.0), grid()).is_err());
    assert!(
        TestFamily::new(FamilyId::CritLogLogCut, FamilyParams { p: 2.0, q_dim: 2.0, big_r: 0.5 }, grid())
            .is_err(),
        "ball members need R ≥ 1"
    );
    assert!(TestFamily::new(FamilyId::ClassicalPower, params(4.0, 4.0), grid()).is_err());
    assert!(TestFamily::new(FamilyId::ClassicalPower, params(5.0, 4.0), grid()).is_err());
    assert!(TestFamily::new(FamilyId::EtLogConc, params(2.5, 2.5), grid()).is_err());
    assert!(TestFamily::new(FamilyId::EtLogConc, params(1.0, 1.0), grid()).is_err());
    assert!(TestFamily::new(FamilyId::Lh2LogPower, params(2.0, 0.5), grid()).is_err());
}

#[test]
fn starved_quadrature_leaves_partial_results_per_member() {
    // A budget of zero subdivisions at an unreachable tolerance fails every
    // member; the sweep must record the failures per entry instead of
    // aborting, and the informational tail flag degrades without panicking.
    let mut starved = QuadratureSpec::default();
    starved.rel_tol = 1e-15;
    starved.abs_tol = f64::MIN_POSITIVE;
    starved.max_subdivisions = 0;

    let fam = family(FamilyId::Lh2LogPower, 2.0, 2.0);
    let result = sweep(&fam, &starved, DEFAULT_TOL_MARGIN);
    assert_eq!(result.entries.len(), 4);
    for (entry, &eps) in result.entries.iter().zip(fam.epsilon_grid()) {
        assert_eq!(entry.eps, eps, "entries keep grid order");
        let err = entry.outcome.as_ref().expect_err("starved member should fail");
        assert!(!err.is_empty());
    }
    assert!(!result.complete);
    assert_eq!(result.max_ratio, None);
    assert_eq!(result.final_ratio, None);
    assert!(!result.tail_nondecreasing);
}

#[test]
fn published_default_grids() {
    assert_eq!(default_epsilon_grid(FamilyId::ClassicalPower), vec![0.1, 0.05, 0.02, 0.01]);
    for id in [FamilyId::Lh2LogPower, FamilyId::CritLogLogCut, FamilyId::EtLogConc] {
        assert_eq!(default_epsilon_grid(id), vec![0.1, 0.03, 0.01, 0.003]);
    }
}
