//! Property tests for the dilation structures and quasi-norms.
//!
//! The three defining axioms of a homogeneous quasi-norm — symmetry under
//! inversion, degree-one homogeneity under the group dilation, and
//! vanishing only at the origin — are checked on randomised inputs for
//! every supported norm kind, alongside the closed-form examples.

use hardy_core::group::{GroupError, GroupSpec, QuasiNormKind, QuasiNormSpec};
use proptest::prelude::*;

fn coordinate() -> impl Strategy<Value = f64> {
    prop_oneof![
        // Moderate coordinates, both signs.
        -10.0..10.0f64,
        // Wide dynamic range, both signs.
        (-30.0..30.0f64).prop_map(|e| e.signum() * 2f64.powf(e.abs())),
    ]
}

fn lambda() -> impl Strategy<Value = f64> {
    (-6.0..6.0f64).prop_map(|e| 2f64.powf(e))
}

/// The four battery group/norm pairings, one per quasi-norm kind.
fn norm_kinds() -> Vec<(GroupSpec, QuasiNormSpec)> {
    let iso2 = GroupSpec::make_group(&[1.0, 1.0]).unwrap();
    let aniso3 = GroupSpec::make_group(&[1.0, 1.0, 1.0]).unwrap();
    let heis = GroupSpec::make_group(&[1.0, 1.0, 2.0]).unwrap();
    let aniso = GroupSpec::make_group(&[1.0, 2.0, 2.5]).unwrap();
    vec![
        (iso2.clone(), QuasiNormSpec::new(QuasiNormKind::Euclidean, &iso2).unwrap()),
        (aniso3.clone(), QuasiNormSpec::new(QuasiNormKind::WeightedMax, &aniso3).unwrap()),
        (heis.clone(), QuasiNormSpec::new(QuasiNormKind::Koranyi, &heis).unwrap()),
        (aniso.clone(), QuasiNormSpec::new(QuasiNormKind::WeightedPower(2.0), &aniso).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// |D_λ x| = λ·|x| to 1e−12 relative, for every norm kind.
    #[test]
    fn quasi_norms_are_one_homogeneous(
        x in prop::collection::vec(coordinate(), 3),
        lam in lambda(),
    ) {
        for (group, norm) in norm_kinds() {
            let x = &x[..group.n()];
            let scaled = group.dilate(lam, x).unwrap();
            let direct = norm.quasi_norm(&group, &scaled).unwrap();
            let expected = lam * norm.quasi_norm(&group, x).unwrap();
            prop_assert!(
                (direct - expected).abs() <= 1e-12 * expected.abs(),
                "{:?}: |D_λ x| = {direct} vs λ|x| = {expected}",
                norm.kind()
            );
        }
    }

    /// |x⁻¹| = |x| (inversion is coordinate negation in exponential
    /// coordinates, which every supported kind absorbs exactly).
    #[test]
    fn quasi_norms_are_symmetric_under_inversion(
        x in prop::collection::vec(coordinate(), 3),
    ) {
        for (group, norm) in norm_kinds() {
            let x = &x[..group.n()];
            let inv = group.inverse(x).unwrap();
            let a = norm.quasi_norm(&group, x).unwrap();
            let b = norm.quasi_norm(&group, &inv).unwrap();
            prop_assert_eq!(a, b, "{:?}", norm.kind());
        }
    }

    /// |x| > 0 away from the origin, |0| = 0.
    #[test]
    fn quasi_norms_vanish_only_at_the_origin(
        x in prop::collection::vec(coordinate(), 3),
    ) {
        for (group, norm) in norm_kinds() {
            let x = &x[..group.n()];
            let v = norm.quasi_norm(&group, x).unwrap();
            if x.iter().any(|&c| c != 0.0) {
                prop_assert!(v > 0.0, "{:?} vanished at {x:?}", norm.kind());
            }
            let zero = vec![0.0; group.n()];
            prop_assert_eq!(norm.quasi_norm(&group, &zero).unwrap(), 0.0);
        }
    }

    /// D₁ is the identity and D_{1/λ}∘D_λ recovers the point to machine
    /// precision.
    #[test]
    fn dilations_compose_and_invert(
        x in prop::collection::vec(coordinate(), 3),
        lam in lambda(),
    ) {
        let group = GroupSpec::make_group(&[1.0, 2.0, 2.5]).unwrap();
        let identity = group.dilate(1.0, &x).unwrap();
        prop_assert_eq!(&identity, &x);

        let there = group.dilate(lam, &x).unwrap();
        let back = group.dilate(1.0 / lam, &there).unwrap();
        for (orig, round) in x.iter().zip(&back) {
            prop_assert!(
                (orig - round).abs() <= 1e-12 * orig.abs().max(1e-300),
                "round trip {x:?} -> {back:?}"
            );
        }
    }
}

#[test]
fn homogeneous_dimension_is_the_weight_sum() {
    assert_eq!(GroupSpec::make_group(&[1.0, 1.0]).unwrap().q(), 2.0);
    assert_eq!(GroupSpec::make_group(&[1.0, 1.0, 2.0]).unwrap().q(), 4.0);
    for n in 1..=8usize {
        let group = GroupSpec::make_group(&vec![1.0; n]).unwrap();
        assert_eq!(group.q(), n as f64, "isotropic weights of length {n}");
        assert_eq!(group.n(), n);
    }
}

#[test]
fn dilation_is_the_componentwise_power_law() {
    let group = GroupSpec::make_group(&[1.0, 1.0, 2.0]).unwrap();
    let y = group.dilate(2.0, &[1.0, 1.0, 1.0]).unwrap();
    assert_eq!(y, vec![2.0, 2.0, 4.0]);
}

#[test]
fn quasi_norm_closed_forms() {
    let iso = GroupSpec::make_group(&[1.0, 1.0]).unwrap();
    let euclid = QuasiNormSpec::new(QuasiNormKind::Euclidean, &iso).unwrap();
    assert!((euclid.quasi_norm(&iso, &[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-15);

    let heis = GroupSpec::make_group(&[1.0, 1.0, 2.0]).unwrap();
    let wmax = QuasiNormSpec::new(QuasiNormKind::WeightedMax, &heis).unwrap();
    assert!((wmax.quasi_norm(&heis, &[0.0, 0.0, 4.0]).unwrap() - 2.0).abs() < 1e-15);

    let koranyi = QuasiNormSpec::new(QuasiNormKind::Koranyi, &heis).unwrap();
    assert!((koranyi.quasi_norm(&heis, &[1.0, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn invalid_groups_and_pairings_are_rejected() {
    assert!(matches!(GroupSpec::make_group(&[]), Err(GroupError::InvalidWeights(_))));
    assert!(matches!(GroupSpec::make_group(&[1.0, 0.0]), Err(GroupError::InvalidWeights(_))));
    assert!(matches!(GroupSpec::make_group(&[1.0, -2.0]), Err(GroupError::InvalidWeights(_))));

    let heis = GroupSpec::make_group(&[1.0, 1.0, 2.0]).unwrap();
    // Euclidean needs isotropic weights.
    assert!(matches!(
        QuasiNormSpec::new(QuasiNormKind::Euclidean, &heis),
        Err(GroupError::IncompatibleNorm(_))
    ));
    // Korányi needs exactly the (1, 1, 2) pattern.
    let iso3 = GroupSpec::make_group(&[1.0, 1.0, 1.0]).unwrap();
    assert!(matches!(
        QuasiNormSpec::new(QuasiNormKind::Koranyi, &iso3),
        Err(GroupError::IncompatibleNorm(_))
    ));
    // Weighted-power needs 2N ≥ every weight.
    let tall = GroupSpec::make_group(&[1.0, 5.0]).unwrap();
    assert!(matches!(
        QuasiNormSpec::new(QuasiNormKind::WeightedPower(2.0), &tall),
        Err(GroupError::IncompatibleNorm(_))
    ));

    // Dimension mismatch and bad dilation parameter.
    assert!(matches!(
        heis.dilate(2.0, &[1.0, 2.0]),
        Err(GroupError::DimensionMismatch { expected: 3, got: 2 })
    ));
    assert!(matches!(heis.dilate(0.0, &[1.0, 2.0, 3.0]), Err(GroupError::BadDilation(_))));
    assert!(matches!(heis.dilate(f64::NAN, &[1.0, 2.0, 3.0]), Err(GroupError::BadDilation(_))));
}
