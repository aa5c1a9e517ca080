use approx::assert_relative_eq;
use proptest::prelude::*;

use oddsci_core::{
    binomial_pmf, coverage_exact_at, exact_ci, exact_ci_with, extended_or, is_two_sided,
    minimal_sample_size, normal_quantile, outcome_prob, outcome_prob_hypergeom,
    reciprocal_interval, ConfidenceLevel, ExtendedOddsRatio, MemoModel, Model, OrInterval,
    Sidedness, TwoArmCounts,
};

fn table() -> impl Strategy<Value = TwoArmCounts> {
    (1u32..=15, 1u32..=15)
        .prop_flat_map(|(na, nb)| (Just(na), Just(nb), 0..=na, 0..=nb))
        .prop_map(|(na, nb, a, b)| TwoArmCounts::new(na, nb, a, b).unwrap())
}

fn odds_ratio() -> impl Strategy<Value = f64> {
    (-4.0f64..4.0).prop_map(f64::exp)
}

proptest! {
    #[test]
    fn binomial_pmf_sums_to_one(n in 0u32..200, p in 0.0f64..=1.0) {
        let total: f64 = (0..=n).map(|k| binomial_pmf(k, n, p).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12, "{}", total);
    }

    #[test]
    fn estimator_is_reciprocal_under_swap(c in table()) {
        prop_assert_eq!(extended_or(&c.swapped()), extended_or(&c).recip());
    }

    #[test]
    fn quantile_is_antisymmetric(d in 1e-12f64..0.5) {
        let lo = normal_quantile(d).unwrap();
        let hi = normal_quantile(1.0 - d).unwrap();
        // 1 - d rounds, so compare through the quantile's slope.
        prop_assert!((lo + hi).abs() < 1e-9 * (1.0 + lo.abs()), "{} {}", lo, hi);
        prop_assert!(lo < 0.0);
    }

    #[test]
    fn quadrature_and_closed_form_agree(c in table(), r in odds_ratio()) {
        let q = outcome_prob(r, &c).unwrap();
        let h = outcome_prob_hypergeom(r, &c).unwrap();
        prop_assert!((q - h).abs() < 1e-9, "{} vs {}", q, h);
    }

    #[test]
    fn reciprocal_interval_is_an_involution(left in 0.0f64..5.0, width in 1e-3f64..50.0, open in any::<bool>()) {
        let right = if open { f64::INFINITY } else { left + width };
        let iv = OrInterval::new(left, right).unwrap();
        let back = reciprocal_interval(&reciprocal_interval(&iv));
        prop_assert_eq!(back.sided(), iv.sided());
        if left > 0.0 {
            assert_relative_eq!(back.left(), left, max_relative = 1e-15);
        }
        if right.is_finite() {
            assert_relative_eq!(back.right(), right, max_relative = 1e-15);
        }
    }

    #[test]
    fn cdf_is_non_increasing_in_r(na in 1u32..=8, nb in 1u32..=8, r1 in odds_ratio(), k in 1.01f64..5.0) {
        let m = Model::new(na, nb).unwrap();
        let (lo, hi) = (m.compute(r1).unwrap(), m.compute(r1 * k).unwrap());
        for t in m.support() {
            prop_assert!(hi.cdf(*t) <= lo.cdf(*t) + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_coverage_reaches_the_level(na in 1u32..=7, nb in 1u32..=7, r in odds_ratio(), g in 0.8f64..0.99) {
        let lv = ConfidenceLevel::new(g).unwrap();
        let cov = coverage_exact_at(&Model::new(na, nb).unwrap(), r, lv).unwrap();
        prop_assert!(cov >= g - 1e-6, "coverage {} below {}", cov, g);
    }
}

#[test]
fn normalization_over_a_grid() {
    for na in [1, 4, 9, 15] {
        for nb in [1, 5, 12] {
            let m = Model::new(na, nb).unwrap();
            for r in [1e-3, 0.3, 1.0, 7.0, 1e3] {
                let total = m.compute(r).unwrap().total();
                assert!((total - 1.0).abs() < 1e-9, "({na}, {nb}, {r}): {total}");
            }
        }
    }
}

#[test]
fn narrower_level_nests_inside_wider() {
    let (lo, hi) = (
        ConfidenceLevel::new(0.9).unwrap(),
        ConfidenceLevel::new(0.95).unwrap(),
    );
    let m = MemoModel::new(45, 50).unwrap();
    for (a, b) in [(3, 20), (20, 25), (40, 12), (0, 7), (45, 3)] {
        let c = TwoArmCounts::new(45, 50, a, b).unwrap();
        let narrow = exact_ci_with(&m, &c, lo).unwrap();
        let wide = exact_ci_with(&m, &c, hi).unwrap();
        assert!(
            narrow.is_within(&wide, 1e-6),
            "{c:?}: {narrow:?} not in {wide:?}"
        );
    }
}

#[test]
fn shape_flips_at_the_minimal_size() {
    let lv = ConfidenceLevel::new(0.9).unwrap();
    let n = minimal_sample_size(lv) as u32;
    assert_eq!(n, 20);
    assert!(!is_two_sided(n - 1, lv) && is_two_sided(n, lv));
    // One success in A, half in B: 0 < OR̂ < 1.
    let below = exact_ci(&TwoArmCounts::new(n - 1, 6, 1, 3).unwrap(), lv).unwrap();
    let at = exact_ci(&TwoArmCounts::new(n, 6, 1, 3).unwrap(), lv).unwrap();
    assert_eq!(below.sided(), Sidedness::LeftOpenAtZero);
    assert_eq!(at.sided(), Sidedness::TwoSided);
    // OR̂ > 1 mirrors it.
    let below = exact_ci(&TwoArmCounts::new(n - 1, 6, n - 2, 3).unwrap(), lv).unwrap();
    assert_eq!(below.sided(), Sidedness::RightOpenAtInfinity);
}

#[test]
fn boundary_tables_give_degenerate_ends() {
    let lv = ConfidenceLevel::new(0.95).unwrap();
    let zero = TwoArmCounts::new(45, 8, 0, 4).unwrap();
    assert_eq!(extended_or(&zero), ExtendedOddsRatio::Zero);
    let iv = exact_ci(&zero, lv).unwrap();
    assert_eq!(iv.left(), 0.0);
    assert!(iv.right().is_finite());
    let inf = TwoArmCounts::new(45, 8, 45, 4).unwrap();
    let iv = exact_ci(&inf, lv).unwrap();
    assert!(iv.right().is_infinite() && iv.left() > 0.0);
}
