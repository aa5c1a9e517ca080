//! Exact confidence interval for the odds ratio.
//!
//! With `r̂` the observed sample odds ratio, the lower end is the largest `r`
//! with `G_r(r̂) >= (1+γ)/2` and the upper end the smallest `r` with
//! `F_r(r̂) <= (1-γ)/2`. Both maps are monotone in `r`, so each end is found
//! by bisection on `ln r`. An end is degenerate (0 or +∞) when the relevant
//! limit as `r → 0` or `r → ∞` never reaches its threshold; these limits are
//! known in closed form:
//!
//! * `lim_{r→0} G_r(t)` is `0` at `t = 0`, `n_A/(n_A+1)` for `0 < t <= 1` and `1` for `t > 1`;
//! * `lim_{r→∞} F_r(t)` is `0` for `t < 1`, `1/(n_A+1)` for `1 <= t < ∞` and `1` at `t = ∞`.
//!
//! Comparing them with the thresholds gives the sidedness rule
//! `n_A > 2/(1-γ) - 1`.

use alloc::format;

use crate::error::{Error, Result};
use crate::math::{floor, round, sqrt};
use crate::prob::TwoArmCounts;
use crate::support::{extended_or, DistributionSource, ExtendedOddsRatio, MemoModel};

/// Lower starting point of every bracket.
pub const BRACKET_LOW: f64 = 1e-8;

/// Number of halvings (low end) or doublings (high end) tried when the
/// starting bracket does not enclose the root.
pub const MAX_BRACKET_EXPANSIONS: u32 = 20;

/// Bisection stops once `hi / lo - 1` is below this.
pub const RELATIVE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ConfidenceLevel(f64);

impl ConfidenceLevel {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma > 0.0 && gamma < 1.0 {
            Ok(ConfidenceLevel(gamma))
        } else {
            Err(Error::InvalidLevel(gamma))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `(1 + γ) / 2`, the threshold for the lower end.
    pub fn upper_tail_target(self) -> f64 {
        (1.0 + self.0) / 2.0
    }

    /// `(1 - γ) / 2`, the threshold for the upper end.
    pub fn lower_tail_target(self) -> f64 {
        (1.0 - self.0) / 2.0
    }

    /// `2/(1-γ) - 1`, snapped to the nearest integer when it is one up to
    /// rounding (so that 0.95 gives exactly 39).
    pub fn sample_size_bound(self) -> f64 {
        let bound = 2.0 / (1.0 - self.0) - 1.0;
        let nearest = round(bound);
        if (bound - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
            nearest
        } else {
            bound
        }
    }
}

/// Shape of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sidedness {
    TwoSided,
    /// `(0, right)`.
    LeftOpenAtZero,
    /// `(left, +∞)`.
    RightOpenAtInfinity,
    /// `(0, +∞)`.
    Unbounded,
}

/// Interval for the odds ratio; `left = 0` and `right = +∞` mark degenerate ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrInterval {
    left: f64,
    right: f64,
}

impl OrInterval {
    pub fn new(left: f64, right: f64) -> Result<Self> {
        if !(left >= 0.0) || !(right > 0.0) || !(left < right) || left.is_infinite() {
            return Err(Error::Domain(format!(
                "not an odds-ratio interval: ({left}, {right})"
            )));
        }
        Ok(OrInterval { left, right })
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn sided(&self) -> Sidedness {
        match (self.left == 0.0, self.right.is_infinite()) {
            (false, false) => Sidedness::TwoSided,
            (true, false) => Sidedness::LeftOpenAtZero,
            (false, true) => Sidedness::RightOpenAtInfinity,
            (true, true) => Sidedness::Unbounded,
        }
    }

    /// `left < r < right`.
    pub fn contains(&self, r: f64) -> bool {
        self.left < r && r < self.right
    }

    /// Whether `self` lies inside `other`, allowing a relative slack on ends.
    pub fn is_within(&self, other: &OrInterval, rel: f64) -> bool {
        let left_ok = self.left >= other.left * (1.0 - rel);
        let right_ok = other.right.is_infinite() || self.right <= other.right * (1.0 + rel);
        left_ok && right_ok
    }
}

/// `n_A > 2/(1-γ) - 1`: whether intervals for group-A size `n_a` have both
/// ends non-degenerate for every `r̂` strictly between 0 and ∞.
pub fn is_two_sided(n_a: u32, level: ConfidenceLevel) -> bool {
    n_a as f64 > level.sample_size_bound()
}

/// Smallest `n_A` for which [`is_two_sided`] holds.
pub fn minimal_sample_size(level: ConfidenceLevel) -> u64 {
    floor(level.sample_size_bound()) as u64 + 1
}

/// The lower end is 0 at `r̂ = 0`, and for `0 < r̂ <= 1` when the interval is
/// one-sided.
pub(crate) fn lower_is_degenerate(or_hat: ExtendedOddsRatio, two_sided: bool) -> bool {
    or_hat.is_zero() || (or_hat <= ExtendedOddsRatio::ONE && !two_sided)
}

/// The upper end is +∞ at `r̂ = ∞`, and for `r̂ >= 1` when the interval is
/// one-sided.
pub(crate) fn upper_is_degenerate(or_hat: ExtendedOddsRatio, two_sided: bool) -> bool {
    or_hat.is_infinite() || (or_hat >= ExtendedOddsRatio::ONE && !two_sided)
}

fn bracket_high<S: DistributionSource>(source: &S) -> f64 {
    let (n_a, n_b) = (source.n_a() as f64, source.n_b() as f64);
    (2.0 * (n_a - 1.0) * (n_b - 1.0)).max(2.0)
}

/// Finds the boundary of `{r : holds(r)}` for a predicate that is true for
/// small `r` and false for large `r`.
fn bisect_boundary<F>(which: &'static str, mut holds: F, high_start: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    let mut lo = BRACKET_LOW;
    let mut k = 0;
    while !holds(lo)? {
        if k == MAX_BRACKET_EXPANSIONS {
            return Err(Error::BracketExhausted {
                which,
                lo,
                hi: high_start,
            });
        }
        lo /= 2.0;
        k += 1;
    }
    let mut hi = high_start;
    let mut k = 0;
    while holds(hi)? {
        if k == MAX_BRACKET_EXPANSIONS {
            return Err(Error::BracketExhausted { which, lo, hi });
        }
        hi *= 2.0;
        k += 1;
    }
    while hi / lo - 1.0 > RELATIVE_TOLERANCE {
        let mid = sqrt(lo * hi);
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(sqrt(lo * hi))
}

/// Lower end `r_*` for a non-degenerate case.
pub(crate) fn solve_lower<S: DistributionSource>(
    source: &S,
    or_hat: ExtendedOddsRatio,
    level: ConfidenceLevel,
) -> Result<f64> {
    let target = level.upper_tail_target();
    bisect_boundary(
        "lower",
        |r| Ok(source.distribution(r)?.cdf_strict(or_hat) >= target),
        bracket_high(source),
    )
}

/// Upper end `r^*` for a non-degenerate case.
pub(crate) fn solve_upper<S: DistributionSource>(
    source: &S,
    or_hat: ExtendedOddsRatio,
    level: ConfidenceLevel,
) -> Result<f64> {
    let target = level.lower_tail_target();
    bisect_boundary(
        "upper",
        |r| Ok(source.distribution(r)?.cdf(or_hat) > target),
        bracket_high(source),
    )
}

/// Exact interval for an observed estimator value, with the group sizes of
/// `source`.
pub fn exact_interval<S: DistributionSource>(
    source: &S,
    or_hat: ExtendedOddsRatio,
    level: ConfidenceLevel,
) -> Result<OrInterval> {
    let two_sided = is_two_sided(source.n_a(), level);
    let left = if lower_is_degenerate(or_hat, two_sided) {
        0.0
    } else {
        solve_lower(source, or_hat, level)?
    };
    let right = if upper_is_degenerate(or_hat, two_sided) {
        f64::INFINITY
    } else {
        solve_upper(source, or_hat, level)?
    };
    OrInterval::new(left, right)
}

/// Exact interval for a table, evaluating distributions through `source`.
pub fn exact_ci_with<S: DistributionSource>(
    source: &S,
    counts: &TwoArmCounts,
    level: ConfidenceLevel,
) -> Result<OrInterval> {
    if counts.n_a() != source.n_a() || counts.n_b() != source.n_b() {
        return Err(Error::InvalidCounts(format!(
            "table has sizes ({}, {}) but the model has ({}, {})",
            counts.n_a(),
            counts.n_b(),
            source.n_a(),
            source.n_b()
        )));
    }
    exact_interval(source, extended_or(counts), level)
}

/// Exact interval for a table.
pub fn exact_ci(counts: &TwoArmCounts, level: ConfidenceLevel) -> Result<OrInterval> {
    let model = MemoModel::new(counts.n_a(), counts.n_b())?;
    exact_ci_with(&model, counts, level)
}

/// `(1/right, 1/left)` with `1/∞ = 0` and `1/0 = ∞`: the interval for the
/// odds ratio of B versus A.
pub fn reciprocal_interval(interval: &OrInterval) -> OrInterval {
    let recip = |x: f64| {
        if x == 0.0 {
            f64::INFINITY
        } else if x.is_infinite() {
            0.0
        } else {
            1.0 / x
        }
    };
    OrInterval {
        left: recip(interval.right),
        right: recip(interval.left),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::Model;

    fn level(g: f64) -> ConfidenceLevel {
        ConfidenceLevel::new(g).unwrap()
    }

    #[test]
    fn level_validation() {
        assert!(ConfidenceLevel::new(0.0).is_err());
        assert!(ConfidenceLevel::new(1.0).is_err());
        assert!(ConfidenceLevel::new(f64::NAN).is_err());
        assert_eq!(level(0.95).sample_size_bound(), 39.0);
    }

    #[test]
    fn sidedness_thresholds() {
        for (g, n) in [(0.9, 20), (0.95, 40), (0.99, 200), (0.999, 2000)] {
            assert_eq!(minimal_sample_size(level(g)), n);
            assert!(is_two_sided(n as u32, level(g)));
            assert!(!is_two_sided(n as u32 - 1, level(g)));
        }
        // Non-integer bound: 2/(1-0.8) - 1 = 9.
        assert_eq!(minimal_sample_size(level(0.8)), 10);
        assert_eq!(minimal_sample_size(level(0.85)), 13);
    }

    #[test]
    fn interval_shapes() {
        assert_eq!(
            OrInterval::new(0.5, 2.0).unwrap().sided(),
            Sidedness::TwoSided
        );
        assert_eq!(
            OrInterval::new(0.0, 2.0).unwrap().sided(),
            Sidedness::LeftOpenAtZero
        );
        assert_eq!(
            OrInterval::new(0.5, f64::INFINITY).unwrap().sided(),
            Sidedness::RightOpenAtInfinity
        );
        assert_eq!(
            OrInterval::new(0.0, f64::INFINITY).unwrap().sided(),
            Sidedness::Unbounded
        );
        assert!(OrInterval::new(2.0, 1.0).is_err());
        assert!(OrInterval::new(-1.0, 1.0).is_err());
        assert!(OrInterval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn reciprocal_examples() {
        let iv = reciprocal_interval(&OrInterval::new(0.5, 2.0).unwrap());
        assert_eq!((iv.left(), iv.right()), (0.5, 2.0));
        let iv = reciprocal_interval(&OrInterval::new(0.0, 3.0).unwrap());
        assert!((iv.left() - 1.0 / 3.0).abs() < 1e-15);
        assert!(iv.right().is_infinite());
    }

    #[test]
    fn zero_estimate_has_zero_left_end() {
        let c = TwoArmCounts::new(10, 10, 0, 5).unwrap();
        let iv = exact_ci(&c, level(0.95)).unwrap();
        assert_eq!(iv.left(), 0.0);
        assert!(iv.right().is_finite());
    }

    #[test]
    fn one_sided_regime_above_one() {
        // n_A = 30 is below 40, and r̂ = (20/10)(15/25) = 1.2.
        let c = TwoArmCounts::new(30, 40, 20, 25).unwrap();
        let iv = exact_ci(&c, level(0.95)).unwrap();
        assert_eq!(iv.sided(), Sidedness::RightOpenAtInfinity);
        assert!(iv.left() > 0.0 && iv.left() < 1.2);
    }

    #[test]
    fn one_sided_regime_below_one() {
        let c = TwoArmCounts::new(8, 9, 2, 6).unwrap();
        let iv = exact_ci(&c, level(0.95)).unwrap();
        assert_eq!(iv.sided(), Sidedness::LeftOpenAtZero);
    }

    #[test]
    fn estimate_one_in_one_sided_regime_is_unbounded() {
        let c = TwoArmCounts::new(6, 6, 3, 3).unwrap();
        let iv = exact_ci(&c, level(0.9)).unwrap();
        assert_eq!(iv.sided(), Sidedness::Unbounded);
    }

    #[test]
    fn endpoints_solve_their_equations() {
        let c = TwoArmCounts::new(25, 20, 15, 6).unwrap();
        let lv = level(0.9);
        let model = MemoModel::new(25, 20).unwrap();
        let iv = exact_ci_with(&model, &c, lv).unwrap();
        assert_eq!(iv.sided(), Sidedness::TwoSided);
        let t = extended_or(&c);
        let g = model.distribution(iv.left()).unwrap().cdf_strict(t);
        let f = model.distribution(iv.right()).unwrap().cdf(t);
        assert!((g - lv.upper_tail_target()).abs() < 1e-5, "G = {g}");
        assert!((f - lv.lower_tail_target()).abs() < 1e-5, "F = {f}");
        assert!(iv.contains(t.value()));
    }

    #[test]
    fn mismatched_model_is_rejected() {
        let model = Model::new(5, 5).unwrap();
        let c = TwoArmCounts::new(5, 6, 1, 1).unwrap();
        assert!(matches!(
            exact_ci_with(&model, &c, level(0.9)),
            Err(Error::InvalidCounts(_))
        ));
    }
}
