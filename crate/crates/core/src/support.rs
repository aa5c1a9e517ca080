//! Sample space of the extended odds-ratio estimator and its distribution
//! under a fixed true odds ratio.
//!
//! Finite estimator values are kept as exact integer ratios so that ties
//! between tables are detected exactly; this is what separates the
//! non-strict CDF `F_r(t) = P(OR̂ <= t)` from the strict one
//! `G_r(t) = P(OR̂ < t)`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::math::{exp, ln, ln_choose, softplus};
use crate::prob::{check_odds_ratio, logit_breakpoints, TwoArmCounts, OUTCOME_ABS_TOL};
use crate::quadrature::{integrate_vec, Tolerance};

/// Value of the sample odds ratio on `[0, +∞]`.
#[derive(Debug, Clone, Copy)]
pub enum ExtendedOddsRatio {
    Zero,
    /// `num / den` with both parts positive.
    Finite {
        num: u64,
        den: u64,
    },
    Infinite,
}

impl ExtendedOddsRatio {
    pub const ONE: ExtendedOddsRatio = ExtendedOddsRatio::Finite { num: 1, den: 1 };

    /// `num / den` for non-negative integers, not both zero.
    pub fn ratio(num: u64, den: u64) -> Result<Self> {
        match (num, den) {
            (0, 0) => Err(Error::Domain("0/0 is not an odds ratio".into())),
            (0, _) => Ok(ExtendedOddsRatio::Zero),
            (_, 0) => Ok(ExtendedOddsRatio::Infinite),
            (num, den) => Ok(ExtendedOddsRatio::Finite { num, den }),
        }
    }

    pub fn value(self) -> f64 {
        match self {
            ExtendedOddsRatio::Zero => 0.0,
            ExtendedOddsRatio::Finite { num, den } => num as f64 / den as f64,
            ExtendedOddsRatio::Infinite => f64::INFINITY,
        }
    }

    pub fn recip(self) -> Self {
        match self {
            ExtendedOddsRatio::Zero => ExtendedOddsRatio::Infinite,
            ExtendedOddsRatio::Finite { num, den } => {
                ExtendedOddsRatio::Finite { num: den, den: num }
            }
            ExtendedOddsRatio::Infinite => ExtendedOddsRatio::Zero,
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, ExtendedOddsRatio::Zero)
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedOddsRatio::Infinite)
    }

    fn rank(self) -> u8 {
        match self {
            ExtendedOddsRatio::Zero => 0,
            ExtendedOddsRatio::Finite { .. } => 1,
            ExtendedOddsRatio::Infinite => 2,
        }
    }
}

impl Ord for ExtendedOddsRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        match (*self, *other) {
            (
                ExtendedOddsRatio::Finite { num: a, den: b },
                ExtendedOddsRatio::Finite { num: c, den: d },
            ) => (a as u128 * d as u128).cmp(&(c as u128 * b as u128)),
            (x, y) => x.rank().cmp(&y.rank()),
        }
    }
}

impl PartialOrd for ExtendedOddsRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for ExtendedOddsRatio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtendedOddsRatio {}

impl fmt::Display for ExtendedOddsRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedOddsRatio::Infinite => f.write_str("Inf"),
            other => match f.precision() {
                Some(p) => write!(f, "{:.*}", p, other.value()),
                None => write!(f, "{}", other.value()),
            },
        }
    }
}

/// Sample odds ratio of a table, with the boundary conventions
///
/// * `1` for the corners `(0, 0)` and `(n_A, n_B)`,
/// * `0` for `(0, b >= 1)` and `(a >= 1, n_B)`,
/// * `+∞` for `(n_A, b >= 1)` and `(a <= n_A - 1, 0)`,
///
/// and `a (n_B - b) / ((n_A - a) b)` otherwise. The one table left over by
/// these rules, `(n_A, 0)`, has a positive numerator over a zero denominator
/// and is `+∞`.
pub fn extended_or(counts: &TwoArmCounts) -> ExtendedOddsRatio {
    let (n_a, n_b) = (counts.n_a(), counts.n_b());
    let (a, b) = (counts.n_a1(), counts.n_b1());
    if (a == 0 && b == 0) || (a == n_a && b == n_b) {
        return ExtendedOddsRatio::ONE;
    }
    if (a == 0 && b >= 1) || (a >= 1 && b == n_b) {
        return ExtendedOddsRatio::Zero;
    }
    if (a == n_a && b >= 1) || b == 0 {
        return ExtendedOddsRatio::Infinite;
    }
    ExtendedOddsRatio::Finite {
        num: a as u64 * (n_b - b) as u64,
        den: (n_a - a) as u64 * b as u64,
    }
}

/// Tables sorted by estimator value, grouped into atoms.
#[derive(Debug)]
struct SupportLayout {
    n_a: u32,
    n_b: u32,
    /// Sorted entries: table and its estimator value.
    entries: Vec<(TwoArmCounts, ExtendedOddsRatio)>,
    /// For each sorted entry, its index in A-major order.
    natural: Vec<usize>,
    atoms: Vec<ExtendedOddsRatio>,
    /// `atom_start[i]..atom_start[i + 1]` are the entries of atom `i`.
    atom_start: Vec<usize>,
}

impl SupportLayout {
    fn new(n_a: u32, n_b: u32) -> Self {
        let mut tagged: Vec<(usize, TwoArmCounts, ExtendedOddsRatio)> =
            TwoArmCounts::all_outcomes(n_a, n_b)
                .enumerate()
                .map(|(i, c)| (i, c, extended_or(&c)))
                .collect();
        tagged.sort_by(|x, y| x.2.cmp(&y.2).then(x.0.cmp(&y.0)));

        let mut atoms = Vec::new();
        let mut atom_start = Vec::new();
        for (i, t) in tagged.iter().enumerate() {
            if atoms.last() != Some(&t.2) {
                atoms.push(t.2);
                atom_start.push(i);
            }
        }
        atom_start.push(tagged.len());
        SupportLayout {
            n_a,
            n_b,
            natural: tagged.iter().map(|t| t.0).collect(),
            entries: tagged.iter().map(|t| (t.1, t.2)).collect(),
            atoms,
            atom_start,
        }
    }
}

/// One table with its estimator value and probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub counts: TwoArmCounts,
    pub or_hat: ExtendedOddsRatio,
    pub prob: f64,
}

/// Distribution of the sample odds ratio at a fixed true odds ratio `r`:
/// every table with its probability, sorted by estimator value, plus the
/// aggregated atoms and their cumulative sums.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    r: f64,
    layout: Arc<SupportLayout>,
    probs: Vec<f64>,
    atom_mass: Vec<f64>,
    /// `cumulative[i]` is the mass of atoms `0..i`.
    cumulative: Vec<f64>,
    quadrature_error: f64,
}

impl OutcomeDistribution {
    fn from_sorted(
        r: f64,
        layout: Arc<SupportLayout>,
        probs: Vec<f64>,
        quadrature_error: f64,
    ) -> Self {
        let atom_mass: Vec<f64> = layout
            .atom_start
            .windows(2)
            .map(|w| probs[w[0]..w[1]].iter().sum())
            .collect();
        let mut cumulative = Vec::with_capacity(atom_mass.len() + 1);
        let mut acc = 0.0;
        cumulative.push(acc);
        for m in &atom_mass {
            acc += m;
            cumulative.push(acc);
        }
        OutcomeDistribution {
            r,
            layout,
            probs,
            atom_mass,
            cumulative,
            quadrature_error,
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn n_a(&self) -> u32 {
        self.layout.n_a
    }
    pub fn n_b(&self) -> u32 {
        self.layout.n_b
    }

    /// Summed error estimate reported by the quadrature (max-norm over tables).
    pub fn quadrature_error(&self) -> f64 {
        self.quadrature_error
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// All tables in increasing order of the estimator.
    pub fn entries(&self) -> impl Iterator<Item = Entry> + '_ {
        self.layout
            .entries
            .iter()
            .zip(&self.probs)
            .map(|(&(counts, or_hat), &prob)| Entry {
                counts,
                or_hat,
                prob,
            })
    }

    /// Distinct estimator values with their probability mass, increasing.
    pub fn support(&self) -> impl Iterator<Item = (ExtendedOddsRatio, f64)> + '_ {
        self.layout
            .atoms
            .iter()
            .copied()
            .zip(self.atom_mass.iter().copied())
    }

    pub fn support_len(&self) -> usize {
        self.layout.atoms.len()
    }

    /// Probability of one particular table.
    pub fn prob_of(&self, counts: &TwoArmCounts) -> Option<f64> {
        if counts.n_a() != self.n_a() || counts.n_b() != self.n_b() {
            return None;
        }
        let natural = counts.n_a1() as usize * (self.n_b() as usize + 1) + counts.n_b1() as usize;
        self.layout
            .natural
            .iter()
            .position(|&i| i == natural)
            .map(|pos| self.probs[pos])
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }

    /// `F_r(t) = P(OR̂ <= t)`.
    pub fn cdf(&self, t: ExtendedOddsRatio) -> f64 {
        self.cumulative[self.layout.atoms.partition_point(|x| *x <= t)]
    }

    /// `G_r(t) = P(OR̂ < t)`.
    pub fn cdf_strict(&self, t: ExtendedOddsRatio) -> f64 {
        self.cumulative[self.layout.atoms.partition_point(|x| *x < t)]
    }

    /// `P(OR̂ = t)`.
    pub fn mass_at(&self, t: ExtendedOddsRatio) -> f64 {
        match self.layout.atoms.binary_search(&t) {
            Ok(i) => self.atom_mass[i],
            Err(_) => 0.0,
        }
    }

    /// `F_r` and `G_r` at every support point, in support order.
    pub fn cdf_table(&self) -> impl Iterator<Item = (ExtendedOddsRatio, f64, f64)> + '_ {
        self.layout
            .atoms
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, self.cumulative[i + 1], self.cumulative[i]))
    }
}

/// Anything that can produce the distribution of the estimator for fixed
/// group sizes at a given odds ratio.
pub trait DistributionSource {
    fn n_a(&self) -> u32;
    fn n_b(&self) -> u32;
    fn distribution(&self, r: f64) -> Result<Arc<OutcomeDistribution>>;
}

impl<S: DistributionSource + ?Sized> DistributionSource for &S {
    fn n_a(&self) -> u32 {
        (**self).n_a()
    }
    fn n_b(&self) -> u32 {
        (**self).n_b()
    }
    fn distribution(&self, r: f64) -> Result<Arc<OutcomeDistribution>> {
        (**self).distribution(r)
    }
}

/// Uncached distribution engine for fixed group sizes.
///
/// All `(n_A + 1)(n_B + 1)` outcome integrals are computed together by one
/// vector-valued adaptive quadrature that shares its abscissae.
#[derive(Debug, Clone)]
pub struct Model {
    layout: Arc<SupportLayout>,
    ln_coef_a: Vec<f64>,
    ln_coef_b: Vec<f64>,
}

impl Model {
    pub fn new(n_a: u32, n_b: u32) -> Result<Self> {
        TwoArmCounts::new(n_a, n_b, 0, 0)?;
        Ok(Model {
            layout: Arc::new(SupportLayout::new(n_a, n_b)),
            ln_coef_a: (0..=n_a).map(|k| ln_choose(n_a as u64, k as u64)).collect(),
            ln_coef_b: (0..=n_b).map(|k| ln_choose(n_b as u64, k as u64)).collect(),
        })
    }

    pub fn compute(&self, r: f64) -> Result<OutcomeDistribution> {
        check_odds_ratio(r)?;
        let (n_a, n_b) = (self.layout.n_a, self.layout.n_b);
        let width_b = n_b as usize + 1;
        let dim = (n_a as usize + 1) * width_b;
        let ln_r = ln(r);
        let mut fa = vec![0.0; n_a as usize + 1];
        let mut fb = vec![0.0; width_b];

        let integrand = |s: f64, out: &mut [f64]| {
            let ln_p = -softplus(-s);
            let ln_1mp = -softplus(s);
            let shifted = s - ln_r;
            let ln_q = -softplus(-shifted);
            let ln_1mq = -softplus(shifted);
            for (a, (v, c)) in fa.iter_mut().zip(&self.ln_coef_a).enumerate() {
                // Jacobian p(1 - p) folded into the A factor.
                *v = exp(c + (a + 1) as f64 * ln_p + (n_a as usize - a + 1) as f64 * ln_1mp);
            }
            for (b, (v, c)) in fb.iter_mut().zip(&self.ln_coef_b).enumerate() {
                *v = exp(c + b as f64 * ln_q + (n_b as usize - b) as f64 * ln_1mq);
            }
            for (row, &va) in out.chunks_exact_mut(width_b).zip(fa.iter()) {
                for (o, &vb) in row.iter_mut().zip(fb.iter()) {
                    *o = va * vb;
                }
            }
        };
        let est = integrate_vec(
            dim,
            integrand,
            &logit_breakpoints(n_a, n_b, r),
            Tolerance::absolute(OUTCOME_ABS_TOL),
        )?;
        let probs = self
            .layout
            .natural
            .iter()
            .map(|&i| est.values[i].clamp(0.0, 1.0))
            .collect();
        Ok(OutcomeDistribution::from_sorted(
            r,
            Arc::clone(&self.layout),
            probs,
            est.error,
        ))
    }

    /// Every distinct estimator value, increasing.
    pub fn support(&self) -> &[ExtendedOddsRatio] {
        &self.layout.atoms
    }
}

impl DistributionSource for Model {
    fn n_a(&self) -> u32 {
        self.layout.n_a
    }
    fn n_b(&self) -> u32 {
        self.layout.n_b
    }
    fn distribution(&self, r: f64) -> Result<Arc<OutcomeDistribution>> {
        self.compute(r).map(Arc::new)
    }
}

/// Single-threaded memoizing wrapper around [`Model`], keyed by the exact
/// bit pattern of `r`.
#[derive(Debug)]
pub struct MemoModel {
    model: Model,
    cache: RefCell<BTreeMap<u64, Arc<OutcomeDistribution>>>,
}

impl MemoModel {
    pub fn new(n_a: u32, n_b: u32) -> Result<Self> {
        Ok(MemoModel {
            model: Model::new(n_a, n_b)?,
            cache: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn cached(&self) -> usize {
        self.cache.borrow().len()
    }
}

impl DistributionSource for MemoModel {
    fn n_a(&self) -> u32 {
        self.model.n_a()
    }
    fn n_b(&self) -> u32 {
        self.model.n_b()
    }
    fn distribution(&self, r: f64) -> Result<Arc<OutcomeDistribution>> {
        if let Some(d) = self.cache.borrow().get(&r.to_bits()) {
            return Ok(Arc::clone(d));
        }
        let d = Arc::new(self.model.compute(r)?);
        self.cache.borrow_mut().insert(r.to_bits(), Arc::clone(&d));
        Ok(d)
    }
}

/// `F_r(t)` for the group sizes of `source`.
pub fn cdf_f<S: DistributionSource>(source: &S, r: f64, t: ExtendedOddsRatio) -> Result<f64> {
    Ok(source.distribution(r)?.cdf(t))
}

/// `G_r(t)`; `t` must be positive.
pub fn cdf_g<S: DistributionSource>(source: &S, r: f64, t: ExtendedOddsRatio) -> Result<f64> {
    if t.is_zero() {
        return Err(Error::Domain("strict CDF is evaluated at t > 0".into()));
    }
    Ok(source.distribution(r)?.cdf_strict(t))
}

/// `P_r(OR̂ = 0)`.
pub fn prob_or_zero<S: DistributionSource>(source: &S, r: f64) -> Result<f64> {
    Ok(source.distribution(r)?.mass_at(ExtendedOddsRatio::Zero))
}

/// `P_r(OR̂ = 1)`.
pub fn prob_or_one<S: DistributionSource>(source: &S, r: f64) -> Result<f64> {
    Ok(source.distribution(r)?.mass_at(ExtendedOddsRatio::ONE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::outcome_prob;
    use approx::assert_abs_diff_eq;

    fn counts(n_a: u32, n_b: u32, a: u32, b: u32) -> TwoArmCounts {
        TwoArmCounts::new(n_a, n_b, a, b).unwrap()
    }

    #[test]
    fn estimator_branches() {
        let or = extended_or(&counts(60, 70, 6, 14));
        assert_eq!(or, ExtendedOddsRatio::ratio(6 * 56, 54 * 14).unwrap());
        assert!((or.value() - 0.4444).abs() < 5e-5);
        assert_eq!(extended_or(&counts(60, 70, 0, 0)), ExtendedOddsRatio::ONE);
        assert_eq!(extended_or(&counts(60, 70, 60, 70)), ExtendedOddsRatio::ONE);
        assert_eq!(extended_or(&counts(60, 70, 0, 5)), ExtendedOddsRatio::Zero);
        assert_eq!(
            extended_or(&counts(60, 70, 12, 70)),
            ExtendedOddsRatio::Zero
        );
        assert_eq!(
            extended_or(&counts(60, 70, 3, 0)),
            ExtendedOddsRatio::Infinite
        );
        assert_eq!(
            extended_or(&counts(60, 70, 60, 9)),
            ExtendedOddsRatio::Infinite
        );
        assert_eq!(
            extended_or(&counts(60, 70, 60, 0)),
            ExtendedOddsRatio::Infinite
        );
    }

    #[test]
    fn ordering_is_exact() {
        let third = ExtendedOddsRatio::ratio(1, 3).unwrap();
        let also_third = ExtendedOddsRatio::ratio(5, 15).unwrap();
        assert_eq!(third, also_third);
        assert!(ExtendedOddsRatio::Zero < third);
        assert!(third < ExtendedOddsRatio::ONE);
        assert!(ExtendedOddsRatio::ratio(u64::MAX, 1).unwrap() < ExtendedOddsRatio::Infinite);
        assert!(ExtendedOddsRatio::ratio(0, 0).is_err());
        assert_eq!(third.recip(), ExtendedOddsRatio::ratio(3, 1).unwrap());
    }

    #[test]
    fn support_has_boundary_atoms() {
        for (n_a, n_b) in [(2, 2), (3, 5), (6, 7)] {
            let model = Model::new(n_a, n_b).unwrap();
            let s = model.support();
            assert!(s.len() <= ((n_a + 1) * (n_b + 1)) as usize);
            assert_eq!(s[0], ExtendedOddsRatio::Zero);
            assert_eq!(*s.last().unwrap(), ExtendedOddsRatio::Infinite);
            assert!(s.contains(&ExtendedOddsRatio::ONE));
            assert!(s.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn vector_engine_matches_scalar_integrals() {
        let model = Model::new(4, 5).unwrap();
        for r in [0.1, 1.0, 7.0] {
            let d = model.compute(r).unwrap();
            assert_eq!(d.len(), 30);
            for e in d.entries() {
                assert_abs_diff_eq!(e.prob, outcome_prob(r, &e.counts).unwrap(), epsilon = 1e-10);
                assert_eq!(d.prob_of(&e.counts), Some(e.prob));
            }
            assert_abs_diff_eq!(d.total(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn cdf_examples() {
        let model = Model::new(2, 2).unwrap();
        let d = model.compute(1.0).unwrap();
        assert_abs_diff_eq!(d.cdf(ExtendedOddsRatio::Infinite), 1.0, epsilon = 1e-9);

        // At r = 1 the table probabilities are C(2,a)C(2,b)/(5 C(4,a+b)).
        let closed = |a: u32, b: u32| {
            let c = |n: u32, k: u32| {
                [
                    [1.0, 0.0, 0.0, 0.0, 0.0],
                    [1.0, 1.0, 0.0, 0.0, 0.0],
                    [1.0, 2.0, 1.0, 0.0, 0.0],
                    [1.0, 3.0, 3.0, 1.0, 0.0],
                    [1.0, 4.0, 6.0, 4.0, 1.0],
                ][n as usize][k as usize]
            };
            c(2, a) * c(2, b) / (5.0 * c(4, a + b))
        };
        // Zero branch: (0,1), (0,2), (1,2).
        let zero_mass = closed(0, 1) + closed(0, 2) + closed(1, 2);
        let min_positive = d.support().map(|(t, _)| t).find(|t| !t.is_zero()).unwrap();
        assert_abs_diff_eq!(d.cdf_strict(min_positive), zero_mass, epsilon = 1e-10);
        // Just below the smallest positive support point, F equals the zero mass.
        let below = match min_positive {
            ExtendedOddsRatio::Finite { num, den } => {
                ExtendedOddsRatio::ratio(num, den + 1).unwrap()
            }
            _ => unreachable!(),
        };
        assert_abs_diff_eq!(d.cdf(below), zero_mass, epsilon = 1e-10);
        assert_abs_diff_eq!(
            d.mass_at(ExtendedOddsRatio::Zero),
            zero_mass,
            epsilon = 1e-10
        );
    }

    #[test]
    fn strict_and_non_strict_cdfs() {
        let d4 = Model::new(4, 4).unwrap().compute(1.0).unwrap();
        for (t, _) in d4.support() {
            assert!(d4.cdf_strict(t) <= d4.cdf(t));
        }
        let d3 = Model::new(3, 3).unwrap().compute(2.0).unwrap();
        for (t, mass) in d3.support() {
            let exact: f64 = d3.entries().filter(|e| e.or_hat == t).map(|e| e.prob).sum();
            assert_abs_diff_eq!(d3.cdf(t) - d3.cdf_strict(t), mass, epsilon = 1e-15);
            assert_abs_diff_eq!(mass, exact, epsilon = 1e-15);
        }
        let d5 = Model::new(5, 5).unwrap().compute(2.0).unwrap();
        let f: Vec<f64> = d5.cdf_table().map(|(_, f, _)| f).collect();
        assert!(f.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn cdf_g_rejects_zero() {
        let m = Model::new(2, 2).unwrap();
        assert!(cdf_g(&m, 1.0, ExtendedOddsRatio::Zero).is_err());
        assert!(cdf_f(&m, 1.0, ExtendedOddsRatio::Zero).is_ok());
    }

    #[test]
    fn atom_limits() {
        let m = Model::new(10, 10).unwrap();
        assert_abs_diff_eq!(prob_or_zero(&m, 1e-6).unwrap(), 10.0 / 11.0, epsilon = 1e-3);
        assert_abs_diff_eq!(prob_or_zero(&m, 1e6).unwrap(), 0.0, epsilon = 1e-3);
        assert_abs_diff_eq!(prob_or_one(&m, 1e-6).unwrap(), 1.0 / 11.0, epsilon = 1e-3);
        assert_abs_diff_eq!(prob_or_one(&m, 1e6).unwrap(), 1.0 / 11.0, epsilon = 1e-3);
    }

    #[test]
    fn memo_model_reuses_distributions() {
        let m = MemoModel::new(3, 3).unwrap();
        let a = m.distribution(2.0).unwrap();
        let b = m.distribution(2.0).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(m.cached(), 1);
        m.distribution(3.0).unwrap();
        assert_eq!(m.cached(), 2);
    }
}
