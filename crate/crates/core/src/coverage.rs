//! Exact coverage probabilities, by summing the probabilities of all tables
//! whose interval contains the true odds ratio.
//!
//! For the exact method the interval of an observed `t` contains `r` iff
//!
//! * the lower end is degenerate or `G_r(t) <= (1+γ)/2`, and
//! * the upper end is degenerate or `F_r(t) > (1-γ)/2`,
//!
//! because `G_r(t)` and `F_r(t)` are non-increasing in `r`. One distribution
//! at `r` therefore gives the coverage without solving for any endpoint
//! ([`coverage_exact_at`]). [`coverage_exact_direct`] solves every interval
//! and tests containment instead, and serves as a check of the first.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exact::{
    exact_interval, is_two_sided, lower_is_degenerate, upper_is_degenerate, ConfidenceLevel,
    OrInterval,
};
use crate::support::{DistributionSource, Entry, ExtendedOddsRatio, OutcomeDistribution};
use crate::wald::standard_ci;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveragePoint {
    pub r: f64,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCurve {
    pub method: Method,
    pub n_a: u32,
    pub n_b: u32,
    pub level: ConfidenceLevel,
    pub points: Vec<CoveragePoint>,
}

/// Grid of true odds ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grid {
    Linear { min: f64, max: f64, points: usize },
    Log { min: f64, max: f64, points: usize },
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>> {
        let (min, max, points) = match *self {
            Grid::Linear { min, max, points } | Grid::Log { min, max, points } => {
                (min, max, points)
            }
        };
        if !(min > 0.0) || !(min < max) || !max.is_finite() {
            return Err(Error::Domain(alloc::format!(
                "grid needs 0 < r_min < r_max < ∞, got [{min}, {max}]"
            )));
        }
        if points < 2 {
            return Err(Error::Domain("grid needs at least two points".into()));
        }
        let last = (points - 1) as f64;
        let mut v: Vec<f64> = match *self {
            Grid::Linear { .. } => (0..points)
                .map(|i| min + (max - min) * i as f64 / last)
                .collect(),
            Grid::Log { .. } => {
                let (lmin, lmax) = (libm::log(min), libm::log(max));
                (0..points)
                    .map(|i| libm::exp(lmin + (lmax - lmin) * i as f64 / last))
                    .collect()
            }
        };
        v[0] = min;
        v[points - 1] = max;
        Ok(v)
    }
}

/// Total probability of the tables accepted by `covers`.
pub fn coverage_with<F>(dist: &OutcomeDistribution, mut covers: F) -> f64
where
    F: FnMut(&Entry) -> bool,
{
    dist.entries()
        .filter(|e| covers(e))
        .map(|e| e.prob)
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Coverage of the exact interval at `r`, from the CDFs at `r` alone.
pub fn coverage_exact_at<S: DistributionSource>(
    source: &S,
    r: f64,
    level: ConfidenceLevel,
) -> Result<f64> {
    let dist = source.distribution(r)?;
    let two_sided = is_two_sided(source.n_a(), level);
    let (hi_target, lo_target) = (level.upper_tail_target(), level.lower_tail_target());
    let covered: f64 = dist
        .cdf_table()
        .zip(dist.support())
        .filter(|((t, f, g), _)| {
            let lower_ok = lower_is_degenerate(*t, two_sided) || *g <= hi_target;
            let upper_ok = upper_is_degenerate(*t, two_sided) || *f > lo_target;
            lower_ok && upper_ok
        })
        .map(|(_, (_, mass))| mass)
        .sum();
    Ok(covered.clamp(0.0, 1.0))
}

/// Exact intervals for every support point of the estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactIntervalTable {
    level: ConfidenceLevel,
    rows: Vec<(ExtendedOddsRatio, OrInterval)>,
}

impl ExactIntervalTable {
    pub fn build<S: DistributionSource>(source: &S, level: ConfidenceLevel) -> Result<Self> {
        let support: Vec<ExtendedOddsRatio> = source
            .distribution(1.0)?
            .support()
            .map(|(t, _)| t)
            .collect();
        let rows = support
            .into_iter()
            .map(|t| exact_interval(source, t, level).map(|iv| (t, iv)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExactIntervalTable { level, rows })
    }

    /// Table from intervals computed elsewhere, e.g. in parallel. Rows must be
    /// strictly increasing in the estimate.
    pub fn from_rows(
        level: ConfidenceLevel,
        rows: Vec<(ExtendedOddsRatio, OrInterval)>,
    ) -> Result<Self> {
        if rows.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Domain(
                "interval table rows must be strictly increasing".into(),
            ));
        }
        Ok(ExactIntervalTable { level, rows })
    }

    pub fn level(&self) -> ConfidenceLevel {
        self.level
    }

    pub fn rows(&self) -> &[(ExtendedOddsRatio, OrInterval)] {
        &self.rows
    }

    pub fn interval(&self, t: ExtendedOddsRatio) -> Option<OrInterval> {
        self.rows
            .binary_search_by(|(x, _)| x.cmp(&t))
            .ok()
            .map(|i| self.rows[i].1)
    }
}

/// Coverage of the exact interval at `r` by testing `left < r < right` on
/// precomputed intervals.
pub fn coverage_exact_direct<S: DistributionSource>(
    source: &S,
    table: &ExactIntervalTable,
    r: f64,
) -> Result<f64> {
    let dist = source.distribution(r)?;
    let mut covered = 0.0;
    for (t, mass) in dist.support() {
        let iv = table
            .interval(t)
            .ok_or_else(|| Error::Domain("interval table does not match the model".into()))?;
        if iv.contains(r) {
            covered += mass;
        }
    }
    Ok(covered.clamp(0.0, 1.0))
}

/// Coverage of the standard interval at `r`. Tables on which it does not
/// exist count as not covering.
pub fn coverage_standard_at<S: DistributionSource>(
    source: &S,
    r: f64,
    level: ConfidenceLevel,
) -> Result<f64> {
    let dist = source.distribution(r)?;
    let mut covered = 0.0;
    for e in dist.entries() {
        match standard_ci(&e.counts, level) {
            Ok(iv) if iv.contains(r) => covered += e.prob,
            Ok(_) | Err(Error::StandardUndefined(_)) => {}
            Err(err) => return Err(err),
        }
    }
    Ok(covered.clamp(0.0, 1.0))
}

/// Pointwise coverage over a grid, evaluated sequentially.
pub fn coverage_curve<S: DistributionSource>(
    source: &S,
    method: Method,
    level: ConfidenceLevel,
    grid: &Grid,
) -> Result<CoverageCurve> {
    let points = grid
        .values()?
        .into_iter()
        .map(|r| {
            let coverage = match method {
                Method::Exact => coverage_exact_at(source, r, level)?,
                Method::Standard => coverage_standard_at(source, r, level)?,
            };
            Ok(CoveragePoint { r, coverage })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverageCurve {
        method,
        n_a: source.n_a(),
        n_b: source.n_b(),
        level,
        points,
    })
}
