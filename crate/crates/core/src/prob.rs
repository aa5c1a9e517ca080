//! Probability kernels: binomial pmf, the joint probability of an outcome for
//! a fixed nuisance proportion, and its integral over that proportion.
//!
//! The nuisance proportion `p_A` is integrated in logit coordinates,
//! `p_A = 1 / (1 + e^{-s})`. There `p_B` is the logistic function shifted by
//! `ln r`, so extreme odds ratios only move features along the axis, and the
//! integrand is bounded by `p_A (1 - p_A)`. Truncating to `|s| <= 40` drops
//! at most `2 e^{-40}` of mass, summed over all outcomes.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, ln, ln_1p, ln_choose, ln_gamma, pow, softplus, sqrt};
use crate::quadrature::{integrate, uniform_breakpoints, Tolerance};

/// Absolute tolerance for every outcome probability.
pub const OUTCOME_ABS_TOL: f64 = 1e-10;

/// Relative tolerance of the Euler-integral evaluation of `2F1`.
pub const HYPERGEOM_REL_TOL: f64 = 1e-10;

/// Half-width of the logit window.
pub(crate) const LOGIT_LIMIT: f64 = 40.0;

/// Observed 2×2 table: group sizes and numbers of successes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoArmCounts {
    n_a: u32,
    n_b: u32,
    n_a1: u32,
    n_b1: u32,
}

impl TwoArmCounts {
    pub fn new(n_a: u32, n_b: u32, n_a1: u32, n_b1: u32) -> Result<Self> {
        if n_a == 0 || n_b == 0 {
            return Err(Error::InvalidCounts(format!(
                "group sizes must be positive (n_A = {n_a}, n_B = {n_b})"
            )));
        }
        if n_a1 > n_a {
            return Err(Error::InvalidCounts(format!(
                "n_A1 = {n_a1} exceeds n_A = {n_a}"
            )));
        }
        if n_b1 > n_b {
            return Err(Error::InvalidCounts(format!(
                "n_B1 = {n_b1} exceeds n_B = {n_b}"
            )));
        }
        Ok(TwoArmCounts {
            n_a,
            n_b,
            n_a1,
            n_b1,
        })
    }

    pub fn n_a(&self) -> u32 {
        self.n_a
    }
    pub fn n_b(&self) -> u32 {
        self.n_b
    }
    pub fn n_a1(&self) -> u32 {
        self.n_a1
    }
    pub fn n_b1(&self) -> u32 {
        self.n_b1
    }
    pub fn n_a0(&self) -> u32 {
        self.n_a - self.n_a1
    }
    pub fn n_b0(&self) -> u32 {
        self.n_b - self.n_b1
    }
    /// Total sample size `n = n_A + n_B`.
    pub fn n(&self) -> u32 {
        self.n_a + self.n_b
    }
    /// Total successes `n_1 = n_A1 + n_B1`.
    pub fn n1(&self) -> u32 {
        self.n_a1 + self.n_b1
    }

    /// The same table with the roles of A and B exchanged.
    pub fn swapped(&self) -> Self {
        TwoArmCounts {
            n_a: self.n_b,
            n_b: self.n_a,
            n_a1: self.n_b1,
            n_b1: self.n_a1,
        }
    }

    /// Every table with the given group sizes, A-major order.
    pub fn all_outcomes(n_a: u32, n_b: u32) -> impl Iterator<Item = TwoArmCounts> {
        (0..=n_a).flat_map(move |a| {
            (0..=n_b).map(move |b| TwoArmCounts {
                n_a,
                n_b,
                n_a1: a,
                n_b1: b,
            })
        })
    }
}

/// Success probability of group A, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NuisanceProportion(f64);

impl NuisanceProportion {
    pub fn new(p: f64) -> Result<Self> {
        if p > 0.0 && p < 1.0 {
            Ok(NuisanceProportion(p))
        } else {
            Err(Error::Domain(format!("p_A must lie in (0, 1), got {p}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

pub(crate) fn check_odds_ratio(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "odds ratio must be positive and finite, got {r}"
        )))
    }
}

/// Binomial probability `C(n,k) p^k (1-p)^(n-k)`, evaluated in log space.
/// `0^0` is taken as 1.
pub fn binomial_pmf(k: u32, n: u32, p: f64) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds n = {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p must lie in [0, 1], got {p}")));
    }
    if p == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    if p == 1.0 {
        return Ok(if k == n { 1.0 } else { 0.0 });
    }
    let (k, n) = (k as u64, n as u64);
    let lp = ln_choose(n, k) + k as f64 * ln(p) + (n - k) as f64 * ln_1p(-p);
    Ok(exp(lp))
}

/// `p_B` implied by `p_A` and the odds ratio `r`.
#[inline]
pub(crate) fn p_b_from(p_a: f64, r: f64) -> f64 {
    p_a / (p_a + r * (1.0 - p_a))
}

/// Probability of the table at a fixed `p_A`, with `p_B` tied to `p_A`
/// through the odds ratio `r`.
pub fn joint_prob_at_pa(r: f64, p_a: NuisanceProportion, counts: &TwoArmCounts) -> Result<f64> {
    check_odds_ratio(r)?;
    let p_a = p_a.get();
    let p_b = p_b_from(p_a, r);
    Ok(binomial_pmf(counts.n_a1, counts.n_a, p_a)? * binomial_pmf(counts.n_b1, counts.n_b, p_b)?)
}

/// Breakpoints on the logit axis: a fine mesh over the region where the
/// binomial factors have their peaks and coarse pieces over the tails.
pub(crate) fn logit_breakpoints(n_a: u32, n_b: u32, r: f64) -> Vec<f64> {
    let n = (n_a + n_b) as f64;
    let ln_r = ln(r);
    let spread = ln(n + 2.0) + 8.0;
    let lo = (ln_r.min(0.0) - spread).max(-LOGIT_LIMIT);
    let hi = (ln_r.max(0.0) + spread).min(LOGIT_LIMIT);
    // Narrowest peak has standard deviation about 2 / sqrt(n).
    let width = (20.0 / sqrt(n + 1.0)).min(2.0);

    let mut pts = Vec::new();
    if lo > -LOGIT_LIMIT {
        let pieces = libm::ceil((lo + LOGIT_LIMIT) / 4.0) as usize;
        pts.extend(uniform_breakpoints(-LOGIT_LIMIT, lo, pieces.max(1)));
        pts.pop();
    }
    if hi > lo {
        let pieces = libm::ceil((hi - lo) / width) as usize;
        pts.extend(uniform_breakpoints(lo, hi, pieces.max(1)));
    }
    if hi < LOGIT_LIMIT {
        pts.pop();
        let pieces = libm::ceil((LOGIT_LIMIT - hi) / 4.0) as usize;
        pts.extend(uniform_breakpoints(hi, LOGIT_LIMIT, pieces.max(1)));
    }
    pts
}

/// `ln` of the logit-space integrand for outcome `(a, b)` at abscissa `s`,
/// including the Jacobian `p (1 - p)`.
#[inline]
pub(crate) fn ln_logit_integrand(
    s: f64,
    ln_r: f64,
    n_a: u32,
    n_b: u32,
    a: u32,
    b: u32,
    ln_coef: f64,
) -> f64 {
    let ln_p = -softplus(-s);
    let ln_1mp = -softplus(s);
    let shifted = s - ln_r;
    let ln_q = -softplus(-shifted);
    let ln_1mq = -softplus(shifted);
    ln_coef
        + (a + 1) as f64 * ln_p
        + (n_a - a + 1) as f64 * ln_1mp
        + b as f64 * ln_q
        + (n_b - b) as f64 * ln_1mq
}

/// `P_r{n_A1, n_B1}`: the joint probability with `p_A` integrated out
/// uniformly over `(0, 1)`, by adaptive quadrature (absolute tolerance
/// `1e-10`).
pub fn outcome_prob(r: f64, counts: &TwoArmCounts) -> Result<f64> {
    check_odds_ratio(r)?;
    let (n_a, n_b, a, b) = (counts.n_a, counts.n_b, counts.n_a1, counts.n_b1);
    let ln_coef = ln_choose(n_a as u64, a as u64) + ln_choose(n_b as u64, b as u64);
    let ln_r = ln(r);
    let pts = logit_breakpoints(n_a, n_b, r);
    let est = integrate(
        |s| exp(ln_logit_integrand(s, ln_r, n_a, n_b, a, b, ln_coef)),
        &pts,
        Tolerance::absolute(OUTCOME_ABS_TOL),
    )?;
    Ok(est.value.clamp(0.0, 1.0))
}

/// `P_r{n_A1, n_B1}` through the closed form
/// `n! C(n_A,n_A1) C(n_B,n_B1) / C(n,n_1) * r^{-n_B1} * F(n_B, n_1+1; n+2; 1 - 1/r)`
/// with `F` the Euler integral of [`gauss_2f1_regularized`].
pub fn outcome_prob_hypergeom(r: f64, counts: &TwoArmCounts) -> Result<f64> {
    check_odds_ratio(r)?;
    let (n_a, n_b) = (counts.n_a as u64, counts.n_b as u64);
    let (a, b) = (counts.n_a1 as u64, counts.n_b1 as u64);
    let n = n_a + n_b;
    let n1 = a + b;
    let t = 1.0 - 1.0 / r;
    let ln_f = ln_gauss_2f1_regularized(n_b as f64, n1 as f64 + 1.0, n as f64 + 2.0, t)?;
    let ln_p = ln_gamma(n as f64 + 1.0) + ln_choose(n_a, a) + ln_choose(n_b, b)
        - ln_choose(n, n1)
        - b as f64 * ln(r)
        + ln_f;
    Ok(exp(ln_p).clamp(0.0, 1.0))
}

/// Regularized Gauss hypergeometric function as the Euler integral
/// `1/(Γ(z-y)Γ(y)) ∫₀¹ u^{y-1} (1-u)^{z-y-1} (1-ut)^{-x} du`, for `z > y > 0`
/// and `t < 1`. Equals `₂F₁(x, y; z; t) / Γ(z)`.
pub fn gauss_2f1_regularized(x: f64, y: f64, z: f64, t: f64) -> Result<f64> {
    Ok(exp(ln_gauss_2f1_regularized(x, y, z, t)?))
}

/// Natural log of [`gauss_2f1_regularized`]; stays finite where the value
/// itself under- or overflows.
pub fn ln_gauss_2f1_regularized(x: f64, y: f64, z: f64, t: f64) -> Result<f64> {
    if !(y > 0.0) || !(z > y) || !x.is_finite() || !z.is_finite() {
        return Err(Error::Domain(format!(
            "Euler integral needs z > y > 0 (x = {x}, y = {y}, z = {z})"
        )));
    }
    if !(t < 1.0) || t.is_nan() {
        return Err(Error::Domain(format!(
            "Euler integral needs t < 1, got {t}"
        )));
    }
    let c = z - y;
    let prefactor = -ln_gamma(y) - ln_gamma(c);
    let ln_integrand =
        |u: f64| -> f64 { (y - 1.0) * ln(u) + (c - 1.0) * ln_1p(-u) - x * ln_1p(-u * t) };

    // Geometric refinement toward both ends, uniform mesh in the middle.
    const EDGE: f64 = 1e-16;
    let width = (2.0 / sqrt(z)).min(0.05);
    let mut pts = Vec::new();
    let mut e = EDGE;
    while e < 0.01 {
        pts.push(e);
        e *= 10.0;
    }
    pts.extend(uniform_breakpoints(
        0.01,
        0.99,
        libm::ceil(0.98 / width) as usize,
    ));
    let mut e = 1e-3;
    while e >= EDGE {
        pts.push(1.0 - e);
        e /= 10.0;
    }
    pts.dedup_by(|a, b| !(*b < *a));

    let shift = pts
        .windows(2)
        .map(|w| ln_integrand(0.5 * (w[0] + w[1])))
        .chain(pts.iter().map(|&u| ln_integrand(u)))
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return Err(Error::Quadrature {
            estimate: f64::NAN,
            error_bound: f64::INFINITY,
        });
    }

    let est = integrate(
        |u| exp(ln_integrand(u) - shift),
        &pts,
        Tolerance::relative(HYPERGEOM_REL_TOL),
    )?;
    // End pieces [0, EDGE] and [1 - EDGE, 1], integrating the power factor
    // exactly and freezing the rest at the endpoint.
    let lo_edge = pts[0];
    let hi_edge = 1.0 - pts[pts.len() - 1];
    let head = exp(-shift) * pow(lo_edge, y) / y;
    let tail = exp((-x * ln_1p(-t)) - shift) * pow(hi_edge, c) / c;
    let total = est.value + head + tail;
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Quadrature {
            estimate: total,
            error_bound: est.error,
        });
    }
    Ok(prefactor + shift + ln(total))
}
