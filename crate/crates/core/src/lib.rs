//! Confidence intervals for the odds ratio of two independent binomial samples.
//!
//! The crate computes
//!
//! * the exact interval built from the distribution of the sample odds ratio
//!   once the group-A success probability has been integrated out
//!   ([`exact_ci`]),
//! * the usual log-scale Wald interval ([`standard_ci`]),
//! * exact coverage probabilities of both, obtained by enumerating every
//!   outcome of the 2×2 table rather than by simulation ([`coverage`]).
//!
//! The crate is `no_std` and only needs `alloc`. Distributions are produced
//! through the [`DistributionSource`] trait so that callers with threads can
//! plug in a shared cache (see the `oddsci` crate).
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod math;

pub mod coverage;
pub mod exact;
pub mod prob;
pub mod quadrature;
pub mod support;
pub mod wald;

pub use coverage::{
    coverage_curve, coverage_exact_at, coverage_exact_direct, coverage_standard_at, CoverageCurve,
    CoveragePoint, ExactIntervalTable, Grid, Method,
};
pub use error::{Cell, Error, Result};
pub use exact::{
    exact_ci, exact_ci_with, exact_interval, is_two_sided, minimal_sample_size,
    reciprocal_interval, ConfidenceLevel, OrInterval, Sidedness,
};
pub use prob::{
    binomial_pmf, gauss_2f1_regularized, joint_prob_at_pa, ln_gauss_2f1_regularized, outcome_prob,
    outcome_prob_hypergeom, NuisanceProportion, TwoArmCounts,
};
pub use support::{
    cdf_f, cdf_g, extended_or, prob_or_one, prob_or_zero, DistributionSource, Entry,
    ExtendedOddsRatio, MemoModel, Model, OutcomeDistribution,
};
pub use wald::{normal_quantile, standard_ci};
