//! Std companion to `oddsci-core`: a thread-safe distribution cache,
//! parallel coverage curves, output formats and the `oddsci` command line.

pub mod cache;
pub mod cli;
pub mod curve;
pub mod render;

pub use cache::SharedModel;
pub use curve::{coverage_curve_par, interval_table_par};
