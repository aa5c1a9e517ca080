use rayon::prelude::*;

use oddsci_core::{
    coverage_exact_at, coverage_standard_at, exact_interval, ConfidenceLevel, CoverageCurve,
    CoveragePoint, DistributionSource, ExactIntervalTable, Grid, Method, Result,
};

/// Same as [`oddsci_core::coverage_curve`] with the grid points evaluated in
/// parallel.
pub fn coverage_curve_par<S>(
    source: &S,
    method: Method,
    level: ConfidenceLevel,
    grid: &Grid,
) -> Result<CoverageCurve>
where
    S: DistributionSource + Sync,
{
    let points = grid
        .values()?
        .into_par_iter()
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

/// [`ExactIntervalTable::build`] with one task per support point.
pub fn interval_table_par<S>(source: &S, level: ConfidenceLevel) -> Result<ExactIntervalTable>
where
    S: DistributionSource + Sync,
{
    let support: Vec<_> = source
        .distribution(1.0)?
        .support()
        .map(|(t, _)| t)
        .collect();
    let rows = support
        .into_par_iter()
        .map(|t| exact_interval(source, t, level).map(|iv| (t, iv)))
        .collect::<Result<Vec<_>>>()?;
    ExactIntervalTable::from_rows(level, rows)
}
