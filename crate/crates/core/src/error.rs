use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Which cell of the 2×2 table is empty when the Wald interval is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    SuccessA,
    FailureA,
    SuccessB,
    FailureB,
}

impl core::fmt::Display for Cell {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Cell::SuccessA => "n_A1 (successes in A)",
            Cell::FailureA => "n_A0 (failures in A)",
            Cell::SuccessB => "n_B1 (successes in B)",
            Cell::FailureB => "n_B0 (failures in B)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid counts: {0}")]
    InvalidCounts(String),
    #[error("confidence level must lie in (0, 1), got {0}")]
    InvalidLevel(f64),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    Quadrature { estimate: f64, error_bound: f64 },
    #[error("no sign change for the {which} endpoint within [{lo}, {hi}]")]
    BracketExhausted {
        which: &'static str,
        lo: f64,
        hi: f64,
    },
    #[error("the standard interval does not exist: cell {0} is zero")]
    StandardUndefined(Cell),
}

impl Error {
    /// True for failures of the numerical machinery as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::BracketExhausted { .. }
        )
    }
}
