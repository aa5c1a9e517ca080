//! The usual asymptotic interval `OR̂ · exp(u_δ · se)` with
//! `se = sqrt(1/n_A1 + 1/n_A0 + 1/n_B1 + 1/n_B0)`, without any cell correction.

use alloc::format;

use crate::error::{Cell, Error, Result};
use crate::exact::{ConfidenceLevel, OrInterval};
use crate::math::{erfc, exp, ln, sqrt};
use crate::prob::TwoArmCounts;

// Acklam's rational approximation, refined by one Halley step below.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.024_25;

fn acklam(p: f64) -> f64 {
    if p < P_LOW {
        let q = sqrt(-2.0 * ln(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// `δ`-quantile of the standard normal distribution.
pub fn normal_quantile(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!(
            "normal quantile needs 0 < δ < 1, got {delta}"
        )));
    }
    if delta == 0.5 {
        return Ok(0.0);
    }
    // Work in the lower half; 1 - δ is exact for δ in [0.5, 1).
    if delta > 0.5 {
        return normal_quantile(1.0 - delta).map(|x| -x);
    }
    let x = acklam(delta);
    let e = 0.5 * erfc(-x / core::f64::consts::SQRT_2) - delta;
    let u = e * sqrt(2.0 * core::f64::consts::PI) * exp(x * x / 2.0);
    Ok(x - u / (1.0 + x * u / 2.0))
}

/// The standard (Wald) interval; undefined when any cell of the table is zero.
pub fn standard_ci(counts: &TwoArmCounts, level: ConfidenceLevel) -> Result<OrInterval> {
    let cells = [
        (counts.n_a1(), Cell::SuccessA),
        (counts.n_a0(), Cell::FailureA),
        (counts.n_b1(), Cell::SuccessB),
        (counts.n_b0(), Cell::FailureB),
    ];
    if let Some(&(_, cell)) = cells.iter().find(|(n, _)| *n == 0) {
        return Err(Error::StandardUndefined(cell));
    }
    let [a1, a0, b1, b0] = cells.map(|(n, _)| n as f64);
    let or_hat = (a1 / a0) * (b0 / b1);
    let se = sqrt(1.0 / a1 + 1.0 / a0 + 1.0 / b1 + 1.0 / b0);
    let lo_q = normal_quantile(level.lower_tail_target())?;
    let hi_q = normal_quantile(level.upper_tail_target())?;
    OrInterval::new(or_hat * exp(lo_q * se), or_hat * exp(hi_q * se))
}
