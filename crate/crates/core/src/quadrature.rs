//! Globally adaptive Gauss–Kronrod (10/21 point) quadrature.
//!
//! Both a scalar and a vector-valued driver are provided. The vector driver
//! integrates many non-negative components that share abscissae, which is how
//! every outcome probability of a 2×2 table is obtained in one pass: the
//! worst segment (largest error over all components) is bisected until the
//! summed error drops below the tolerance.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_067_251_598,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const NODES: usize = 21;

/// Stopping rule: stop once the summed error estimate is at most
/// `max(abs, rel * |I|)` (for vectors, `|I|` is the largest component).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub const fn absolute(abs: f64) -> Self {
        Tolerance {
            abs,
            rel: 0.0,
            max_subdivisions: 1_000_000,
        }
    }

    pub const fn relative(rel: f64) -> Self {
        Tolerance {
            abs: 0.0,
            rel,
            max_subdivisions: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VecEstimate {
    pub values: Vec<f64>,
    pub error: f64,
    pub evaluations: usize,
}

// QUADPACK's heuristic rescaling of |K - G|.
fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut e = err.abs();
    if resasc != 0.0 && e != 0.0 {
        let scale = libm::pow(200.0 * e / resasc, 1.5);
        e = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * resabs;
        if min_err > e {
            e = min_err;
        }
    }
    e
}

struct Segment {
    a: f64,
    b: f64,
    values: Vec<f64>,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Applies the 21-point rule on `[a, b]` to a vector integrand.
///
/// `scratch` must hold `21 * dim` values.
fn rule_vec<F>(f: &mut F, a: f64, b: f64, dim: usize, scratch: &mut [f64]) -> (Vec<f64>, f64)
where
    F: FnMut(f64, &mut [f64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    // Slot 0 is the centre, slots 2j+1 / 2j+2 are centre -/+ half*XGK[j].
    f(center, &mut scratch[..dim]);
    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * x;
        let (lo, hi) = scratch[(2 * j + 1) * dim..(2 * j + 3) * dim].split_at_mut(dim);
        f(center - dx, lo);
        f(center + dx, hi);
    }

    let mut kronrod = vec![0.0; dim];
    let mut worst = 0.0_f64;
    for c in 0..dim {
        let fc = scratch[c];
        let mut k = WGK[10] * fc;
        let mut g = 0.0;
        let mut resabs = WGK[10] * fc.abs();
        for j in 0..10 {
            let f1 = scratch[(2 * j + 1) * dim + c];
            let f2 = scratch[(2 * j + 2) * dim + c];
            k += WGK[j] * (f1 + f2);
            resabs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                g += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * k;
        let mut resasc = WGK[10] * (fc - mean).abs();
        for j in 0..10 {
            let f1 = scratch[(2 * j + 1) * dim + c];
            let f2 = scratch[(2 * j + 2) * dim + c];
            resasc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
        }
        let err = rescale_error((k - g) * half, resabs * half.abs(), resasc * half.abs());
        kronrod[c] = k * half;
        if err > worst || err.is_nan() {
            worst = err;
        }
    }
    (kronrod, worst)
}

/// Integrates a vector-valued function over consecutive pieces given by
/// `breakpoints` (at least two, increasing).
pub fn integrate_vec<F>(
    dim: usize,
    mut f: F,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<VecEstimate>
where
    F: FnMut(f64, &mut [f64]),
{
    if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain(
            "quadrature breakpoints must be increasing".into(),
        ));
    }
    let mut scratch = vec![0.0; NODES * dim];
    let mut heap = BinaryHeap::with_capacity(breakpoints.len() * 2);
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        let (values, error) = rule_vec(&mut f, w[0], w[1], dim, &mut scratch);
        evaluations += NODES;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            values,
            error,
        });
    }

    let mut subdivisions = heap.len();
    loop {
        let total = sum_segments(&heap, dim);
        let error: f64 = heap.iter().map(|s| s.error).sum();
        let scale = total.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let target = tol.abs.max(tol.rel * scale);
        if error <= target {
            return Ok(VecEstimate {
                values: total,
                error,
                evaluations,
            });
        }
        if error.is_nan() {
            return Err(Error::Quadrature {
                estimate: total.iter().sum(),
                error_bound: error,
            });
        }
        // Split the worst segments until the error target is plausible; doing
        // several per sweep keeps the summation pass cheap.
        let mut budget = error - target;
        let mut progressed = false;
        while budget > 0.0 {
            if subdivisions >= tol.max_subdivisions {
                return Err(Error::Quadrature {
                    estimate: total.iter().sum(),
                    error_bound: error,
                });
            }
            let worst = match heap.pop() {
                Some(s) => s,
                None => break,
            };
            let mid = 0.5 * (worst.a + worst.b);
            if !(worst.a < mid && mid < worst.b) {
                // Segment cannot be split further in floating point.
                heap.push(worst);
                break;
            }
            budget -= worst.error;
            let (left, le) = rule_vec(&mut f, worst.a, mid, dim, &mut scratch);
            let (right, re) = rule_vec(&mut f, mid, worst.b, dim, &mut scratch);
            evaluations += 2 * NODES;
            subdivisions += 1;
            progressed = true;
            heap.push(Segment {
                a: worst.a,
                b: mid,
                values: left,
                error: le,
            });
            heap.push(Segment {
                a: mid,
                b: worst.b,
                values: right,
                error: re,
            });
        }
        if !progressed {
            return Err(Error::Quadrature {
                estimate: total.iter().sum(),
                error_bound: error,
            });
        }
    }
}

fn sum_segments(heap: &BinaryHeap<Segment>, dim: usize) -> Vec<f64> {
    let mut total = vec![0.0; dim];
    for s in heap.iter() {
        for (t, v) in total.iter_mut().zip(&s.values) {
            *t += v;
        }
    }
    total
}

/// Scalar version of [`integrate_vec`].
pub fn integrate<F>(mut f: F, breakpoints: &[f64], tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    let est = integrate_vec(1, |x, out: &mut [f64]| out[0] = f(x), breakpoints, tol)?;
    Ok(Estimate {
        value: est.values[0],
        error: est.error,
        evaluations: est.evaluations,
    })
}

/// `n + 1` equally spaced points from `a` to `b`.
pub fn uniform_breakpoints(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    let mut pts: Vec<f64> = (0..=n)
        .map(|i| a + (b - a) * (i as f64) / (n as f64))
        .collect();
    pts[n] = b;
    pts
}
