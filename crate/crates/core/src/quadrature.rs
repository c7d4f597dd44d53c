//! Globally adaptive Gauss-Kronrod (10/21-point) quadrature for complex
//! integrands on a finite interval with user breakpoints.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

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
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    /// Estimated absolute error (Kronrod minus Gauss, summed over panels).
    pub error: f64,
    pub intervals: usize,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut abs_sum = fc.norm() * WGK[10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        let s = f1 + f2;
        kronrod += s * WGK[j];
        abs_sum += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let diff = ((kronrod - gauss) * half).norm();
    let roundoff = 50.0 * f64::EPSILON * abs_sum * half.abs();
    Panel {
        a,
        b,
        value,
        error: diff.max(roundoff),
    }
}

/// Integrates `f` over `[breakpoints[0], breakpoints[last]]` to absolute error `tol`.
///
/// Panels are split at their midpoint, worst error first, until the summed
/// error estimate drops below `tol`; exceeding `max_intervals` is a
/// `QuadratureFailure`.
pub fn integrate<F>(f: F, breakpoints: &[f64], tol: f64, max_intervals: usize) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument(
            "breakpoints must be strictly increasing with at least two entries".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut heap: BinaryHeap<Panel> = breakpoints
        .windows(2)
        .map(|w| gk21(&f, w[0], w[1]))
        .collect();
    let mut evaluations = 21 * heap.len();
    loop {
        let (value, error) = heap.iter().fold((Complex64::new(0.0, 0.0), 0.0), |acc, p| {
            (acc.0 + p.value, acc.1 + p.error)
        });
        if error <= tol {
            return Ok(QuadResult {
                value,
                error,
                intervals: heap.len(),
                evaluations,
            });
        }
        if heap.len() >= max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "error estimate {error:e} above {tol:e} after {} panels",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            return Err(Error::QuadratureFailure(format!(
                "panel [{}, {}] cannot be split further",
                worst.a, worst.b
            )));
        }
        heap.push(gk21(&f, worst.a, mid));
        heap.push(gk21(&f, mid, worst.b));
        evaluations += 42;
    }
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(f: F, a: f64, b: f64, tol: f64, max_intervals: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let r = integrate(|x| Complex64::new(f(x), 0.0), &[a, b], tol, max_intervals)?;
    Ok((r.value.re, r.error))
}

/// Breakpoints `-T, ..., -2, -1, 0, 1, 2, ..., T` with doubling spacing.
pub fn symmetric_log_breakpoints(t_max: f64) -> Vec<f64> {
    let mut pos = Vec::new();
    let mut t = 1.0;
    while t < t_max {
        pos.push(t);
        t *= 2.0;
    }
    pos.push(t_max);
    let mut out: Vec<f64> = pos.iter().rev().map(|t| -t).collect();
    out.push(0.0);
    out.extend(pos);
    out
}
