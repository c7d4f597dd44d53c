//! Limiting zero distribution of `P_n`.
//!
//! The normalized zero-counting measures converge to the density
//! `rho(x) = 1 / ((1+x)|x|(l(x)^2 + pi^2))` on `(-1, 0)`, where
//! `l(x) = log((1+x)/|x|)`. The substitution `t = l(x)` maps `rho(x) dx` to
//! `dt / (t^2 + pi^2)`, which gives the closed-form distribution function
//! `1/2 + atan(l(x)/pi)/pi` and turns every improper integral over
//! `(-1, 0)` into a smooth integral over the real line.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, symmetric_log_breakpoints};
use crate::roots::{ZeroPoint, ZeroSet};

/// `log((1+x)/|x|)` for `x` in `(-1, 0)`.
pub fn ell(x: f64) -> f64 {
    x.ln_1p() - (-x).ln()
}

/// `log((1+x)/|x|)` from an exact dyadic point, accurate next to `-1` and `0`.
pub fn ell_dyadic(x: &Dyadic) -> f64 {
    x.one_plus().ln_abs() - x.ln_abs()
}

fn check_open(x: f64) -> Result<()> {
    if !(x > -1.0 && x < 0.0) {
        return Err(Error::DomainViolation(format!("x = {x} is not in (-1, 0)")));
    }
    Ok(())
}

fn check_closed(x: f64) -> Result<()> {
    if !(-1.0..=0.0).contains(&x) {
        return Err(Error::DomainViolation(format!("x = {x} is not in [-1, 0]")));
    }
    Ok(())
}

/// Rejects `z` on the segment `[-1, 0]` (and non-finite input).
pub fn check_off_segment(z: Complex64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::DomainViolation(format!("z = {z} is not finite")));
    }
    if z.im == 0.0 && (-1.0..=0.0).contains(&z.re) {
        return Err(Error::DomainViolation(format!("z = {z} lies on [-1, 0]")));
    }
    Ok(())
}

/// Distance from `z` to the segment `[-1, 0]`.
pub fn distance_to_segment(z: Complex64) -> f64 {
    let nearest = z.re.clamp(-1.0, 0.0);
    (z - Complex64::new(nearest, 0.0)).norm()
}

/// `rho` from `|x|` and `1+x` given separately.
fn density_parts(abs_x: f64, one_plus_x: f64) -> f64 {
    let l = one_plus_x.ln() - abs_x.ln();
    1.0 / (one_plus_x * abs_x * (l * l + PI * PI))
}

pub fn density(x: f64) -> Result<f64> {
    check_open(x)?;
    Ok(density_parts(-x, 1.0 + x))
}

/// `1/2 + atan(l/pi)/pi`, the limiting distribution function in the `t = l(x)` coordinate.
pub fn cdf_from_ell(l: f64) -> f64 {
    0.5 + (l / PI).atan() / PI
}

pub fn cdf(x: f64) -> Result<f64> {
    check_closed(x)?;
    Ok(if x == -1.0 {
        0.0
    } else if x == 0.0 {
        1.0
    } else {
        cdf_from_ell(ell(x))
    })
}

/// Limiting distribution function at an exact point of `[-1, 0]`.
pub fn cdf_dyadic(x: &Dyadic) -> f64 {
    if x <= &Dyadic::minus_one() {
        0.0
    } else if x.signum() >= 0 {
        1.0
    } else {
        cdf_from_ell(ell_dyadic(x))
    }
}

/// Largest relative gap between a centered difference of `cdf` (step `h`) and `density` over `grid`.
pub fn cdf_derivative_max_rel_err(grid: &[f64], h: f64) -> Result<f64> {
    grid.iter().try_fold(0.0f64, |worst, &x| {
        let slope = (cdf(x + h)? - cdf(x - h)?) / (2.0 * h);
        let rho = density(x)?;
        Ok(worst.max((slope - rho).abs() / rho))
    })
}

/// Limiting mass of `(a, b)`.
pub fn interval_mass(a: f64, b: f64) -> Result<f64> {
    check_closed(a)?;
    check_closed(b)?;
    if !(a < b) {
        return Err(Error::DomainViolation(format!("empty interval ({a}, {b})")));
    }
    Ok(cdf(b)? - cdf(a)?)
}

/// Step function `F_n(x) = #{k : x_k <= x} / n`.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    points: Vec<ZeroPoint>,
}

impl EmpiricalCdf {
    pub fn new(zs: &ZeroSet) -> Self {
        EmpiricalCdf { points: zs.points() }
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let xd = Dyadic::from_f64(x)?;
        self.eval_dyadic(&xd)
    }

    pub fn eval_dyadic(&self, x: &Dyadic) -> Result<f64> {
        if self.points.is_empty() {
            return Ok(0.0);
        }
        let mut count = 0usize;
        for p in &self.points {
            if let Some(e) = &p.enclosure {
                if e.lo < *x && *x < e.hi {
                    return Err(Error::Indeterminate(format!(
                        "x = {x} falls inside the enclosure [{}, {}]",
                        e.lo, e.hi
                    )));
                }
            }
            if &p.location <= x {
                count += 1;
            }
        }
        Ok(count as f64 / self.points.len() as f64)
    }
}

pub fn empirical_cdf(zs: &ZeroSet) -> EmpiricalCdf {
    EmpiricalCdf::new(zs)
}

/// `sup |F_n - F|`, evaluated at the jumps of `F_n`.
pub fn kolmogorov_distance(zs: &ZeroSet) -> f64 {
    let pts = zs.points();
    let n = pts.len() as f64;
    pts.iter()
        .enumerate()
        .map(|(k, p)| {
            let c = cdf_dyadic(&p.location);
            let above = (k + 1) as f64 / n;
            let below = k as f64 / n;
            (above - c).abs().max((below - c).abs())
        })
        .fold(0.0, f64::max)
}

/// Closed form `1 / (z (1+z) Log((1+z)/z))`.
pub fn stieltjes_rhs(z: Complex64) -> Result<Complex64> {
    check_off_segment(z)?;
    let one = Complex64::new(1.0, 0.0);
    let log = ((one + z) / z).ln();
    Ok(one / (z * (one + z) * log))
}

/// A numerically integrated quantity and its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    /// Quadrature estimate plus tail remainder plus roundoff.
    pub error_bound: f64,
}

/// Quadrature settings for integrals against the limiting density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityModel {
    /// Truncation `T` of the `t` integration range.
    pub truncation: f64,
    pub tolerance: f64,
    pub max_intervals: usize,
}

impl Default for DensityModel {
    fn default() -> Self {
        DensityModel {
            truncation: 1e6,
            tolerance: 1e-10,
            max_intervals: 50_000,
        }
    }
}

/// `int_T^inf dt / (t^2 + pi^2)`.
fn lorentz_tail(t: f64) -> f64 {
    (PI / t).atan() / PI
}

impl DensityModel {
    pub fn new(truncation: f64, tolerance: f64) -> Result<Self> {
        if !(truncation > 0.0) || !(tolerance > 0.0) {
            return Err(Error::InvalidArgument(
                "truncation and tolerance must be positive".into(),
            ));
        }
        Ok(DensityModel {
            truncation,
            tolerance,
            ..DensityModel::default()
        })
    }

    fn finish(&self, value: Complex64, error_bound: f64) -> Result<Estimate> {
        if !(error_bound <= self.tolerance) {
            return Err(Error::QuadratureFailure(format!(
                "error budget {error_bound:e} exceeds tolerance {:e} at T = {}",
                self.tolerance, self.truncation
            )));
        }
        Ok(Estimate { value, error_bound })
    }

    /// `int_{-1}^0 rho(x) / (z - x) dx`, integrated in `t = l(x)`:
    /// `int (e^t + 1) / ((z(e^t + 1) + 1)(t^2 + pi^2)) dt`.
    ///
    /// Beyond `|t| = T` the integrand is `1/z` (right) or `1/(z+1)` (left)
    /// times the Lorentz kernel up to `O(e^-T)`; those tails are added in
    /// closed form and the `O(e^-T)` remainder is bounded explicitly.
    pub fn stieltjes_lhs(&self, z: Complex64) -> Result<Estimate> {
        check_off_segment(z)?;
        let t_max = self.truncation;
        let pi2 = PI * PI;
        // (e^t + 1)/(z(e^t + 1) + 1) = 1 / (z + w),  w = 1/(1 + e^t)
        let integrand = |t: f64| {
            let w = 1.0 / (1.0 + t.exp());
            1.0 / ((z + w) * (t * t + pi2))
        };
        let quad = integrate(
            integrand,
            &symmetric_log_breakpoints(t_max),
            0.5 * self.tolerance,
            self.max_intervals,
        )?;
        let one = Complex64::new(1.0, 0.0);
        let tail = lorentz_tail(t_max);
        let tails = (one / z + one / (z + one)) * tail;
        let d = distance_to_segment(z);
        let remainder = (-t_max).exp() * tail * (1.0 / (z.norm() * d) + 1.0 / ((z + one).norm() * d));
        let value = quad.value + tails;
        let roundoff = 1e3 * f64::EPSILON * value.norm();
        self.finish(value, quad.error + remainder + roundoff)
    }

    /// `int_{-1}^0 rho(x) dx` by quadrature of `rho(x(t)) x'(t)`.
    pub fn density_mass(&self) -> Result<Estimate> {
        // beyond |t| ~ 700 the logistic weights underflow; the kernel is then exactly Lorentzian
        let t_max = self.truncation.min(600.0);
        let integrand = |t: f64| {
            // |x| = 1/(1+e^t), 1+x = 1/(1+e^-t), dx/dt = |x|(1+x)
            let abs_x = 1.0 / (1.0 + t.exp());
            let one_plus_x = 1.0 / (1.0 + (-t).exp());
            Complex64::new(density_parts(abs_x, one_plus_x) * abs_x * one_plus_x, 0.0)
        };
        let quad = integrate(
            integrand,
            &symmetric_log_breakpoints(t_max),
            0.5 * self.tolerance,
            self.max_intervals,
        )?;
        let value = quad.value + 2.0 * lorentz_tail(t_max);
        self.finish(value, quad.error + 1e3 * f64::EPSILON)
    }
}

/// Twelve fixed points: real `z > 0`, real `z < -1`, and both half-planes.
pub fn stieltjes_sample_points() -> Vec<Complex64> {
    [
        (0.5, 0.0),
        (1.0, 0.0),
        (10.0, 0.0),
        (-1.5, 0.0),
        (-2.0, 0.0),
        (-10.0, 0.0),
        (0.0, 1.0),
        (-0.5, 5.0),
        (1.0, 1.0),
        (0.0, -1.0),
        (0.25, -0.5),
        (-1.2, -0.3),
    ]
    .into_iter()
    .map(|(re, im)| Complex64::new(re, im))
    .collect()
}

/// Stieltjes identity comparison, JSON `{"z": [re, im], "lhs", "rhs", "err"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StieltjesComparison {
    pub z: [f64; 2],
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub err: f64,
    pub bound: f64,
}

pub fn compare_stieltjes(model: &DensityModel, z: Complex64) -> Result<StieltjesComparison> {
    let lhs = model.stieltjes_lhs(z)?;
    let rhs = stieltjes_rhs(z)?;
    Ok(StieltjesComparison {
        z: [z.re, z.im],
        lhs: [lhs.value.re, lhs.value.im],
        rhs: [rhs.re, rhs.im],
        err: (lhs.value - rhs).norm(),
        bound: lhs.error_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogPotential {
    pub n: usize,
    pub empirical: f64,
    pub predicted: f64,
}

impl LogPotential {
    pub fn error(&self) -> f64 {
        (self.empirical - self.predicted).abs()
    }
}

/// `(1/n) sum log|z - x_k|` against `-log|Log((1+z)/z)|`.
pub fn log_potential(zs: &ZeroSet, z: Complex64) -> Result<LogPotential> {
    check_off_segment(z)?;
    let pts = zs.points();
    if pts.is_empty() {
        return Err(Error::InvalidArgument("P_0 has no zeros".into()));
    }
    let sum: f64 = pts
        .iter()
        .map(|p| (z - p.location.to_f64()).norm().ln())
        .sum();
    let one = Complex64::new(1.0, 0.0);
    let predicted = -((one + z) / z).ln().norm().ln();
    Ok(LogPotential {
        n: pts.len(),
        empirical: sum / pts.len() as f64,
        predicted,
    })
}

/// One row of overlay data: density, limiting CDF, and empirical CDF at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub x: f64,
    pub rho: f64,
    pub cdf: f64,
    /// `None` when `x` falls inside an enclosure.
    pub f_n: Option<f64>,
}

/// Overlay data on `points` equally spaced interior grid points of `(-1, 0)`.
pub fn plot_data(zs: &ZeroSet, points: usize) -> Result<Vec<PlotRow>> {
    let ecdf = EmpiricalCdf::new(zs);
    (1..=points)
        .map(|i| {
            let x = -1.0 + i as f64 / (points + 1) as f64;
            Ok(PlotRow {
                x,
                rho: density(x)?,
                cdf: cdf(x)?,
                f_n: ecdf.eval(x).ok(),
            })
        })
        .collect()
}

/// CSV with header `x,rho,cdf,F_n`.
pub fn write_plot_csv<W: Write>(rows: &[PlotRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    w.write_record(["x", "rho", "cdf", "F_n"]).map_err(io)?;
    for r in rows {
        w.write_record([
            r.x.to_string(),
            r.rho.to_string(),
            r.cdf.to_string(),
            r.f_n.map(|v| v.to_string()).unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(())
}
