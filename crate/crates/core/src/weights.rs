//! Exact orthogonality relations and the Lagrange weights.
//!
//! With `Q_n = P_n / z`, the partial-fraction expansion
//! `n P_{n-1}(z) / P_n(z) = sum_k lambda_k / (z - x_k)` runs over the nonzero
//! zeros of `P_n`, with `lambda_k = n Q_{n-1}(x_k) / Q_n'(x_k)`. The weights
//! are positive and sum to one.

use std::cmp::Ordering;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{check_off_segment, distance_to_segment};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::hp::{to_f64, Hp, HpComplex};
use crate::poly::{
    complex_rational, derivative, horner_complex, scaled_eval_dyadic, GeometricPolynomial,
};
use crate::roots::{Enclosure, ZeroSet};

/// `int_{-1}^0 x^k dx = (-1)^k / (k+1)`.
fn monomial_integral(k: usize) -> BigRational {
    let sign = if k % 2 == 0 { 1 } else { -1 };
    BigRational::new(BigInt::from(sign), BigInt::from(k + 1))
}

/// Exact `int_{-1}^0 p(x) dx` for an integer polynomial.
pub fn integrate_dense(dense: &[BigInt]) -> BigRational {
    dense
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| monomial_integral(k) * BigRational::from_integer(c.clone()))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// Exact `int_{-1}^0 P_n(x)/x dx`, which vanishes for `n >= 2`.
pub fn integral_pn_over_x(p: &GeometricPolynomial) -> Result<BigRational> {
    if p.degree() < 2 {
        return Err(Error::InvalidArgument(format!(
            "the integral of P_n/x is only claimed for n >= 2, got n = {}",
            p.degree()
        )));
    }
    Ok(integrate_dense(p.coeffs()))
}

fn mul_dense(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Which vanishing statement a product of `Q_j` powers falls under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityConfig {
    /// `Q_{2j}^m Q_{2k}^l` with `m + l` odd.
    EvenPowers,
    /// `Q_{2j} Q_{2k-1}`.
    MixedPair,
    /// Neither; no vanishing is claimed.
    Unclassified,
}

/// Non-fatal notice that a configuration carries no vanishing guarantee.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigNote(pub String);

#[derive(Debug, Clone, PartialEq)]
pub struct ParityIntegral {
    pub value: BigRational,
    pub config: ParityConfig,
    pub note: Option<ConfigNote>,
}

pub fn classify(factors: &[(usize, u32)]) -> ParityConfig {
    match factors {
        [(j, m), (k, l)] if j % 2 == 0 && k % 2 == 0 && (m + l) % 2 == 1 => ParityConfig::EvenPowers,
        [(j, 1), (k, 1)] if (j + k) % 2 == 1 => ParityConfig::MixedPair,
        _ => ParityConfig::Unclassified,
    }
}

/// Exact `int_{-1}^0 prod Q_j(x)^m dx` over `factors = [(j, m), ...]`.
///
/// `polys` must contain `P_j` at index `j` for every referenced `j`.
pub fn parity_product_integral(
    polys: &[GeometricPolynomial],
    factors: &[(usize, u32)],
) -> Result<ParityIntegral> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("empty product".into()));
    }
    let mut product = vec![BigInt::one()];
    for &(j, m) in factors {
        if j == 0 {
            return Err(Error::InvalidArgument("Q_0 = 1/x is not a polynomial".into()));
        }
        let p = polys.get(j).ok_or_else(|| {
            Error::InvalidArgument(format!("P_{j} is not in the supplied family"))
        })?;
        for _ in 0..m {
            product = mul_dense(&product, p.coeffs());
        }
    }
    let config = classify(factors);
    let note = (config == ParityConfig::Unclassified).then(|| {
        ConfigNote(format!(
            "{factors:?} matches neither vanishing statement; the value is not claimed to be zero"
        ))
    });
    Ok(ParityIntegral {
        value: integrate_dense(&product),
        config,
        note,
    })
}

/// Statement-1 configurations with indices and powers bounded as given.
pub fn even_power_configs(max_index: usize, max_power: u32) -> Vec<[(usize, u32); 2]> {
    let evens: Vec<usize> = (2..=max_index).step_by(2).collect();
    let mut out = Vec::new();
    for &j in &evens {
        for &k in &evens {
            for m in 1..=max_power {
                for l in 1..=max_power {
                    if (m + l) % 2 == 1 {
                        out.push([(j, m), (k, l)]);
                    }
                }
            }
        }
    }
    out
}

/// Statement-2 pairs `Q_{2j} Q_{2k-1}` with both indices at most `max_index`.
pub fn mixed_pair_configs(max_index: usize) -> Vec<[(usize, u32); 2]> {
    let mut out = Vec::new();
    for j in (2..=max_index).step_by(2) {
        for k in (1..=max_index).step_by(2) {
            out.push([(j, 1), (k, 1)]);
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Weight {
    /// Zero location used for evaluation: the enclosure midpoint or exact `-1/2`.
    pub location: Dyadic,
    pub enclosure: Option<Enclosure>,
    pub lambda: BigFloat,
    /// Bound on the change of `lambda` across the enclosure.
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct WeightSet {
    pub degree: usize,
    /// Ascending by location.
    pub weights: Vec<Weight>,
    pub sum: BigFloat,
    /// Allowed deviation of `sum` from 1.
    pub sum_budget: f64,
}

/// `n Q_{n-1}(x) / Q_n'(x)` at a dyadic point, exactly.
fn lambda_at(n: usize, q_prev: &[BigInt], dq: &[BigInt], x: &Dyadic) -> BigRational {
    // both have degree n-2, so the 2^(k d) scalings cancel
    let num = scaled_eval_dyadic(q_prev, x) * BigInt::from(n);
    let den = scaled_eval_dyadic(dq, x);
    BigRational::new(num, den)
}

/// Lagrange weights of `P_n` from a certified zero set of width at most `2^-80`.
pub fn compute_weights(
    zs: &ZeroSet,
    p_prev: &GeometricPolynomial,
    p: &GeometricPolynomial,
    hp: &Hp,
) -> Result<WeightSet> {
    let n = p.degree();
    if n < 2 || p_prev.degree() + 1 != n || zs.degree() != n {
        return Err(Error::InvalidArgument(format!(
            "weights need n >= 2 with matching P_(n-1), P_n and zero set (got {}, {}, {})",
            p_prev.degree(),
            n,
            zs.degree()
        )));
    }
    if zs.width() > &Dyadic::pow2_neg(80).to_rational() {
        return Err(Error::InvalidArgument(
            "weights need enclosures of width at most 2^-80; refine the zero set first".into(),
        ));
    }
    let q_prev = p_prev.coeffs();
    let dq = derivative(p.coeffs());
    debug_assert_eq!(q_prev.len(), dq.len());
    let points: Vec<_> = zs
        .points()
        .into_iter()
        .filter(|z| !(z.is_exact() && z.location.is_zero()))
        .collect();
    let exact: Vec<(BigRational, BigRational)> = points
        .par_iter()
        .map(|z| {
            let mid = lambda_at(n, q_prev, &dq, &z.location);
            let spread = match &z.enclosure {
                Some(e) => {
                    let lo = lambda_at(n, q_prev, &dq, &e.lo);
                    let hi = lambda_at(n, q_prev, &dq, &e.hi);
                    (&lo - &mid).abs().max((&hi - &mid).abs())
                }
                None => BigRational::zero(),
            };
            (mid, spread)
        })
        .collect();
    let mut weights = Vec::with_capacity(points.len());
    let mut sum = hp.zero();
    let mut err_sum = 0.0;
    for (z, (mid, spread)) in points.into_iter().zip(exact) {
        let lambda = hp.from_rational(&mid);
        if !lambda.is_positive() {
            return Err(Error::PrecisionLoss {
                bound: to_f64(&lambda),
                tolerance: 0.0,
            });
        }
        let error = to_f64(&hp.from_rational(&spread));
        err_sum += error;
        sum = hp.add(&sum, &lambda);
        weights.push(Weight {
            location: z.location,
            enclosure: z.enclosure,
            lambda,
            error,
        });
    }
    let width = to_f64(&hp.from_rational(zs.width()));
    let sum_budget = 4.0 * n as f64 * width + err_sum + 4.0 * n as f64 * hp.unit_roundoff();
    let deviation = to_f64(&hp.sub(&sum, &hp.one())).abs();
    if !(deviation <= sum_budget) {
        return Err(Error::PrecisionLoss {
            bound: deviation,
            tolerance: sum_budget,
        });
    }
    Ok(WeightSet {
        degree: n,
        weights,
        sum,
        sum_budget,
    })
}

/// JSON export `{"n", "weights": [{"x", "lambda"}], "sum"}` with decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightExport {
    pub n: usize,
    pub weights: Vec<WeightEntry>,
    pub sum: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub x: String,
    pub lambda: String,
}

impl WeightSet {
    pub fn min_lambda(&self) -> f64 {
        self.weights
            .iter()
            .map(|w| to_f64(&w.lambda))
            .fold(f64::INFINITY, f64::min)
    }

    /// `sum - 1` as an `f64`.
    pub fn sum_deviation(&self, hp: &Hp) -> f64 {
        to_f64(&hp.sub(&self.sum, &hp.one()))
    }

    pub fn to_export(&self, hp: &mut Hp) -> WeightExport {
        WeightExport {
            n: self.degree,
            weights: self
                .weights
                .iter()
                .map(|w| WeightEntry {
                    x: w.location.to_decimal_string(),
                    lambda: hp.to_decimal(&w.lambda),
                })
                .collect(),
            sum: hp.to_decimal(&self.sum),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialFractionCheck {
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub err: f64,
    pub bound: f64,
}

/// Compares `n P_{n-1}(z) / P_n(z)` with `sum lambda_k / (z - x_k)`.
pub fn partial_fraction_check(
    ws: &WeightSet,
    p_prev: &GeometricPolynomial,
    p: &GeometricPolynomial,
    z: Complex64,
    hp: &Hp,
) -> Result<PartialFractionCheck> {
    check_off_segment(z)?;
    if p.degree() != ws.degree || p_prev.degree() + 1 != ws.degree {
        return Err(Error::InvalidArgument("degree mismatch".into()));
    }
    let zr = complex_rational(z)?;
    let num = horner_complex(&p_prev.dense(), &zr);
    let den = horner_complex(&p.dense(), &zr);
    let n = BigRational::from_integer(BigInt::from(ws.degree));
    let ratio = HpComplex::from_rationals(hp, &num.re, &num.im)
        .div(hp, &HpComplex::from_rationals(hp, &den.re, &den.im))
        .scale(hp, &hp.from_rational(&n));
    let zc = HpComplex::from_rationals(hp, &zr.re, &zr.im);
    let mut rhs = HpComplex::real(hp, hp.zero());
    let d = distance_to_segment(z);
    let mut bound = 0.0;
    for w in &ws.weights {
        let x = HpComplex::real(hp, hp.from_dyadic(&w.location));
        let term = HpComplex::real(hp, w.lambda.clone()).div(hp, &zc.sub(hp, &x));
        rhs = rhs.add(hp, &term);
        let half_width = w.enclosure.as_ref().map_or(0.0, |e| e.width().to_f64());
        bound += w.error / d + to_f64(&w.lambda) * half_width / (d * d);
    }
    bound += 16.0 * ws.degree as f64 * hp.unit_roundoff() / d;
    let (lhs, rhs) = (ratio.to_c64(), rhs.to_c64());
    Ok(PartialFractionCheck {
        lhs: [lhs.re, lhs.im],
        rhs: [rhs.re, rhs.im],
        err: (lhs - rhs).norm(),
        bound,
    })
}

/// Weight mass inside `(a, b)`, reported both plain and divided by `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalWeight {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub sum: f64,
    pub sum_over_n: f64,
}

pub fn weight_interval_sum(ws: &WeightSet, a: f64, b: f64, hp: &Hp) -> Result<IntervalWeight> {
    if !(-1.0 <= a && a < b && b <= 0.0) {
        return Err(Error::DomainViolation(format!(
            "({a}, {b}) is not a subinterval of [-1, 0]"
        )));
    }
    let (da, db) = (Dyadic::from_f64(a)?, Dyadic::from_f64(b)?);
    let mut sum = hp.zero();
    for w in &ws.weights {
        if w.location.cmp(&da) == Ordering::Greater && w.location.cmp(&db) == Ordering::Less {
            sum = hp.add(&sum, &w.lambda);
        }
    }
    let sum = to_f64(&sum);
    Ok(IntervalWeight {
        n: ws.degree,
        a,
        b,
        sum,
        sum_over_n: sum / ws.degree as f64,
    })
}
