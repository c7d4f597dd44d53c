//! Finite-`n` checks of the limit theorems.
//!
//! Off `[-1, 0]`, `P_n(z) L(z)^{n+1} / n! -> 1/(1+z)` with
//! `L(z) = Log((1+z)/z)` (principal branch); inside `(-1, 0)` the suitably
//! scaled `P_n(x)` tracks `G_n(x) = 2 cos((n+1) theta)` with
//! `theta = arg(l(x) + i pi)`. Convergence is geometric, so every comparison
//! is carried out at the working precision: the errors sit far below the
//! `f64` resolution of the values themselves.

use std::io::Write;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::hp::{to_f64, Hp, HpComplex};
use crate::poly::{
    complex_rational, eval_normalized, factorial, fubini_number, horner_complex,
    ComplexRational, GeometricPolynomial,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statement {
    Exterior,
    Ratio,
    NthRoot,
    Interior,
    FubiniLimit,
    LogPotential,
}

impl Statement {
    pub fn name(self) -> &'static str {
        match self {
            Statement::Exterior => "exterior",
            Statement::Ratio => "ratio",
            Statement::NthRoot => "nth_root",
            Statement::Interior => "interior",
            Statement::FubiniLimit => "fubini_limit",
            Statement::LogPotential => "log_potential",
        }
    }
}

/// One `(point, n)` comparison.
#[derive(Debug, Clone)]
pub struct Sample {
    pub z: Complex64,
    pub n: usize,
    pub computed: HpComplex,
    pub predicted: HpComplex,
    /// `|computed - predicted|`, evaluated at the working precision.
    pub abs_err: f64,
    /// `abs_err / |predicted|` when `|predicted| > 1e-6`.
    pub rel_err: Option<f64>,
    /// Bound on the evaluation error of `computed`.
    pub eval_bound: f64,
}

impl Sample {
    pub fn new(
        hp: &Hp,
        z: Complex64,
        n: usize,
        computed: HpComplex,
        predicted: HpComplex,
        eval_bound: f64,
    ) -> Self {
        let abs_err = to_f64(&computed.sub(hp, &predicted).abs(hp));
        let size = to_f64(&predicted.abs(hp));
        let rel_err = (size > 1e-6).then(|| abs_err / size);
        Sample {
            z,
            n,
            computed,
            predicted,
            abs_err,
            rel_err,
            eval_bound,
        }
    }

    pub fn computed_c64(&self) -> Complex64 {
        self.computed.to_c64()
    }

    pub fn predicted_c64(&self) -> Complex64 {
        self.predicted.to_c64()
    }
}

fn on_segment(z: &ComplexRational) -> bool {
    z.im.is_zero() && z.re <= BigRational::zero() && z.re >= -BigRational::one()
}

fn exterior_point(z: Complex64) -> Result<ComplexRational> {
    let zr = complex_rational(z)?;
    if on_segment(&zr) {
        return Err(Error::DomainViolation(format!(
            "z = {z} lies on [-1, 0], where the exterior limits do not apply"
        )));
    }
    Ok(zr)
}

/// `Log((1+z)/z)`, principal branch.
pub fn log_ratio(hp: &mut Hp, z: &ComplexRational) -> HpComplex {
    let zc = HpComplex::from_rationals(hp, &z.re, &z.im);
    let one_plus = HpComplex::new(hp.add(&zc.re, &hp.one()), zc.im.clone());
    one_plus.div(hp, &zc).ln(hp)
}

/// `1/(1+z)`.
fn exterior_limit(hp: &Hp, z: &ComplexRational) -> HpComplex {
    let zc = HpComplex::from_rationals(hp, &z.re, &z.im);
    let one_plus = HpComplex::new(hp.add(&zc.re, &hp.one()), zc.im.clone());
    HpComplex::real(hp, hp.one()).div(hp, &one_plus)
}

/// `P_n(z) Log((1+z)/z)^{n+1} / n!` against `1/(1+z)`.
pub fn exterior_ratio(p: &GeometricPolynomial, z: Complex64, hp: &mut Hp) -> Result<Sample> {
    let zr = exterior_point(z)?;
    let n = p.degree();
    let v = eval_normalized(&p.normalized(), &zr, hp, Some(1e-20))?;
    let l = log_ratio(hp, &zr);
    let power = l.powu(hp, n as u64 + 1);
    let computed = v.value.mul(hp, &power);
    let predicted = exterior_limit(hp, &zr);
    let size = to_f64(&computed.abs(hp));
    let bound = size * (v.rel_error_bound + 16.0 * (n + 2) as f64 * hp.unit_roundoff());
    Ok(Sample::new(hp, z, n, computed, predicted, bound))
}

/// `n P_{n-1}(z) / P_n(z)` against `Log((1+z)/z)`.
pub fn ratio_np(
    p_prev: &GeometricPolynomial,
    p: &GeometricPolynomial,
    z: Complex64,
    hp: &mut Hp,
) -> Result<Sample> {
    let zr = exterior_point(z)?;
    let n = p.degree();
    if n == 0 || p_prev.degree() + 1 != n {
        return Err(Error::InvalidArgument("ratio_np needs P_(n-1) and P_n with n >= 1".into()));
    }
    let num = horner_complex(&p_prev.dense(), &zr);
    let den = horner_complex(&p.dense(), &zr);
    let scale = hp.from_u64(n as u64);
    let computed = HpComplex::from_rationals(hp, &num.re, &num.im)
        .div(hp, &HpComplex::from_rationals(hp, &den.re, &den.im))
        .scale(hp, &scale);
    let predicted = log_ratio(hp, &zr);
    let bound = 8.0 * hp.unit_roundoff() * to_f64(&computed.abs(hp));
    Ok(Sample::new(hp, z, n, computed, predicted, bound))
}

/// `|P_n(z)/n!|^{1/n}` against `1/|Log((1+z)/z)|`.
pub fn nth_root_modulus(p: &GeometricPolynomial, z: Complex64, hp: &mut Hp) -> Result<Sample> {
    let zr = exterior_point(z)?;
    let n = p.degree();
    if n == 0 {
        return Err(Error::InvalidArgument("nth_root_modulus needs n >= 1".into()));
    }
    let v = eval_normalized(&p.normalized(), &zr, hp, Some(1e-20))?;
    let modulus_sq = v.value.norm_sqr(hp);
    let ln_sq = hp.ln(&modulus_sq);
    let exponent = hp.div(&ln_sq, &hp.from_u64(2 * n as u64));
    let root = hp.exp(&exponent);
    let computed = HpComplex::real(hp, root);
    let l = log_ratio(hp, &zr);
    let predicted = HpComplex::real(hp, hp.div(&hp.one(), &l.abs(hp)));
    let bound = to_f64(&computed.re) * (v.rel_error_bound / n as f64 + 16.0 * hp.unit_roundoff());
    Ok(Sample::new(hp, z, n, computed, predicted, bound))
}

/// `l(x) = log((1+x)/|x|)` at the working precision.
fn ell_hp(hp: &mut Hp, x: &BigRational) -> astro_float::BigFloat {
    let r = (BigRational::one() + x) / x.abs();
    let rf = hp.from_rational(&r);
    hp.ln(&rf)
}

/// `(x+1) P_n(x) (l^2 + pi^2)^{(n+1)/2} / n!` against `2 cos((n+1) atan2(pi, l))`.
pub fn interior_compare(p: &GeometricPolynomial, x: &BigRational, hp: &mut Hp) -> Result<Sample> {
    if !(x > &-BigRational::one() && x < &BigRational::zero()) {
        return Err(Error::DomainViolation(format!("x = {x} is not in (-1, 0)")));
    }
    let n = p.degree();
    let pn = p.eval_exact(x) * (BigRational::one() + x);
    let l = ell_hp(hp, x);
    let pi = hp.pi();
    let l2 = hp.mul(&l, &l);
    let pi2 = hp.mul(&pi, &pi);
    let r2 = hp.add(&l2, &pi2);
    let n1 = hp.from_u64(n as u64 + 1);
    let ln_r2 = hp.ln(&r2);
    let half_log = hp.div(&hp.mul(&ln_r2, &n1), &hp.from_u64(2));
    let growth = hp.exp(&half_log);
    let fact = hp.from_int(&factorial(n));
    let scaled = hp.div(&hp.mul(&hp.from_rational(&pn), &growth), &fact);
    let theta = hp.atan2(&pi, &l);
    let angle = hp.mul(&theta, &n1);
    let c = hp.cos(&angle);
    let g = hp.mul(&c, &hp.from_u64(2));
    let xf = Complex64::new(to_f64(&hp.from_rational(x)), 0.0);
    let bound = 32.0 * (n + 2) as f64 * hp.unit_roundoff() * to_f64(&scaled).abs().max(1.0);
    Ok(Sample::new(
        hp,
        xf,
        n,
        HpComplex::real(hp, scaled),
        HpComplex::real(hp, g),
        bound,
    ))
}

/// `max |scaled - G_n|` over the grid `x = -9/10 + 8k/(10(m-1))`, `k = 0..m-1`.
pub fn interior_grid(m: usize) -> Vec<BigRational> {
    assert!(m >= 2);
    (0..m)
        .map(|k| {
            BigRational::new(BigInt::from(-9), BigInt::from(10))
                + BigRational::new(BigInt::from(8 * k), BigInt::from(10 * (m - 1)))
        })
        .collect()
}

/// `(ln 2)^{n+1} / n! * sum_k k^n / 2^k`, truncated with a certified tail.
#[derive(Debug, Clone)]
pub struct FubiniLimit {
    pub n: usize,
    pub value: f64,
    /// Last index `K` of the partial sum.
    pub terms: usize,
    /// Bound on the omitted tail, already scaled by `(ln 2)^{n+1} / n!`.
    pub tail_bound: f64,
    /// `|S_K - 2 P_n(1)|`, which must not exceed the unscaled tail bound.
    pub fubini_gap_ok: bool,
    pub sample: Sample,
}

pub fn fubini_limit(n: usize, tol: f64, hp: &mut Hp) -> Result<FubiniLimit> {
    if n == 0 {
        return Err(Error::InvalidArgument("fubini_limit needs n >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let two = hp.from_u64(2);
    let ln2 = hp.ln(&two);
    let ln_ln2 = hp.ln(&ln2);
    let fact = hp.from_int(&factorial(n));
    let ln_fact = hp.ln(&fact);
    let ln_scale = hp.sub(&hp.mul(&ln_ln2, &hp.from_u64(n as u64 + 1)), &ln_fact);
    let scale = hp.exp(&ln_scale);
    let scale_f = to_f64(&scale);
    let term = |k: usize| {
        BigRational::new(
            num_traits::pow(BigInt::from(k), n),
            BigInt::one() << k,
        )
    };
    let mut sum = BigRational::zero();
    let mut k = 0usize;
    let tail = loop {
        sum += term(k);
        k += 1;
        // terms k^n / 2^k decrease from k = K+1 on once ((K+2)/(K+1))^n < 2;
        // then the tail is at most t_{K+1} / (1 - r) with r that ratio.
        let ratio = BigRational::new(
            num_traits::pow(BigInt::from(k + 1), n),
            num_traits::pow(BigInt::from(k), n) * BigInt::from(2),
        );
        if ratio < BigRational::one() {
            let bound = term(k) / (BigRational::one() - ratio);
            let scaled = to_f64(&hp.from_rational(&bound)) * scale_f;
            if scaled < tol {
                break bound;
            }
        }
    };
    let terms = k - 1;
    let twice_fubini = BigRational::from_integer(fubini_number(n) * BigInt::from(2));
    let gap = &twice_fubini - &sum;
    let fubini_gap_ok = !gap.is_negative() && gap <= tail;
    let value = hp.mul(&hp.from_rational(&sum), &scale);
    let tail_bound = to_f64(&hp.from_rational(&tail)) * scale_f;
    let sample = Sample::new(
        hp,
        Complex64::new(1.0, 0.0),
        n,
        HpComplex::real(hp, value.clone()),
        HpComplex::real(hp, hp.one()),
        tail_bound,
    );
    Ok(FubiniLimit {
        n,
        value: to_f64(&value),
        terms,
        tail_bound,
        fubini_gap_ok,
        sample,
    })
}

/// Samples for one statement, sorted by point and then by `n`.
#[derive(Debug, Clone)]
pub struct AsymptoticReport {
    pub statement: Statement,
    pub samples: Vec<Sample>,
}

/// One serialized row; numbers are decimal strings at the working precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub statement: Statement,
    pub z_re: f64,
    pub z_im: f64,
    pub n: usize,
    pub computed_re: String,
    pub computed_im: String,
    pub predicted_re: String,
    pub predicted_im: String,
    pub abs_err: f64,
    pub rel_err: Option<f64>,
}

impl AsymptoticReport {
    pub fn new(statement: Statement, mut samples: Vec<Sample>) -> Self {
        samples.sort_by(|a, b| {
            a.z.re
                .total_cmp(&b.z.re)
                .then(a.z.im.total_cmp(&b.z.im))
                .then(a.n.cmp(&b.n))
        });
        AsymptoticReport { statement, samples }
    }

    pub fn rows(&self, hp: &mut Hp) -> Vec<ReportRow> {
        self.samples
            .iter()
            .map(|s| ReportRow {
                statement: self.statement,
                z_re: s.z.re,
                z_im: s.z.im,
                n: s.n,
                computed_re: hp.to_decimal(&s.computed.re),
                computed_im: hp.to_decimal(&s.computed.im),
                predicted_re: hp.to_decimal(&s.predicted.re),
                predicted_im: hp.to_decimal(&s.predicted.im),
                abs_err: s.abs_err,
                rel_err: s.rel_err,
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, hp: &mut Hp, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record([
            "statement",
            "z_re",
            "z_im",
            "n",
            "computed_re",
            "computed_im",
            "predicted_re",
            "predicted_im",
            "abs_err",
            "rel_err",
        ])
        .map_err(io)?;
        for r in self.rows(hp) {
            w.write_record([
                self.statement.name().to_string(),
                r.z_re.to_string(),
                r.z_im.to_string(),
                r.n.to_string(),
                r.computed_re,
                r.computed_im,
                r.predicted_re,
                r.predicted_im,
                format!("{:e}", r.abs_err),
                r.rel_err.map(|v| format!("{v:e}")).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        Ok(())
    }

    pub fn to_json(&self, hp: &mut Hp) -> serde_json::Value {
        serde_json::json!({
            "statement": self.statement,
            "samples": self.rows(hp),
        })
    }
}

/// `x` as an exact rational from an `f64`.
pub fn rational_point(x: f64) -> Result<BigRational> {
    Ok(Dyadic::from_f64(x)?.to_rational())
}
