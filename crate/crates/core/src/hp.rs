//! Thin high-precision layer over `astro_float`.
//!
//! `Hp` owns the working precision and the constant cache; every operation
//! rounds to nearest-even at that precision. Complex numbers are a pair of
//! `BigFloat`s with the handful of operations the asymptotic checks need.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, Word};
use num_bigint::{BigInt, Sign as BigSign};
use num_complex::Complex64;
use num_rational::BigRational;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;
const _: () = assert!(std::mem::size_of::<Word>() == 8);

/// Default working precision in bits.
pub const DEFAULT_PRECISION: usize = 256;

pub struct Hp {
    prec: usize,
    cc: Consts,
}

impl Hp {
    pub fn new(prec: usize) -> Result<Self> {
        if prec < 53 {
            return Err(Error::InvalidArgument(format!(
                "working precision must be at least 53 bits, got {prec}"
            )));
        }
        let cc = Consts::new().map_err(|e| Error::InvalidArgument(format!("{e:?}")))?;
        Ok(Hp { prec, cc })
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    /// Unit roundoff `2^-prec`.
    pub fn unit_roundoff(&self) -> f64 {
        2f64.powi(-(self.prec.min(1000) as i32))
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_word(0, self.prec)
    }

    pub fn one(&self) -> BigFloat {
        BigFloat::from_word(1, self.prec)
    }

    pub fn from_f64(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.prec)
    }

    pub fn from_u64(&self, v: u64) -> BigFloat {
        BigFloat::from_word(v, self.prec)
    }

    pub fn from_int(&self, v: &BigInt) -> BigFloat {
        self.round(exact_int(v, 0))
    }

    pub fn from_dyadic(&self, d: &Dyadic) -> BigFloat {
        self.round(exact_int(d.numer(), d.exp() as i64))
    }

    pub fn from_rational(&self, r: &BigRational) -> BigFloat {
        let p = exact_int(r.numer(), 0);
        let q = exact_int(r.denom(), 0);
        p.div(&q, self.prec, RM)
    }

    fn round(&self, mut v: BigFloat) -> BigFloat {
        if !v.is_zero() {
            // Only fails on NaN/Inf, which exact conversions never produce.
            let _ = v.set_precision(self.prec, RM);
        }
        v
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.prec, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.prec, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.prec, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.prec, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.prec, RM)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.prec, RM, &mut self.cc)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.prec, RM, &mut self.cc)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.prec, RM, &mut self.cc)
    }

    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(self.prec, RM, &mut self.cc)
    }

    pub fn atan(&mut self, a: &BigFloat) -> BigFloat {
        a.atan(self.prec, RM, &mut self.cc)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.prec, RM)
    }

    /// Angle of `(x, y)` in `(-pi, pi]`.
    pub fn atan2(&mut self, y: &BigFloat, x: &BigFloat) -> BigFloat {
        if x.is_zero() {
            let pi = self.pi();
            let half_pi = self.div(&pi, &self.from_u64(2));
            return if y.is_negative() {
                half_pi.neg()
            } else if y.is_zero() {
                self.zero()
            } else {
                half_pi
            };
        }
        let ratio = self.div(y, x);
        let base = self.atan(&ratio);
        if x.is_positive() {
            base
        } else if y.is_negative() {
            let pi = self.pi();
            self.sub(&base, &pi)
        } else {
            let pi = self.pi();
            self.add(&base, &pi)
        }
    }

    /// Decimal rendering with every significant digit the precision carries.
    pub fn to_decimal(&mut self, v: &BigFloat) -> String {
        if v.is_zero() {
            return "0".to_string();
        }
        v.format(Radix::Dec, RM, &mut self.cc)
            .unwrap_or_else(|_| to_f64(v).to_string())
    }
}

/// Exact `BigFloat` for `v * 2^-shift`, with as many mantissa bits as `v` needs.
fn exact_int(v: &BigInt, shift: i64) -> BigFloat {
    let (sign, words) = v.to_u64_digits();
    if words.is_empty() {
        return BigFloat::from_word(0, 64);
    }
    let sign = if sign == BigSign::Minus {
        Sign::Neg
    } else {
        Sign::Pos
    };
    let e = 64 * words.len() as i64 - shift;
    BigFloat::from_words(&words, sign, e as i32)
}

/// Nearest `f64`; saturates to infinity or zero outside the `f64` range.
pub fn to_f64(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    match v.as_raw_parts() {
        Some((words, _, sign, e, _)) => {
            let top = *words.last().unwrap_or(&0) as f64;
            let mag = crate::dyadic::ldexp(top, e as i64 - 64);
            if sign == Sign::Neg {
                -mag
            } else {
                mag
            }
        }
        None => f64::NAN,
    }
}

/// `ln |v|` as an `f64`, finite for any nonzero `BigFloat`.
pub fn ln_abs(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    match v.as_raw_parts() {
        Some((words, _, _, e, _)) => {
            let top = *words.last().unwrap_or(&1) as f64;
            top.ln() + (e as f64 - 64.0) * std::f64::consts::LN_2
        }
        None => f64::NAN,
    }
}

#[derive(Debug, Clone)]
pub struct HpComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl HpComplex {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        HpComplex { re, im }
    }

    pub fn real(hp: &Hp, re: BigFloat) -> Self {
        HpComplex { re, im: hp.zero() }
    }

    pub fn from_rationals(hp: &Hp, re: &BigRational, im: &BigRational) -> Self {
        HpComplex {
            re: hp.from_rational(re),
            im: hp.from_rational(im),
        }
    }

    pub fn add(&self, hp: &Hp, o: &HpComplex) -> HpComplex {
        HpComplex::new(hp.add(&self.re, &o.re), hp.add(&self.im, &o.im))
    }

    pub fn sub(&self, hp: &Hp, o: &HpComplex) -> HpComplex {
        HpComplex::new(hp.sub(&self.re, &o.re), hp.sub(&self.im, &o.im))
    }

    pub fn mul(&self, hp: &Hp, o: &HpComplex) -> HpComplex {
        let re = hp.sub(&hp.mul(&self.re, &o.re), &hp.mul(&self.im, &o.im));
        let im = hp.add(&hp.mul(&self.re, &o.im), &hp.mul(&self.im, &o.re));
        HpComplex::new(re, im)
    }

    pub fn scale(&self, hp: &Hp, s: &BigFloat) -> HpComplex {
        HpComplex::new(hp.mul(&self.re, s), hp.mul(&self.im, s))
    }

    pub fn norm_sqr(&self, hp: &Hp) -> BigFloat {
        hp.add(&hp.mul(&self.re, &self.re), &hp.mul(&self.im, &self.im))
    }

    pub fn abs(&self, hp: &Hp) -> BigFloat {
        hp.sqrt(&self.norm_sqr(hp))
    }

    pub fn div(&self, hp: &Hp, o: &HpComplex) -> HpComplex {
        let d = o.norm_sqr(hp);
        let re = hp.add(&hp.mul(&self.re, &o.re), &hp.mul(&self.im, &o.im));
        let im = hp.sub(&hp.mul(&self.im, &o.re), &hp.mul(&self.re, &o.im));
        HpComplex::new(hp.div(&re, &d), hp.div(&im, &d))
    }

    pub fn arg(&self, hp: &mut Hp) -> BigFloat {
        hp.atan2(&self.im, &self.re)
    }

    /// Principal logarithm, imaginary part in `(-pi, pi]`.
    pub fn ln(&self, hp: &mut Hp) -> HpComplex {
        let half = hp.div(&hp.one(), &hp.from_u64(2));
        let n2 = self.norm_sqr(hp);
        let ln_n2 = hp.ln(&n2);
        let re = hp.mul(&half, &ln_n2);
        let im = self.arg(hp);
        HpComplex::new(re, im)
    }

    /// `exp(log_modulus) * (cos angle + i sin angle)`.
    pub fn from_polar_log(hp: &mut Hp, log_modulus: &BigFloat, angle: &BigFloat) -> HpComplex {
        let r = hp.exp(log_modulus);
        let c = hp.cos(angle);
        let s = hp.sin(angle);
        HpComplex::new(hp.mul(&r, &c), hp.mul(&r, &s))
    }

    /// `self^k` evaluated in polar form.
    pub fn powu(&self, hp: &mut Hp, k: u64) -> HpComplex {
        let l = self.ln(hp);
        let kk = hp.from_u64(k);
        let lm = hp.mul(&l.re, &kk);
        let an = hp.mul(&l.im, &kk);
        HpComplex::from_polar_log(hp, &lm, &an)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }
}
