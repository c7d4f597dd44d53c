//! Exact geometric polynomials `P_n(z) = sum_k k! S(n,k) z^k`.
//!
//! Three independent constructions are provided (binomial recurrence,
//! Stirling triangle, and the differential identity
//! `P_n = z d/dz ((1+z) P_{n-1})`); they must agree coefficient for
//! coefficient. Evaluation is exact over the rationals, or at a chosen binary
//! precision for the factorial-normalized form `P_n / n!`.

use std::cmp::Ordering;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::hp::{Hp, HpComplex};

pub type ComplexRational = Complex<BigRational>;

/// Exact rational image of a finite complex `f64`.
pub fn complex_rational(z: num_complex::Complex64) -> Result<ComplexRational> {
    Ok(Complex::new(
        Dyadic::from_f64(z.re)?.to_rational(),
        Dyadic::from_f64(z.im)?.to_rational(),
    ))
}

/// Exact value of an integer polynomial at a complex rational point.
pub fn horner_complex(dense: &[BigInt], z: &ComplexRational) -> ComplexRational {
    let mut acc = Complex::new(BigRational::zero(), BigRational::zero());
    for a in dense.iter().rev() {
        acc = acc * z;
        acc.re += BigRational::from_integer(a.clone());
    }
    acc
}

/// `P_n` with exact integer coefficients `c_1..c_n`.
///
/// The constant term is zero for every `n >= 1` and is not stored; `P_0` is
/// the constant polynomial 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeometricPolynomial {
    degree: usize,
    coeffs: Vec<BigInt>,
}

impl GeometricPolynomial {
    pub fn one() -> Self {
        GeometricPolynomial {
            degree: 0,
            coeffs: Vec::new(),
        }
    }

    /// Builds from a dense ascending coefficient list (constant term first).
    fn from_dense(dense: Vec<BigInt>) -> Self {
        let degree = dense.len() - 1;
        if degree == 0 {
            return GeometricPolynomial::one();
        }
        debug_assert!(dense[0].is_zero());
        GeometricPolynomial {
            degree,
            coeffs: dense.into_iter().skip(1).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `c_1..c_n` (empty for `P_0`).
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, including the implicit constant term.
    pub fn coeff(&self, k: usize) -> BigInt {
        match k {
            0 if self.degree == 0 => BigInt::one(),
            0 => BigInt::zero(),
            k if k <= self.degree => self.coeffs[k - 1].clone(),
            _ => BigInt::zero(),
        }
    }

    /// Dense ascending coefficients, constant term first.
    pub fn dense(&self) -> Vec<BigInt> {
        (0..=self.degree).map(|k| self.coeff(k)).collect()
    }

    /// `P_n(x)` by Horner's rule in exact rational arithmetic.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        horner_rational(&self.dense(), x)
    }

    pub fn derivative_dense(&self) -> Vec<BigInt> {
        derivative(&self.dense())
    }

    /// `P_n'(x)` exactly.
    pub fn eval_derivative_exact(&self, x: &BigRational) -> BigRational {
        horner_rational(&self.derivative_dense(), x)
    }

    pub fn normalized(&self) -> NormalizedPolynomial {
        let fact = factorial(self.degree);
        NormalizedPolynomial {
            degree: self.degree,
            coeffs: self
                .dense()
                .into_iter()
                .map(|c| BigRational::new(c, fact.clone()))
                .collect(),
        }
    }

    /// Checks the coefficient invariants: `c_n = n!`, `c_1 = 1`, positivity, `P_n(-1) = (-1)^n`.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.degree;
        let fail = |what: &str| Err(Error::InvalidArgument(format!("P_{n}: {what}")));
        if n == 0 {
            return Ok(());
        }
        if self.coeffs[n - 1] != factorial(n) {
            return fail("leading coefficient is not n!");
        }
        if !self.coeffs[0].is_one() {
            return fail("linear coefficient is not 1");
        }
        if self.coeffs.iter().any(|c| !c.is_positive()) {
            return fail("non-positive coefficient");
        }
        let alternating: BigInt = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if (i + 1) % 2 == 0 { c.clone() } else { -c })
            .sum();
        let expected = if n % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        if alternating != expected {
            return fail("P_n(-1) != (-1)^n");
        }
        Ok(())
    }

    pub fn to_export(&self) -> CoeffExport {
        let coeffs = if self.degree == 0 {
            vec!["1".to_string()]
        } else {
            self.coeffs.iter().map(|c| c.to_string()).collect()
        };
        CoeffExport {
            n: self.degree,
            coeffs,
        }
    }
}

/// JSON export schema `{"n": int, "coeffs": [decimal strings c_1..c_n]}`.
///
/// For `n = 0` the list holds the single constant term `"1"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffExport {
    pub n: usize,
    pub coeffs: Vec<String>,
}

impl CoeffExport {
    pub fn to_polynomial(&self) -> Result<GeometricPolynomial> {
        let parsed = self
            .coeffs
            .iter()
            .map(|c| {
                c.parse::<BigInt>()
                    .map_err(|_| Error::InvalidArgument(format!("bad coefficient `{c}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if self.n == 0 {
            return Ok(GeometricPolynomial::one());
        }
        if parsed.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, found {}",
                self.n,
                parsed.len()
            )));
        }
        Ok(GeometricPolynomial {
            degree: self.n,
            coeffs: parsed,
        })
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficients `C(n, k)` for `n <= n_max`, immutable once built.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    rows: Vec<Vec<BigInt>>,
}

impl BinomialTable {
    pub fn new(n_max: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
        rows.push(vec![BigInt::one()]);
        for n in 1..=n_max {
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(BigInt::one());
            for k in 1..n {
                row.push(&prev[k - 1] + &prev[k]);
            }
            row.push(BigInt::one());
            rows.push(row);
        }
        BinomialTable { rows }
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn get(&self, n: usize, k: usize) -> &BigInt {
        &self.rows[n][k]
    }
}

/// Stirling numbers of the second kind `S(n, k)` for `n <= n_max`.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    rows: Vec<Vec<BigInt>>,
}

impl StirlingTable {
    /// Fills the triangle with `S(n+1, k) = k S(n, k) + S(n, k-1)`.
    pub fn new(n_max: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
        rows.push(vec![BigInt::one()]);
        for n in 1..=n_max {
            let prev = &rows[n - 1];
            let row: Vec<BigInt> = (0..=n)
                .map(|k| {
                    let stay = if k < n {
                        &prev[k] * BigInt::from(k)
                    } else {
                        BigInt::zero()
                    };
                    let grow = if k >= 1 {
                        prev[k - 1].clone()
                    } else {
                        BigInt::zero()
                    };
                    stay + grow
                })
                .collect();
            rows.push(row);
        }
        StirlingTable { rows }
    }

    pub fn get(&self, n: usize, k: usize) -> &BigInt {
        &self.rows[n][k]
    }
}

/// `P_0..P_N` from `P_n = z * sum_{k<n} C(n,k) P_k`.
pub fn gen_recurrence(n_max: usize) -> Vec<GeometricPolynomial> {
    let binom = BinomialTable::new(n_max);
    let mut dense: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
    dense.push(vec![BigInt::one()]);
    for n in 1..=n_max {
        // coefficient of z^j in P_n is the coefficient of z^{j-1} in the binomial sum
        let mut sum = vec![BigInt::zero(); n];
        for (k, pk) in dense.iter().enumerate() {
            let c = binom.get(n, k);
            for (j, a) in pk.iter().enumerate() {
                if !a.is_zero() {
                    sum[j] += c * a;
                }
            }
        }
        let mut next = Vec::with_capacity(n + 1);
        next.push(BigInt::zero());
        next.extend(sum);
        dense.push(next);
    }
    dense.into_iter().map(GeometricPolynomial::from_dense).collect()
}

/// `P_0..P_N` with `c_k = k! S(n,k)`.
pub fn gen_stirling(n_max: usize) -> Vec<GeometricPolynomial> {
    let stirling = StirlingTable::new(n_max);
    let factorials: Vec<BigInt> = (0..=n_max).map(factorial).collect();
    (0..=n_max)
        .map(|n| {
            if n == 0 {
                return GeometricPolynomial::one();
            }
            GeometricPolynomial {
                degree: n,
                coeffs: (1..=n).map(|k| &factorials[k] * stirling.get(n, k)).collect(),
            }
        })
        .collect()
}

/// `P_0..P_N` from `P_n = z d/dz ((1+z) P_{n-1})`.
pub fn gen_derivative(n_max: usize) -> Vec<GeometricPolynomial> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(GeometricPolynomial::one());
    for n in 1..=n_max {
        let prev = out[n - 1].dense();
        let r = mul_one_plus_z(&prev);
        let mut next = vec![BigInt::zero()];
        next.extend(derivative(&r));
        out.push(GeometricPolynomial::from_dense(next));
    }
    out
}

fn mul_one_plus_z(p: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.len() + 1];
    for (i, a) in p.iter().enumerate() {
        out[i] += a;
        out[i + 1] += a;
    }
    out
}

/// Exact derivative of a dense ascending coefficient list.
pub fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    if p.len() <= 1 {
        return vec![BigInt::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, a)| a * BigInt::from(i))
        .collect()
}

pub fn horner_rational(dense: &[BigInt], x: &BigRational) -> BigRational {
    // Homogeneous integer Horner on x = p/q, one division at the end.
    let (p, q) = (x.numer(), x.denom());
    let d = dense.len().saturating_sub(1);
    let mut acc = BigInt::zero();
    let mut qpow = BigInt::one();
    for a in dense.iter().rev() {
        acc = acc * p + a * &qpow;
        qpow *= q;
    }
    BigRational::new(acc, num_traits::pow(q.clone(), d))
}

/// `2^(k d) * D(m / 2^k)` as an exact integer, for integer `D` of degree `d`.
pub(crate) fn scaled_eval_dyadic(dense: &[BigInt], x: &Dyadic) -> BigInt {
    let k = x.exp();
    let m = x.numer();
    let mut acc = BigInt::zero();
    let mut shift = 0u64;
    for a in dense.iter().rev() {
        acc = acc * m + (a << shift);
        shift += k;
    }
    acc
}

/// Sign of an integer polynomial at a dyadic point, exactly.
pub fn sign_at_dyadic(dense: &[BigInt], x: &Dyadic) -> Ordering {
    scaled_eval_dyadic(dense, x).cmp(&BigInt::zero())
}

/// `P_n(x)` exactly.
pub fn eval_exact(p: &GeometricPolynomial, x: &BigRational) -> BigRational {
    p.eval_exact(x)
}

/// `P_n(1)`, the n-th Fubini (ordered Bell) number.
pub fn fubini_number(n: usize) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    gen_stirling(n)[n].coeffs.iter().sum()
}

/// Exact check of `(1+z) P_n(z) = (-1)^n z P_n(-1-z)`.
pub fn check_symmetry(p: &GeometricPolynomial, z: &BigRational) -> Result<bool> {
    if p.degree == 0 {
        return Err(Error::DomainViolation(
            "the symmetry identity requires n >= 1".into(),
        ));
    }
    let one = BigRational::one();
    let lhs = (&one + z) * p.eval_exact(z);
    let reflected = -(&one + z);
    let mut rhs = z * p.eval_exact(&reflected);
    if p.degree % 2 == 1 {
        rhs = -rhs;
    }
    Ok(lhs == rhs)
}

/// Exact check of `P'(z)/P(z) + P'(-1-z)/P(-1-z) = 1/(z(1+z))`.
pub fn check_logderiv_identity(p: &GeometricPolynomial, z: &BigRational) -> Result<bool> {
    let one = BigRational::one();
    let reflected = -(&one + z);
    if z.is_zero() || reflected.is_zero() {
        return Err(Error::DomainViolation(format!(
            "z = {z} is excluded from the logarithmic-derivative identity"
        )));
    }
    let pz = p.eval_exact(z);
    let pr = p.eval_exact(&reflected);
    if pz.is_zero() || pr.is_zero() {
        return Err(Error::DomainViolation(format!(
            "P_{} vanishes at z = {z} or at -1-z",
            p.degree
        )));
    }
    let lhs = p.eval_derivative_exact(z) / pz + p.eval_derivative_exact(&reflected) / pr;
    let rhs = one / (z * (BigRational::one() + z));
    Ok(lhs == rhs)
}

/// `P_n / n!` with exact rational coefficients (dense, constant term first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedPolynomial {
    degree: usize,
    coeffs: Vec<BigRational>,
}

impl NormalizedPolynomial {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }
}

/// `p_0..p_N` from `p_n = z * sum_{k<n} p_k / (n-k)!`.
pub fn normalized_family(n_max: usize) -> Vec<NormalizedPolynomial> {
    let inv_fact: Vec<BigRational> = (0..=n_max)
        .map(|k| BigRational::new(BigInt::one(), factorial(k)))
        .collect();
    let mut out: Vec<NormalizedPolynomial> = Vec::with_capacity(n_max + 1);
    out.push(NormalizedPolynomial {
        degree: 0,
        coeffs: vec![BigRational::one()],
    });
    for n in 1..=n_max {
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for (k, pk) in out.iter().enumerate() {
            let w = &inv_fact[n - k];
            for (j, a) in pk.coeffs.iter().enumerate() {
                if !a.is_zero() {
                    coeffs[j + 1] += a * w;
                }
            }
        }
        out.push(NormalizedPolynomial { degree: n, coeffs });
    }
    out
}

/// A floating value of `P_n(z)/n!` with its certified relative error bound.
#[derive(Debug, Clone)]
pub struct NormalizedValue {
    pub value: HpComplex,
    /// Horner condition number `sum |a_k||z|^k / |p(z)|`.
    pub condition: f64,
    pub rel_error_bound: f64,
}

/// Evaluates `P_n(z)/n!` by Horner's rule at the working precision of `hp`.
///
/// The reported bound is `2^(1-p) (2n+1) cond(z)`; it fails with
/// `PrecisionLoss` when it exceeds `tolerance`.
pub fn eval_normalized(
    p: &NormalizedPolynomial,
    z: &ComplexRational,
    hp: &mut Hp,
    tolerance: Option<f64>,
) -> Result<NormalizedValue> {
    let zc = HpComplex::from_rationals(hp, &z.re, &z.im);
    let coeffs: Vec<BigFloat> = p.coeffs.iter().map(|c| hp.from_rational(c)).collect();
    let mut acc = HpComplex::real(hp, hp.zero());
    for a in coeffs.iter().rev() {
        acc = acc.mul(hp, &zc);
        acc.re = hp.add(&acc.re, a);
    }
    // Absolute-value polynomial at |z|: positive terms, no cancellation.
    let zabs = zc.abs(hp);
    let mut abs_acc = hp.zero();
    for a in coeffs.iter().rev() {
        abs_acc = hp.add(&hp.mul(&abs_acc, &zabs), &a.abs());
    }
    let ln_value = 0.5 * crate::hp::ln_abs(&acc.norm_sqr(hp));
    let condition = (crate::hp::ln_abs(&abs_acc) - ln_value).exp();
    let rel_error_bound = 2.0 * hp.unit_roundoff() * (2 * p.degree + 1) as f64 * condition;
    if let Some(tol) = tolerance {
        if !(rel_error_bound <= tol) {
            return Err(Error::PrecisionLoss {
                bound: rel_error_bound,
                tolerance: tol,
            });
        }
    }
    Ok(NormalizedValue {
        value: acc,
        condition,
        rel_error_bound,
    })
}
