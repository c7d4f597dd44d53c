//! Dyadic rationals `m / 2^k`.
//!
//! Bisection from integer endpoints only ever produces dyadic points, so the
//! root isolator works in this representation: midpoints are a shift, sign
//! evaluation reduces to a single integer Horner pass, and the decimal
//! expansion of every endpoint is finite and exact.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u64,
}

impl Dyadic {
    pub fn new(num: BigInt, exp: u64) -> Self {
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn zero() -> Self {
        Dyadic::from_int(0)
    }

    pub fn minus_one() -> Self {
        Dyadic::from_int(-1)
    }

    pub fn minus_half() -> Self {
        Dyadic::new(BigInt::from(-1), 1)
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u64) -> Self {
        Dyadic::new(BigInt::one(), k)
    }

    /// Exact conversion; every finite `f64` is dyadic.
    pub fn from_f64(v: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite value {v}")));
        }
        if v == 0.0 {
            return Ok(Dyadic::zero());
        }
        let bits = v.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let mut num = BigInt::from(mant);
        if negative {
            num = -num;
        }
        Ok(if e >= 0 {
            Dyadic::new(num << (e as u64), 0)
        } else {
            Dyadic::new(num, (-e) as u64)
        })
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(self.exp);
        if tz > 0 {
            self.num >>= tz;
            self.exp -= tz;
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    /// Power of two in the denominator.
    pub fn exp(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.num.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Both operands rescaled to the common denominator `2^e`.
    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, u64) {
        let e = self.exp.max(other.exp);
        (
            &self.num << (e - self.exp),
            &other.num << (e - other.exp),
            e,
        )
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a - b, e)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            num: -&self.num,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    /// `-1 - x`, the reflection about `-1/2`.
    pub fn mirror(&self) -> Dyadic {
        Dyadic::minus_one().sub(self)
    }

    /// `1 + x`.
    pub fn one_plus(&self) -> Dyadic {
        self.add(&Dyadic::from_int(1))
    }

    pub fn midpoint(a: &Dyadic, b: &Dyadic) -> Dyadic {
        let (x, y, e) = a.aligned(b);
        Dyadic::new(x + y, e + 1)
    }

    /// The point of `[a, b]` with the fewest fractional bits.
    pub fn simplest_in(a: &Dyadic, b: &Dyadic) -> Dyadic {
        debug_assert!(a <= b);
        let (x, y, e) = a.aligned(b);
        let mut k = 0;
        loop {
            // ceil(a * 2^k); BigInt shifts round toward -inf
            let c = -((-&x) >> (e - k));
            if (&c << (e - k)) <= y {
                return Dyadic::new(c, k);
            }
            k += 1;
        }
    }

    /// `x * 2^-k`.
    pub fn shr(&self, k: u64) -> Dyadic {
        Dyadic::new(self.num.clone(), self.exp + k)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::one() << self.exp)
    }

    /// Compares against an arbitrary rational without building a reduced fraction.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        // num / 2^exp  vs  p / q with q > 0
        let lhs = &self.num * r.denom();
        let rhs = r.numer() << self.exp;
        lhs.cmp(&rhs)
    }

    /// Nearest-ish `f64`; magnitudes far outside the `f64` range saturate.
    pub fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        let (mant, shift) = top_bits(&self.num);
        ldexp(mant, shift - self.exp as i64)
    }

    /// `ln |x|`, accurate even when `|x|` under- or overflows `f64`.
    pub fn ln_abs(&self) -> f64 {
        if self.num.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (mant, shift) = top_bits(&self.num);
        mant.abs().ln() + (shift - self.exp as i64) as f64 * std::f64::consts::LN_2
    }

    /// Exact finite decimal expansion (`m / 2^k = m * 5^k / 10^k`).
    pub fn to_decimal_string(&self) -> String {
        if self.exp == 0 {
            return self.num.to_string();
        }
        let scaled = self.num.abs() * num_traits::pow(BigInt::from(5), self.exp as usize);
        let digits = scaled.to_string();
        let k = self.exp as usize;
        let (int_part, frac_part) = if digits.len() > k {
            let split = digits.len() - k;
            (digits[..split].to_string(), digits[split..].to_string())
        } else {
            ("0".to_string(), format!("{}{}", "0".repeat(k - digits.len()), digits))
        };
        let sign = if self.num.is_negative() { "-" } else { "" };
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Leading 64 bits of `v` as an `f64` together with the binary shift dropped.
fn top_bits(v: &BigInt) -> (f64, i64) {
    let bits = v.bits();
    let shift = bits.saturating_sub(64);
    let top = (v >> shift).to_f64().unwrap_or(0.0);
    (top, shift as i64)
}

pub(crate) fn ldexp(mut m: f64, mut e: i64) -> f64 {
    // Apply the exponent in steps to avoid intermediate overflow of 2^e.
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
        if m.is_infinite() {
            return m;
        }
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
        if m == 0.0 {
            return m;
        }
    }
    m * 2f64.powi(e as i32)
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

/// Rational written with the smallest representation: `p` or `p/q`.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `p/q`, or a decimal such as `-0.125` / `2.5e-3` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse rational `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::InvalidArgument(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        r = -r;
    }
    Ok(r)
}

/// Smallest `k` with `2^-k <= r` for `r > 0`.
pub fn floor_log2_inverse(r: &BigRational) -> u64 {
    let (p, q) = (r.numer(), r.denom());
    let mut k = 0u64;
    let guess = q.bits().saturating_sub(p.bits());
    if guess > 1 {
        k = guess - 1;
    }
    while (p << k) < *q {
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplest_point() {
        let d = |n: i64, e: u64| Dyadic::new(BigInt::from(n), e);
        assert_eq!(Dyadic::simplest_in(&d(-7, 3), &d(-5, 3)), d(-3, 2));
        assert_eq!(Dyadic::simplest_in(&d(-7, 3), &d(-7, 3)), d(-7, 3));
        assert_eq!(Dyadic::simplest_in(&d(-3, 1), &d(1, 1)), d(-1, 0));
        assert_eq!(Dyadic::simplest_in(&d(1, 3), &d(3, 3)), d(1, 2));
    }

    #[test]
    fn decimal_expansion_is_exact() {
        assert_eq!(Dyadic::minus_half().to_decimal_string(), "-0.5");
        assert_eq!(Dyadic::new(BigInt::from(3), 3).to_decimal_string(), "0.375");
        assert_eq!(Dyadic::new(BigInt::from(-1), 10).to_decimal_string(), "-0.0009765625");
        assert_eq!(Dyadic::from_int(7).to_decimal_string(), "7");
    }

    #[test]
    fn parse_round_trips_decimal_export() {
        let d = Dyadic::new(BigInt::from(-12345), 40);
        assert_eq!(parse_rational(&d.to_decimal_string()).unwrap(), d.to_rational());
        assert_eq!(
            parse_rational("2.5e-3").unwrap(),
            BigRational::new(1.into(), 400.into())
        );
        assert_eq!(parse_rational("-7/11").unwrap(), BigRational::new((-7).into(), 11.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn from_f64_is_exact() {
        for v in [0.1, -0.75, 1e-300, 3.0e200, -5e-324] {
            let d = Dyadic::from_f64(v).unwrap();
            assert_eq!(d.to_f64(), v);
        }
    }

    #[test]
    fn ln_abs_handles_tiny_values() {
        let d = Dyadic::pow2_neg(3000);
        let expected = -3000.0 * std::f64::consts::LN_2;
        assert!((d.ln_abs() - expected).abs() < 1e-12 * expected.abs());
    }

    #[test]
    fn mirror_and_midpoint() {
        let x = Dyadic::new(BigInt::from(-3), 2);
        assert_eq!(x.mirror(), Dyadic::new(BigInt::from(-1), 2));
        assert_eq!(
            Dyadic::midpoint(&Dyadic::minus_one(), &Dyadic::zero()),
            Dyadic::minus_half()
        );
    }

    #[test]
    fn log2_depth() {
        assert_eq!(floor_log2_inverse(&Dyadic::pow2_neg(80).to_rational()), 80);
        assert_eq!(floor_log2_inverse(&BigRational::new(1.into(), 1000.into())), 10);
    }
}
