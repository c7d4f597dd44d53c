//! Argument parsers for complex points and enclosure widths.

use geopoly::dyadic::parse_rational;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed};

/// Parses `a`, `bi`, `a+bi` or `a-bi` with decimal components (`i` alone means `1i`).
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number `{s}` (expected a+bi)");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split before the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse().map_err(|_| bad())?,
    };
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// Parses a positive width given as `2^-k`, `p/q` or a decimal.
pub fn parse_width(s: &str) -> Result<BigRational, String> {
    let t = s.trim();
    let r = if let Some(k) = t.strip_prefix("2^-") {
        let k: usize = k.parse().map_err(|_| format!("bad exponent in `{s}`"))?;
        BigRational::new(BigInt::one(), BigInt::one() << k)
    } else {
        parse_rational(t).map_err(|e| e.to_string())?
    };
    if !r.is_positive() {
        return Err(format!("width must be positive, got `{s}`"));
    }
    Ok(r)
}

/// Parses `a,b` with `a < b`.
pub fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let bad = || format!("cannot parse interval `{s}` (expected a,b with a < b)");
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a < b) {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn parse_rational_arg(s: &str) -> Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}
