//! Certified isolation of the zeros of `P_n`.
//!
//! All zeros are simple and lie in `(-1, 0]`. Two of them are known exactly:
//! `0` for every `n >= 1` and `-1/2` for even `n`. The remaining ones come in
//! pairs `x, -1-x`, so only the left half `(-1, -1/2)` is bisected and the
//! right half is obtained by reflection.
//!
//! Brackets come from interlacing: `P_n = z ((1+z) P_{n-1})'`, so between
//! `-1`, the zeros of `P_{n-1}/z` and `0` the quotient `P_n/z` changes sign
//! exactly once. A short dyadic inside each previous enclosure serves as a
//! separating point; finding exactly as many sign changes as there are zeros
//! certifies the brackets. Every sign is an exact integer computation at a
//! dyadic point.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{rational_to_string, Dyadic};
use crate::error::{Error, Result};
use crate::poly::{gen_derivative, sign_at_dyadic, GeometricPolynomial};

/// A rational interval `[lo, hi]` on which `P_n` changes sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Enclosure {
    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn midpoint(&self) -> Dyadic {
        Dyadic::midpoint(&self.lo, &self.hi)
    }

    pub fn mirror(&self) -> Enclosure {
        Enclosure {
            lo: self.hi.mirror(),
            hi: self.lo.mirror(),
        }
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    fn overlaps(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// One zero of `P_n`: either exact or an enclosure, with a representative point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroPoint {
    /// Exact zero, or the enclosure midpoint.
    pub location: Dyadic,
    pub enclosure: Option<Enclosure>,
}

impl ZeroPoint {
    pub fn is_exact(&self) -> bool {
        self.enclosure.is_none()
    }

    fn as_interval(&self) -> Enclosure {
        self.enclosure.clone().unwrap_or_else(|| Enclosure {
            lo: self.location.clone(),
            hi: self.location.clone(),
        })
    }
}

/// All `n` zeros of `P_n`.
#[derive(Debug, Clone)]
pub struct ZeroSet {
    degree: usize,
    structural: Vec<Dyadic>,
    /// Enclosures in `(-1, -1/2)`, ascending.
    left: Vec<Enclosure>,
    width: BigRational,
    reduced: Arc<Vec<BigInt>>,
}

impl ZeroSet {
    /// The (empty) zero set of `P_0 = 1`.
    pub fn constant() -> Self {
        ZeroSet {
            degree: 0,
            structural: Vec::new(),
            left: Vec::new(),
            width: BigRational::from_integer(1.into()),
            reduced: Arc::new(vec![BigInt::from(1)]),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Exactly known zeros, ascending: `[0]` or `[-1/2, 0]`.
    pub fn structural(&self) -> &[Dyadic] {
        &self.structural
    }

    /// Upper bound on every enclosure width.
    pub fn width(&self) -> &BigRational {
        &self.width
    }

    /// All enclosures, ascending.
    pub fn enclosures(&self) -> Vec<Enclosure> {
        let mut all = self.left.clone();
        all.extend(self.left.iter().rev().map(Enclosure::mirror));
        all
    }

    /// Every zero (structural and enclosed), ascending.
    pub fn points(&self) -> Vec<ZeroPoint> {
        let mut pts: Vec<ZeroPoint> = self
            .enclosures()
            .into_iter()
            .map(|e| ZeroPoint {
                location: e.midpoint(),
                enclosure: Some(e),
            })
            .chain(self.structural.iter().map(|s| ZeroPoint {
                location: s.clone(),
                enclosure: None,
            }))
            .collect();
        pts.sort_by(|a, b| a.location.cmp(&b.location));
        pts
    }

    pub fn len(&self) -> usize {
        self.structural.len() + 2 * self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Recomputes every certificate from the raw polynomial in rational
    /// arithmetic: structural zeros vanish, enclosure endpoints have strictly
    /// opposite signs, all zeros lie in `(-1, 0]`, and the count is `n`.
    pub fn verify_certificates(&self, p: &GeometricPolynomial) -> bool {
        if p.degree() != self.degree || self.len() != self.degree {
            return false;
        }
        let zero = BigRational::zero();
        let structural_ok = self
            .structural
            .iter()
            .all(|s| p.eval_exact(&s.to_rational()).is_zero());
        let minus_one = Dyadic::minus_one();
        let enclosures_ok = self.enclosures().iter().all(|e| {
            let a = p.eval_exact(&e.lo.to_rational()).cmp(&zero);
            let b = p.eval_exact(&e.hi.to_rational()).cmp(&zero);
            e.lo > minus_one
                && e.hi.signum() < 0
                && a != Ordering::Equal
                && b != Ordering::Equal
                && a != b
        });
        structural_ok && enclosures_ok
    }

    /// Narrows every enclosure to width at most `width` by further bisection.
    pub fn refine(&self, width: &BigRational) -> Result<ZeroSet> {
        check_width(width)?;
        let mut out = self.clone();
        let stop = Stop::new(width);
        out.left = self
            .left
            .par_iter()
            .map(|e| {
                let lo_sign = sign_at_dyadic(&self.reduced, &e.lo);
                bisect(&self.reduced, e.clone(), lo_sign, &stop)
            })
            .collect();
        if width < &self.width {
            out.width = width.clone();
        }
        Ok(out)
    }

    /// Halves every left-half enclosure whose index is in `indices`.
    fn halve(&mut self, indices: &[usize]) {
        for &i in indices {
            let e = self.left[i].clone();
            let lo_sign = sign_at_dyadic(&self.reduced, &e.lo);
            self.left[i] = bisect_once(&self.reduced, e, lo_sign);
        }
    }

    pub fn to_export(&self) -> ZeroExport {
        let zeros = self
            .points()
            .into_iter()
            .map(|z| match z.enclosure {
                Some(e) => ZeroEntry::Interval {
                    lo: e.lo.to_decimal_string(),
                    hi: e.hi.to_decimal_string(),
                },
                None => ZeroEntry::Exact {
                    exact: rational_to_string(&z.location.to_rational()),
                },
            })
            .collect();
        ZeroExport {
            n: self.degree,
            zeros,
        }
    }
}

/// JSON export `{"n": int, "zeros": [{"lo","hi"} | {"exact"}]}`, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroExport {
    pub n: usize,
    pub zeros: Vec<ZeroEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ZeroEntry {
    Interval { lo: String, hi: String },
    Exact { exact: String },
}

/// Dense coefficients of `P_n / z`, further divided by `2z + 1` for even `n`.
///
/// The result is an integer polynomial that is nonzero at `-1`, `-1/2` and `0`.
pub fn reduced_polynomial(p: &GeometricPolynomial) -> Vec<BigInt> {
    let n = p.degree();
    if n == 0 {
        return vec![BigInt::from(1)];
    }
    let q: Vec<BigInt> = p.coeffs().to_vec();
    if n % 2 == 1 {
        return q;
    }
    // (2z + 1) t(z) = q(z):  t_0 = q_0,  t_i = q_i - 2 t_{i-1}
    let d = q.len() - 1;
    let mut t: Vec<BigInt> = Vec::with_capacity(d);
    for (i, qi) in q.iter().enumerate().take(d) {
        let next = if i == 0 {
            qi.clone()
        } else {
            qi - (&t[i - 1] << 1u32)
        };
        t.push(next);
    }
    debug_assert_eq!(q[d], &t[d - 1] << 1u32, "P_n/z is not divisible by 2z+1");
    t
}

fn check_width(width: &BigRational) -> Result<()> {
    if !width.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "enclosure width must be positive, got {width}"
        )));
    }
    Ok(())
}

struct Stop {
    width: BigRational,
    minus_one: Dyadic,
    minus_half: Dyadic,
}

impl Stop {
    fn new(width: &BigRational) -> Self {
        Stop {
            width: width.clone(),
            minus_one: Dyadic::minus_one(),
            minus_half: Dyadic::minus_half(),
        }
    }

    fn done(&self, e: &Enclosure) -> bool {
        e.lo > self.minus_one
            && e.hi < self.minus_half
            && e.width().cmp_rational(&self.width) != Ordering::Greater
    }
}

fn bisect_once(d: &[BigInt], e: Enclosure, lo_sign: Ordering) -> Enclosure {
    let mid = e.midpoint();
    match sign_at_dyadic(d, &mid) {
        Ordering::Equal => exact_hit(d, mid, &e.width()),
        s if s == lo_sign => Enclosure { lo: mid, hi: e.hi },
        _ => Enclosure { lo: e.lo, hi: mid },
    }
}

fn bisect(d: &[BigInt], mut e: Enclosure, mut lo_sign: Ordering, stop: &Stop) -> Enclosure {
    while !stop.done(&e) {
        let mid = e.midpoint();
        match sign_at_dyadic(d, &mid) {
            Ordering::Equal => {
                e = exact_hit(d, mid, &e.width());
                lo_sign = sign_at_dyadic(d, &e.lo);
            }
            s if s == lo_sign => {
                e.lo = mid;
                lo_sign = s;
            }
            _ => e.hi = mid,
        }
    }
    e
}

/// A dyadic point that is itself a zero: wrap it in a symmetric sign-change interval.
fn exact_hit(d: &[BigInt], x: Dyadic, around: &Dyadic) -> Enclosure {
    let mut delta = around.shr(2);
    loop {
        let lo = x.sub(&delta);
        let hi = x.add(&delta);
        let a = sign_at_dyadic(d, &lo);
        let b = sign_at_dyadic(d, &hi);
        if a != Ordering::Equal && b != Ordering::Equal && a != b {
            return Enclosure { lo, hi };
        }
        delta = delta.shr(1);
    }
}

/// Isolates the zeros of `P_n` from those of `P_{n-1}`.
pub fn isolate(p: &GeometricPolynomial, prev: &ZeroSet, width: &BigRational) -> Result<ZeroSet> {
    check_width(width)?;
    let n = p.degree();
    if n > 0 && prev.degree + 1 != n {
        return Err(Error::InvalidArgument(format!(
            "previous zero set has degree {}, expected {}",
            prev.degree,
            n - 1
        )));
    }
    let reduced = Arc::new(reduced_polynomial(p));
    let mut structural = Vec::new();
    if n >= 2 && n % 2 == 0 {
        structural.push(Dyadic::minus_half());
    }
    if n >= 1 {
        structural.push(Dyadic::zero());
    }
    let target = n.saturating_sub(1) / 2;
    let mut left = Vec::with_capacity(target);
    if target > 0 {
        let mut points = vec![Dyadic::minus_one()];
        // any separating points will do: the count check below certifies the brackets
        points.extend(prev.left.iter().map(|e| Dyadic::simplest_in(&e.lo, &e.hi)));
        points.push(Dyadic::minus_half());
        let signs: Vec<Ordering> = points
            .par_iter()
            .map(|x| sign_at_dyadic(&reduced, x))
            .collect();
        let first = signs[0];
        let last = *signs.last().unwrap_or(&Ordering::Equal);
        if first == Ordering::Equal || last == Ordering::Equal {
            return Err(Error::BracketFailure {
                degree: n,
                detail: "reduced polynomial vanishes at -1 or -1/2".into(),
            });
        }
        let kept: Vec<(Dyadic, Ordering)> = points
            .into_iter()
            .zip(signs)
            .filter(|(_, s)| *s != Ordering::Equal)
            .collect();
        let brackets: Vec<(Enclosure, Ordering)> = kept
            .windows(2)
            .filter(|w| w[0].1 != w[1].1)
            .map(|w| {
                (
                    Enclosure {
                        lo: w[0].0.clone(),
                        hi: w[1].0.clone(),
                    },
                    w[0].1,
                )
            })
            .collect();
        if brackets.len() != target {
            return Err(Error::BracketFailure {
                degree: n,
                detail: format!(
                    "found {} sign changes on (-1, -1/2), expected {target}",
                    brackets.len()
                ),
            });
        }
        let stop = Stop::new(width);
        left = brackets
            .into_par_iter()
            .map(|(e, s)| bisect(&reduced, e, s, &stop))
            .collect();
    }
    Ok(ZeroSet {
        degree: n,
        structural,
        left,
        width: width.clone(),
        reduced,
    })
}

/// True iff the nonzero zeros of `P_n` and `P_{n-1}` strictly alternate,
/// starting and ending with a zero of `P_n`.
///
/// Returns `Indeterminate` when enclosures overlap.
pub fn verify_interlace(zs_n: &ZeroSet, zs_prev: &ZeroSet) -> Result<bool> {
    if zs_n.degree != zs_prev.degree + 1 {
        return Err(Error::InvalidArgument(format!(
            "degrees {} and {} do not differ by one",
            zs_n.degree, zs_prev.degree
        )));
    }
    let nonzero = |zs: &ZeroSet| -> Vec<Enclosure> {
        zs.points()
            .into_iter()
            .filter(|p| !(p.is_exact() && p.location.is_zero()))
            .map(|p| p.as_interval())
            .collect()
    };
    let xs = nonzero(zs_n);
    let ys = nonzero(zs_prev);
    let mut merged: Vec<(Enclosure, bool)> = xs
        .into_iter()
        .map(|e| (e, true))
        .chain(ys.into_iter().map(|e| (e, false)))
        .collect();
    merged.sort_by(|a, b| a.0.lo.cmp(&b.0.lo));
    for w in merged.windows(2) {
        if w[0].0.overlaps(&w[1].0) {
            return Err(Error::Indeterminate(format!(
                "enclosures [{}, {}] and [{}, {}] overlap",
                w[0].0.lo, w[0].0.hi, w[1].0.lo, w[1].0.hi
            )));
        }
    }
    if merged.is_empty() {
        return Ok(true);
    }
    let alternates = merged
        .iter()
        .enumerate()
        .all(|(i, (_, is_n))| *is_n == (i % 2 == 0));
    Ok(alternates && merged.len() % 2 == 1)
}

/// Makes every enclosure of `a` disjoint from every enclosure of `b` by halving.
fn separate(a: &mut ZeroSet, b: &mut ZeroSet) {
    loop {
        let mut hit_a = Vec::new();
        let mut hit_b = Vec::new();
        let (ea, eb) = (a.enclosures(), b.enclosures());
        let half_a = a.left.len();
        let half_b = b.left.len();
        let fold = |i: usize, half: usize| if i < half { i } else { 2 * half - 1 - i };
        // both lists are sorted; sweep
        let (mut i, mut j) = (0, 0);
        while i < ea.len() && j < eb.len() {
            if ea[i].overlaps(&eb[j]) {
                hit_a.push(fold(i, half_a));
                hit_b.push(fold(j, half_b));
            }
            if ea[i].hi < eb[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // structural zeros of either set are points; an enclosure may not touch them
        for (set, hits, other) in [(&*a, &mut hit_a, &*b), (&*b, &mut hit_b, &*a)] {
            let half = set.left.len();
            for (i, e) in set.enclosures().iter().enumerate() {
                if other.structural.iter().any(|s| e.contains(s)) {
                    hits.push(fold(i, half));
                }
            }
        }
        if hit_a.is_empty() && hit_b.is_empty() {
            return;
        }
        hit_a.sort_unstable();
        hit_a.dedup();
        hit_b.sort_unstable();
        hit_b.dedup();
        a.halve(&hit_a);
        b.halve(&hit_b);
    }
}

/// Zero sets of `P_0..P_N`, built inductively and kept mutually disjoint so
/// that every consecutive pair can be checked for interlacing.
#[derive(Debug, Clone)]
pub struct ZeroTower {
    polys: Vec<Arc<GeometricPolynomial>>,
    sets: Vec<ZeroSet>,
}

impl ZeroTower {
    pub fn build(n_max: usize, width: &BigRational) -> Result<Self> {
        check_width(width)?;
        let polys: Vec<Arc<GeometricPolynomial>> =
            gen_derivative(n_max).into_iter().map(Arc::new).collect();
        let mut sets: Vec<ZeroSet> = Vec::with_capacity(n_max + 1);
        sets.push(ZeroSet::constant());
        for n in 1..=n_max {
            let mut attempts = 0;
            let mut next = loop {
                match isolate(&polys[n], &sets[n - 1], width) {
                    Ok(z) => break z,
                    Err(Error::BracketFailure { .. }) if attempts < 64 => {
                        // two zeros of P_n inside one enclosure of P_{n-1}
                        attempts += 1;
                        let all: Vec<usize> = (0..sets[n - 1].left.len()).collect();
                        sets[n - 1].halve(&all);
                    }
                    Err(e) => return Err(e),
                }
            };
            let (lower, _) = sets.split_at_mut(n);
            separate(&mut next, &mut lower[n - 1]);
            sets.push(next);
        }
        Ok(ZeroTower { polys, sets })
    }

    pub fn n_max(&self) -> usize {
        self.sets.len() - 1
    }

    pub fn zeros(&self, n: usize) -> &ZeroSet {
        &self.sets[n]
    }

    pub fn poly(&self, n: usize) -> &GeometricPolynomial {
        &self.polys[n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::gen_recurrence;

    fn w(k: u64) -> BigRational {
        Dyadic::pow2_neg(k).to_rational()
    }

    #[test]
    fn small_degrees_are_structural() {
        let t = ZeroTower::build(2, &w(40)).unwrap();
        assert!(t.zeros(0).is_empty());
        assert_eq!(t.zeros(1).structural(), &[Dyadic::zero()]);
        assert_eq!(
            t.zeros(2).structural(),
            &[Dyadic::minus_half(), Dyadic::zero()]
        );
        assert!(t.zeros(2).enclosures().is_empty());
    }

    #[test]
    fn degree_three_matches_quadratic_formula() {
        let t = ZeroTower::build(3, &w(40)).unwrap();
        let e = t.zeros(3).enclosures();
        assert_eq!(e.len(), 2);
        let s3 = 3f64.sqrt();
        let roots = [(-3.0 - s3) / 6.0, (-3.0 + s3) / 6.0];
        for (enc, r) in e.iter().zip(roots) {
            assert!(enc.lo.to_f64() <= r && r <= enc.hi.to_f64());
            assert!(enc.width().to_f64() <= 2f64.powi(-40));
        }
        assert!(t.zeros(3).verify_certificates(t.poly(3)));
    }

    #[test]
    fn refine_narrows_and_is_idempotent() {
        let t = ZeroTower::build(3, &w(10)).unwrap();
        let target = w(67); // < 1e-20
        let r1 = t.zeros(3).refine(&target).unwrap();
        let r2 = r1.refine(&target).unwrap();
        assert_eq!(r1.enclosures(), r2.enclosures());
        for e in r1.enclosures() {
            assert!(e.width().cmp_rational(&target) != Ordering::Greater);
        }
        let mid = r1.enclosures()[0].midpoint().to_rational();
        // (-3 - sqrt 3)/6 to 19 places
        let approx = crate::dyadic::parse_rational("-0.7886751345948128822").unwrap();
        let diff = (mid - approx).abs();
        assert!(diff < BigRational::new(1.into(), BigInt::from(10).pow(19)));
    }

    #[test]
    fn symmetric_pairs_and_interlacing() {
        let t = ZeroTower::build(12, &w(60)).unwrap();
        for n in 1..=12 {
            let zs = t.zeros(n);
            assert_eq!(zs.len(), n);
            assert!(zs.verify_certificates(t.poly(n)), "n = {n}");
            let e = zs.enclosures();
            for (a, b) in e.iter().zip(e.iter().rev()) {
                assert_eq!(a.lo.add(&b.hi), Dyadic::minus_one());
            }
            assert!(verify_interlace(zs, t.zeros(n - 1)).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn interlace_examples() {
        let t = ZeroTower::build(6, &w(50)).unwrap();
        assert!(verify_interlace(t.zeros(3), t.zeros(2)).unwrap());
        assert!(verify_interlace(t.zeros(2), t.zeros(1)).unwrap());
        assert!(verify_interlace(t.zeros(6), t.zeros(5)).unwrap());
        assert!(verify_interlace(t.zeros(6), t.zeros(4)).is_err());
    }

    #[test]
    fn coarse_enclosures_are_indeterminate() {
        let p = gen_recurrence(4);
        let z1 = isolate(&p[1], &ZeroSet::constant(), &w(1)).unwrap();
        let z2 = isolate(&p[2], &z1, &w(1)).unwrap();
        let z3 = isolate(&p[3], &z2, &BigRational::new(1.into(), 2.into())).unwrap();
        // width 1/2 leaves the left enclosure of P_3 as wide as the bracket allows
        let z4 = isolate(&p[4], &z3, &BigRational::new(1.into(), 2.into())).unwrap();
        match verify_interlace(&z4, &z3) {
            Err(Error::Indeterminate(_)) | Ok(true) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn even_reduction_divides_exactly() {
        let p = gen_recurrence(10);
        for n in (2..=10).step_by(2) {
            let t = reduced_polynomial(&p[n]);
            assert_eq!(t.len(), n - 1);
            assert!(sign_at_dyadic(&t, &Dyadic::minus_half()) != Ordering::Equal);
        }
    }

    #[test]
    fn export_is_sorted_and_exact() {
        let t = ZeroTower::build(4, &w(30)).unwrap();
        let e = t.zeros(4).to_export();
        assert_eq!(e.zeros.len(), 4);
        assert_eq!(e.zeros[1], ZeroEntry::Exact { exact: "-1/2".into() });
        assert_eq!(e.zeros[3], ZeroEntry::Exact { exact: "0".into() });
        let json = serde_json::to_string(&t.zeros(2).to_export()).unwrap();
        assert_eq!(json, r#"{"n":2,"zeros":[{"exact":"-1/2"},{"exact":"0"}]}"#);
    }

    #[test]
    fn rejects_bad_width() {
        assert!(ZeroTower::build(3, &BigRational::zero()).is_err());
    }
}
