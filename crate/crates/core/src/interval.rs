//! Certified real intervals with dyadic fixed-point endpoints.
//!
//! An [`Interval`] at precision `p` is the closed set
//! `[lo * 2^-p, hi * 2^-p]` for integers `lo <= hi`. Every operation rounds
//! outward, so the result always contains the exact image of every point of
//! the inputs. Binary operations require both operands at the same precision.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 128;
/// Hard ceiling for adaptive refinement.
pub const MAX_PRECISION: u32 = 4096;
/// Smallest precision accepted from callers.
pub const MIN_PRECISION: u32 = 32;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn floor_shr(x: &BigInt, s: u32) -> BigInt {
    // BigInt >> rounds toward negative infinity.
    x >> s
}

fn ceil_shr(x: &BigInt, s: u32) -> BigInt {
    -((-x) >> s)
}

impl Interval {
    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        let v: BigInt = n.into() << prec;
        Interval { lo: v.clone(), hi: v, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_int(0, prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    /// Tightest enclosure of `num / den` at `prec` bits.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num.clone(), den.clone()) };
        let scaled = num << prec;
        Interval { lo: scaled.div_floor(&den), hi: scaled.div_ceil(&den), prec }
    }

    /// Builds an interval from raw fixed-point endpoints.
    pub fn from_raw(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        assert!(lo <= hi, "inverted interval");
        Interval { lo, hi, prec }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn lo_raw(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_raw(&self) -> &BigInt {
        &self.hi
    }

    /// Both operands at the larger of the two precisions, when they differ.
    fn aligned(&self, other: &Self) -> Option<(Self, Self)> {
        (self.prec != other.prec).then(|| {
            let p = self.prec.max(other.prec);
            (self.with_precision(p), other.with_precision(p))
        })
    }

    /// Re-expresses the interval at another precision, rounding outward.
    pub fn with_precision(&self, prec: u32) -> Self {
        if prec >= self.prec {
            let s = prec - self.prec;
            Interval { lo: &self.lo << s, hi: &self.hi << s, prec }
        } else {
            let s = self.prec - prec;
            Interval { lo: floor_shr(&self.lo, s), hi: ceil_shr(&self.hi, s), prec }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if let Some((a, b)) = self.aligned(other) {
            return a.add(&b);
        }
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi, prec: self.prec }
    }

    pub fn sub(&self, other: &Self) -> Self {
        if let Some((a, b)) = self.aligned(other) {
            return a.sub(&b);
        }
        Interval { lo: &self.lo - &other.hi, hi: &self.hi - &other.lo, prec: self.prec }
    }

    pub fn neg(&self) -> Self {
        Interval { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if let Some((a, b)) = self.aligned(other) {
            return a.mul(&b);
        }
        let products = [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        let min = products.iter().min().unwrap();
        let max = products.iter().max().unwrap();
        Interval { lo: floor_shr(min, self.prec), hi: ceil_shr(max, self.prec), prec: self.prec }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if a <= b {
            Interval { lo: a, hi: b, prec: self.prec }
        } else {
            Interval { lo: b, hi: a, prec: self.prec }
        }
    }

    pub fn square(&self) -> Self {
        let m = self.abs();
        let lo = if self.contains_zero() { BigInt::zero() } else { floor_shr(&(&m.lo * &m.lo), self.prec) };
        Interval { lo, hi: ceil_shr(&(&m.hi * &m.hi), self.prec), prec: self.prec }
    }

    /// Quotient, or `None` when the divisor interval contains zero.
    pub fn div(&self, other: &Self) -> Option<Self> {
        if let Some((a, b)) = self.aligned(other) {
            return a.div(&b);
        }
        if other.contains_zero() {
            return None;
        }
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for a in [&self.lo, &self.hi] {
            let scaled = a << self.prec;
            for b in [&other.lo, &other.hi] {
                let f = scaled.div_floor(b);
                let c = scaled.div_ceil(b);
                if lo.as_ref().is_none_or(|l| &f < l) {
                    lo = Some(f);
                }
                if hi.as_ref().is_none_or(|h| &c > h) {
                    hi = Some(c);
                }
            }
        }
        Some(Interval { lo: lo.unwrap(), hi: hi.unwrap(), prec: self.prec })
    }

    /// Divides by a nonzero integer.
    pub fn div_int(&self, k: &BigInt) -> Self {
        assert!(!k.is_zero(), "division by zero");
        let (lo, hi) = if k.is_positive() { (&self.lo, &self.hi) } else { (&self.hi, &self.lo) };
        Interval { lo: lo.div_floor(k), hi: hi.div_ceil(k), prec: self.prec }
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            Interval { lo: BigInt::zero(), hi: (-&self.lo).max(self.hi.clone()), prec: self.prec }
        }
    }

    /// Square root; negative parts of the input are clamped to zero. Returns
    /// `None` if the whole interval is negative.
    pub fn sqrt(&self) -> Option<Self> {
        if self.hi.is_negative() {
            return None;
        }
        let lo_in = if self.lo.is_negative() { BigInt::zero() } else { self.lo.clone() };
        let lo = (lo_in << self.prec).sqrt();
        let hi_in = &self.hi << self.prec;
        let mut hi = hi_in.sqrt();
        if &hi * &hi < hi_in {
            hi += 1;
        }
        Some(Interval { lo, hi, prec: self.prec })
    }

    /// Natural logarithm; `None` unless the interval is strictly positive.
    pub fn ln(&self) -> Option<Self> {
        if !self.lo.is_positive() {
            return None;
        }
        let at_lo = ln_dyadic(&self.lo, self.prec, self.prec);
        // ln(hi) <= ln(lo) + (hi - lo) / lo
        let gap = ((&self.hi - &self.lo) << self.prec).div_ceil(&self.lo);
        Some(Interval { lo: at_lo.lo, hi: at_lo.hi + gap, prec: self.prec })
    }

    /// Convex hull.
    pub fn hull(&self, other: &Self) -> Self {
        if let Some((a, b)) = self.aligned(other) {
            return a.hull(&b);
        }
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            prec: self.prec,
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// `Some(+1)` / `Some(-1)` when the sign is certain, `Some(0)` for the
    /// exact point zero, `None` otherwise.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    /// Every point of `self` is strictly below every point of `other`.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        if let Some((a, b)) = self.aligned(other) {
            return a.certainly_lt(&b);
        }
        self.hi < other.lo
    }

    pub fn certainly_gt(&self, other: &Self) -> bool {
        other.certainly_lt(self)
    }

    /// Every point of `self` is `<=` every point of `other`.
    pub fn certainly_le(&self, other: &Self) -> bool {
        if let Some((a, b)) = self.aligned(other) {
            return a.certainly_le(&b);
        }
        self.hi <= other.lo
    }

    pub fn contains(&self, other: &Self) -> bool {
        if let Some((a, b)) = self.aligned(other) {
            return a.contains(&b);
        }
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        if let Some((a, b)) = self.aligned(other) {
            return a.overlaps(&b);
        }
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// True when the width is below `2^(1 - bits)`.
    pub fn width_below(&self, bits: u32) -> bool {
        let w = &self.hi - &self.lo;
        let shift = self.prec as i64 + 1 - bits as i64;
        if shift < 0 {
            return w.is_zero();
        }
        w < (BigInt::one() << shift as u32)
    }

    pub fn lo_f64(&self) -> f64 {
        dyadic_to_f64(&self.lo, self.prec)
    }

    pub fn hi_f64(&self) -> f64 {
        dyadic_to_f64(&self.hi, self.prec)
    }

    pub fn mid_f64(&self) -> f64 {
        dyadic_to_f64(&(&self.lo + &self.hi), self.prec + 1)
    }

    pub fn radius_f64(&self) -> f64 {
        dyadic_to_f64(&(&self.hi - &self.lo), self.prec + 1)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Interval({} @{} bits)", self, self.prec)
    }
}

impl fmt::Display for Interval {
    /// Midpoint with 17 significant digits and a radius.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:.1e}", format_sig17(self.mid_f64()), self.radius_f64())
    }
}

/// Formats with 17 significant digits, the round-trip width of an `f64`.
pub fn format_sig17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Nearest `f64` to `m * 2^-shift` (not certified; for display only).
pub fn dyadic_to_f64(m: &BigInt, shift: u32) -> f64 {
    if m.is_zero() {
        return 0.0;
    }
    let bits = m.bits();
    let mut exp = -(shift as i64);
    let mant = if bits > 64 {
        exp += (bits - 64) as i64;
        m >> (bits - 64) as u32
    } else {
        m.clone()
    };
    let v = mant.to_f64().unwrap();
    let mut e = exp;
    let mut out = v;
    while e > 0 {
        let step = e.min(1000);
        out *= 2f64.powi(step as i32);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(1000);
        out *= 2f64.powi(-(step as i32));
        e += step;
    }
    out
}

/// Fixed-point enclosure `[lo, hi] * 2^-w` of `atanh(num/den)` for
/// `0 <= num/den <= 1/3`.
fn atanh_small(num: &BigInt, den: &BigInt, w: u32) -> (BigInt, BigInt) {
    debug_assert!(!num.is_negative() && BigInt::from(3) * num <= *den);
    if num.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    // tail after N terms < (1/3)^(2N+3) * 9/8 <= 2^-w once 2N+3 > (w+1)/log2(3)
    let n_terms = ((w as f64 + 2.0) / 3.1) as u64 + 2;
    // fixed point at w bits, every rounding downward; x <= 1/3 keeps the
    // accumulated deficit of each power below 4 ulps
    let x = (num << w).div_floor(den);
    let x2 = (&x * &x) >> w;
    let mut p = x;
    let mut sum = BigInt::zero();
    for i in 0..=n_terms {
        sum += p.div_floor(&BigInt::from(2 * i + 1));
        p = (&p * &x2) >> w;
        if p.is_zero() {
            break;
        }
    }
    // each term undershoots by < 5 ulps, tail < 1 ulp
    let slack = BigInt::from(5 * (n_terms + 1) + 1);
    let hi = &sum + slack;
    (sum, hi)
}

fn ln2_cache() -> &'static Mutex<HashMap<u32, Arc<Interval>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Interval>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Enclosure of ln 2 at `w` bits.
pub fn ln2(w: u32) -> Interval {
    if let Some(v) = ln2_cache().lock().unwrap().get(&w) {
        return (**v).clone();
    }
    let (lo, hi) = atanh_small(&BigInt::one(), &BigInt::from(3), w);
    let v = Interval { lo: lo << 1, hi: hi << 1, prec: w };
    ln2_cache().lock().unwrap().insert(w, Arc::new(v.clone()));
    v
}

/// Enclosure of `ln(a * 2^-p)` at `out` bits, for `a > 0`.
fn ln_dyadic(a: &BigInt, p: u32, out: u32) -> Interval {
    let bits = a.bits();
    let k = bits as i64 - 1 - p as i64;
    let guard = 16 + (64 - k.unsigned_abs().leading_zeros());
    let w = out + guard;
    let half = BigInt::one() << (bits - 1) as u32;
    let (tlo, thi) = atanh_small(&(a - &half), &(a + &half), w);
    let ln_m = Interval { lo: tlo << 1, hi: thi << 1, prec: w };
    let total = ln2(w).mul_int(&BigInt::from(k)).add(&ln_m);
    total.with_precision(out)
}

/// Runs `attempt` at doubling precision from `start` until it decides or
/// `max` is exceeded.
pub fn refine<T>(start: u32, max: u32, mut attempt: impl FnMut(u32) -> Option<T>) -> Result<T> {
    let mut prec = start.max(MIN_PRECISION);
    loop {
        if let Some(v) = attempt(prec) {
            return Ok(v);
        }
        if prec >= max {
            return Err(Error::Undecided { precision: prec });
        }
        prec = (prec * 2).min(max);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(x: i64, prec: u32) -> Interval {
        Interval::from_int(x, prec)
    }

    #[test]
    fn shifts_round_outward() {
        let x = BigInt::from(-5);
        assert_eq!(floor_shr(&x, 1), BigInt::from(-3));
        assert_eq!(ceil_shr(&x, 1), BigInt::from(-2));
        assert_eq!(floor_shr(&BigInt::from(5), 1), BigInt::from(2));
        assert_eq!(ceil_shr(&BigInt::from(5), 1), BigInt::from(3));
    }

    #[test]
    fn sqrt2_encloses() {
        let s = iv(2, 128).sqrt().unwrap();
        assert!(s.width_below(126));
        assert!((s.mid_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
        // square of the enclosure contains 2
        assert!(s.mul(&s).contains(&iv(2, 128)));
    }

    #[test]
    fn ln_matches_std() {
        for &(n, d) in &[(1i64, 1i64), (2, 1), (3, 7), (1000, 3), (1, 1000000), (577, 408)] {
            let x = Interval::from_ratio(&BigInt::from(n), &BigInt::from(d), 100);
            let l = x.ln().unwrap();
            let want = (n as f64 / d as f64).ln();
            assert!((l.mid_f64() - want).abs() < 1e-14, "{n}/{d}: {} vs {want}", l.mid_f64());
            assert!(l.width_below(70));
        }
        let l1 = iv(1, 64).ln().unwrap();
        assert!(l1.contains(&iv(0, 64)));
    }

    #[test]
    fn ln2_digits() {
        // 0.6931471805599453094172321214581765680755...
        let l = ln2(200);
        let lo = Interval::from_ratio(
            &"6931471805599453094172321214581765680754".parse().unwrap(),
            &BigInt::from(10).pow(40),
            200,
        );
        let hi = Interval::from_ratio(
            &"6931471805599453094172321214581765680756".parse().unwrap(),
            &BigInt::from(10).pow(40),
            200,
        );
        assert!(lo.certainly_lt(&l) && l.certainly_lt(&hi));
    }

    #[test]
    fn division_excludes_zero_divisor() {
        let a = iv(1, 64);
        let z = Interval::from_raw(BigInt::from(-1), BigInt::from(1), 64);
        assert!(a.div(&z).is_none());
        let third = a.div(&iv(3, 64)).unwrap();
        assert!((third.mid_f64() - 1.0 / 3.0).abs() < 1e-18);
        let neg = a.div(&iv(-3, 64)).unwrap();
        assert_eq!(neg.sign(), Some(-1));
    }

    #[test]
    fn abs_and_sign() {
        assert_eq!(iv(-4, 32).abs(), iv(4, 32));
        assert_eq!(iv(4, 32).abs(), iv(4, 32));
        let straddle = Interval::from_raw(BigInt::from(-3), BigInt::from(5), 32);
        assert_eq!(straddle.abs().lo_raw(), &BigInt::zero());
        assert_eq!(straddle.sign(), None);
        assert_eq!(iv(0, 32).sign(), Some(0));
    }

    #[test]
    fn refine_reports_precision() {
        let err = refine(32, 128, |_| None::<()>).unwrap_err();
        assert!(matches!(err, Error::Undecided { precision: 128 }));
        let got = refine(32, 4096, |p| (p >= 256).then_some(p)).unwrap();
        assert_eq!(got, 256);
    }

    #[test]
    fn display_has_17_digits() {
        let s = iv(2, 128).sqrt().unwrap().to_string();
        assert!(s.starts_with("1.4142135623730951e0"), "{s}");
    }
}
