//! Exact arithmetic in `Q(X_n)` and its ring of integers `Z[X_n]`, where
//! `X_n = 2cos(2π/2^(n+2))`.
//!
//! Elements are stored in the power basis `1, X_n, ..., X_n^(2^n - 1)` as an
//! integer coefficient vector over one positive common denominator, always
//! reduced modulo the minimal polynomial `f_n`. Because `Z[X_n]` is the full
//! ring of integers, an element is integral exactly when the denominator is 1.
//!
//! Binary operations never coerce between levels; use [`RingElem::lift`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest level with a precomputed context (field degree 2^12).
pub const MAX_LEVEL: u32 = 12;

/// Layer index `n`; the field `Q(X_n)` has degree `2^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Level(pub u32);

impl Level {
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn degree(self) -> usize {
        1usize << self.0
    }

    /// The level below, if any.
    pub fn parent(self) -> Option<Level> {
        self.0.checked_sub(1).map(Level)
    }

    pub fn child(self) -> Level {
        Level(self.0 + 1)
    }

    fn require_positive(self, op: &'static str) -> Result<Level> {
        self.parent().ok_or(Error::LevelZero { op })
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.0)
    }
}

impl From<u32> for Level {
    fn from(n: u32) -> Self {
        Level(n)
    }
}

// ---------------------------------------------------------------------------
// integer polynomial helpers (coefficients low to high)

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// `sum c_i * base^i` by Horner's rule over integer polynomials.
fn poly_compose(c: &[BigInt], base: &[BigInt]) -> Vec<BigInt> {
    let mut acc: Vec<BigInt> = Vec::new();
    for ci in c.iter().rev() {
        acc = poly_mul(&acc, base);
        if acc.is_empty() {
            acc.push(BigInt::zero());
        }
        acc[0] += ci;
    }
    acc
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

// ---------------------------------------------------------------------------
// per-level tables

struct LevelContext {
    /// `f_n`, monic, length `2^n + 1`.
    modulus: Vec<BigInt>,
}

fn context(level: Level) -> &'static LevelContext {
    static CONTEXTS: OnceLock<Vec<OnceLock<LevelContext>>> = OnceLock::new();
    let all = CONTEXTS.get_or_init(|| (0..=MAX_LEVEL).map(|_| OnceLock::new()).collect());
    assert!(level.0 <= MAX_LEVEL, "level {} above MAX_LEVEL", level.0);
    all[level.0 as usize].get_or_init(|| LevelContext { modulus: minimal_poly(level) })
}

pub(crate) fn check_level(level: Level) -> Result<()> {
    if level.0 > MAX_LEVEL {
        Err(Error::LevelTooHigh(level.0))
    } else {
        Ok(())
    }
}

/// Minimal polynomial `f_n` of `X_n`, coefficients low to high:
/// `f_0(t) = t`, `f_n(t) = f_{n-1}(t^2 - 2)`.
pub fn minimal_poly(level: Level) -> Vec<BigInt> {
    let mut f = ints(&[0, 1]);
    let sub = ints(&[-2, 0, 1]);
    for _ in 0..level.0 {
        f = poly_compose(&f, &sub);
    }
    f
}

/// Reduces an arbitrary-length coefficient vector modulo `f_n` (monic long
/// division from the top).
fn reduce(mut poly: Vec<BigInt>, level: Level) -> Vec<BigInt> {
    let d = level.degree();
    if poly.len() > d {
        let f = &context(level).modulus;
        for i in (d..poly.len()).rev() {
            let c = std::mem::take(&mut poly[i]);
            if c.is_zero() {
                continue;
            }
            for (k, fk) in f[..d].iter().enumerate() {
                if !fk.is_zero() {
                    poly[i - d + k] -= &c * fk;
                }
            }
        }
        poly.truncate(d);
    }
    poly.resize(d, BigInt::zero());
    poly
}

// ---------------------------------------------------------------------------

/// An element of `Q(X_n)` in power-basis coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingElem {
    level: Level,
    coeffs: Vec<BigInt>,
    denom: BigInt,
}

impl RingElem {
    fn normalized(level: Level, coeffs: Vec<BigInt>, denom: BigInt) -> Self {
        debug_assert_eq!(coeffs.len(), level.degree());
        debug_assert!(!denom.is_zero());
        let mut coeffs = coeffs;
        let mut denom = denom;
        if denom.is_negative() {
            denom = -denom;
            coeffs.iter_mut().for_each(|c| *c = -&*c);
        }
        if !denom.is_one() {
            let g = coeffs.iter().fold(denom.clone(), |g, c| g.gcd(c));
            if !g.is_one() {
                coeffs.iter_mut().for_each(|c| *c /= &g);
                denom /= &g;
            }
        }
        RingElem { level, coeffs, denom }
    }

    /// Integral element from power-basis coefficients; the vector is reduced
    /// modulo `f_n`, so any length is accepted.
    pub fn from_coeffs(level: Level, coeffs: Vec<BigInt>) -> Self {
        RingElem { level, coeffs: reduce(coeffs, level), denom: BigInt::one() }
    }

    pub fn from_i64s(level: Level, coeffs: &[i64]) -> Self {
        Self::from_coeffs(level, ints(coeffs))
    }

    /// Element `coeffs / denom`.
    pub fn from_fraction(level: Level, coeffs: Vec<BigInt>, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(level, reduce(coeffs, level), denom))
    }

    pub fn from_rationals(level: Level, coeffs: &[BigRational]) -> Self {
        let denom = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints = coeffs.iter().map(|c| c.numer() * (&denom / c.denom())).collect();
        Self::normalized(level, reduce(ints, level), denom)
    }

    pub fn from_int(level: Level, value: impl Into<BigInt>) -> Self {
        let mut coeffs = vec![BigInt::zero(); level.degree()];
        coeffs[0] = value.into();
        RingElem { level, coeffs, denom: BigInt::one() }
    }

    pub fn from_rational(level: Level, value: &BigRational) -> Self {
        let mut coeffs = vec![BigInt::zero(); level.degree()];
        coeffs[0] = value.numer().clone();
        Self::normalized(level, coeffs, value.denom().clone())
    }

    pub fn zero(level: Level) -> Self {
        Self::from_int(level, 0)
    }

    pub fn one(level: Level) -> Self {
        Self::from_int(level, 1)
    }

    /// `X_n` itself (which is `0` at level 0).
    pub fn generator(level: Level) -> Self {
        Self::from_i64s(level, &[0, 1])
    }

    pub fn level(&self) -> Level {
        self.level
    }

    /// Power-basis numerators; the element is `coeffs / denom`.
    pub fn numerators(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denom
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        BigRational::new(self.coeffs[i].clone(), self.denom.clone())
    }

    pub fn coefficients(&self) -> Vec<BigRational> {
        (0..self.coeffs.len()).map(|i| self.coeff(i)).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.denom.is_one()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.denom.is_one() && self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| BigRational::new(self.coeffs[0].clone(), self.denom.clone()))
    }

    fn same_level(&self, other: &Self) -> Result<()> {
        if self.level == other.level {
            Ok(())
        } else {
            Err(Error::LevelMismatch { left: self.level, right: other.level })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_level(other)?;
        if self.denom == other.denom {
            let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
            return Ok(Self::normalized(self.level, coeffs, self.denom.clone()));
        }
        let coeffs =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * &other.denom + b * &self.denom).collect();
        Ok(Self::normalized(self.level, coeffs, &self.denom * &other.denom))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_level(other)?;
        let coeffs = reduce(poly_mul(&self.coeffs, &other.coeffs), self.level);
        let denom = &self.denom * &other.denom;
        Ok(if denom.is_one() {
            RingElem { level: self.level, coeffs, denom }
        } else {
            Self::normalized(self.level, coeffs, denom)
        })
    }

    fn neg_ref(&self) -> Self {
        RingElem { level: self.level, coeffs: self.coeffs.iter().map(|c| -c).collect(), denom: self.denom.clone() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * k).collect();
        Self::normalized(self.level, coeffs, self.denom.clone())
    }

    pub fn add_int(&self, k: i64) -> Self {
        self.checked_add(&Self::from_int(self.level, k)).unwrap()
    }

    /// Multiplication by `X_n` (a shift followed by one reduction step).
    pub fn mul_generator(&self) -> Self {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(BigInt::zero());
        c.extend(self.coeffs.iter().cloned());
        RingElem { level: self.level, coeffs: reduce(c, self.level), denom: self.denom.clone() }
    }

    pub fn square(&self) -> Self {
        self.checked_mul(self).unwrap()
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.level);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.square();
            }
        }
        Ok(acc)
    }

    /// Same field element viewed at a level `>=` the current one.
    pub fn lift(&self, to: Level) -> Result<Self> {
        check_level(to)?;
        if to < self.level {
            return Err(Error::BadLift { from: self.level, to });
        }
        let sub = ints(&[-2, 0, 1]);
        let mut coeffs = self.coeffs.clone();
        let mut lvl = self.level;
        while lvl < to {
            // X_m = X_{m+1}^2 - 2, and the composed degree stays below 2^(m+1)
            lvl = lvl.child();
            coeffs = poly_compose(&coeffs, &sub);
            coeffs.resize(lvl.degree(), BigInt::zero());
        }
        Ok(RingElem { level: to, coeffs, denom: self.denom.clone() })
    }

    /// Same field element at a lower level; fails unless it lies in that
    /// subfield.
    pub fn descend(&self, to: Level) -> Result<Self> {
        if to > self.level {
            return Err(Error::BadLift { from: self.level, to });
        }
        let mut cur = self.clone();
        while cur.level > to {
            let split = cur.tower_split()?;
            if !split.q.is_zero() {
                return Err(Error::NotInSubfield(to));
            }
            cur = split.p;
        }
        Ok(cur)
    }

    /// The unique `(p, q)` at level `n-1` with `x = p + X_n q`.
    pub fn tower_split(&self) -> Result<TowerSplit> {
        let parent = self.level.require_positive("tower_split")?;
        // even powers X_n^(2k) = (X_{n-1} + 2)^k; odd powers carry one X_n
        let shift = ints(&[2, 1]);
        let evens: Vec<BigInt> = self.coeffs.iter().step_by(2).cloned().collect();
        let odds: Vec<BigInt> = self.coeffs.iter().skip(1).step_by(2).cloned().collect();
        let mut p = poly_compose(&evens, &shift);
        let mut q = poly_compose(&odds, &shift);
        p.resize(parent.degree(), BigInt::zero());
        q.resize(parent.degree(), BigInt::zero());
        Ok(TowerSplit {
            p: Self::normalized(parent, p, self.denom.clone()),
            q: Self::normalized(parent, q, self.denom.clone()),
        })
    }

    /// `N_{n/n-1}(x) = p^2 - X_n^2 q^2`, returned at level `n-1`.
    pub fn relative_norm(&self) -> Result<Self> {
        let TowerSplit { p, q } = self.tower_split()?;
        Ok(relative_norm_of_split(&p, &q))
    }

    /// Product of all `2^n` conjugates. Conjugates of `X_n` are the
    /// `2cos(kπ/2^(n+1))` with `k` odd, so this does not depend on a choice
    /// of Galois generator.
    pub fn absolute_norm(&self) -> BigRational {
        let n = self.level;
        let top = 1u64 << (n.0 + 1);
        let mut acc = Self::one(n);
        for k in (1..top).step_by(2) {
            let image = cos_element(n, k).expect("odd k in range");
            acc = &acc * &self.substitute(&image).expect("same level");
        }
        acc.as_rational().expect("norm lies in Q")
    }

    /// Evaluates the power-basis polynomial of `self` at another element of
    /// the same level.
    pub fn substitute(&self, image: &Self) -> Result<Self> {
        self.same_level(image)?;
        let mut acc = Self::zero(self.level);
        for c in self.coeffs.iter().rev() {
            acc = &acc * image;
            acc.coeffs[0] += c * &acc.denom;
        }
        Ok(Self::normalized(self.level, acc.coeffs, &acc.denom * &self.denom))
    }

    /// Multiplicative inverse, via `1/x = τ(x) / N_{n/n-1}(x)` recursively
    /// down the tower.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self.level.parent() {
            None => {
                let r = BigRational::new(self.denom.clone(), self.coeffs[0].clone());
                Ok(Self::from_rational(self.level, &r))
            }
            Some(parent) => {
                let TowerSplit { p, q } = self.tower_split()?;
                let norm_inv = relative_norm_of_split(&p, &q).inverse()?;
                let p = (&p * &norm_inv).lift(self.level)?;
                let q = (&q * &norm_inv).lift(self.level)?;
                debug_assert_eq!(parent, norm_inv.level);
                Ok(&p - &q.mul_generator())
            }
        }
    }

    /// Field quotient `self / other`.
    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.same_level(other)?;
        self.checked_mul(&other.inverse()?)
    }

    /// `Some(a/b)` when the quotient lies in `Z[X_n]`.
    pub fn exact_div(&self, other: &Self) -> Result<Option<Self>> {
        let q = self.checked_div(other)?;
        Ok(q.is_integral().then_some(q))
    }

    /// Divisibility in `Z[X_n]`.
    pub fn divides(&self, other: &Self) -> Result<bool> {
        Ok(other.exact_div(self)?.is_some())
    }

    /// Lexicographic comparison of power-basis coefficient sequences.
    pub fn cmp_coeffs(&self, other: &Self) -> Ordering {
        self.coefficients().cmp(&other.coefficients())
    }

    /// Human-readable polynomial in `X_n`, e.g. `3 - 2X_1`.
    pub fn pretty(&self) -> String {
        let name = format!("X_{}", self.level.0);
        let mut out = String::new();
        for (i, c) in self.coefficients().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mag_s = if mag.is_integer() { mag.numer().to_string() } else { format!("({mag})") };
            match i {
                0 => out.push_str(&mag_s),
                _ => {
                    if !mag.is_one() {
                        out.push_str(&mag_s);
                    }
                    out.push_str(&name);
                    if i > 1 {
                        out.push_str(&format!("^{i}"));
                    }
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Parses either the canonical `Ln:[c0,c1,...]` form or a bare rational,
    /// which is placed at `level`. A canonical form must agree with `level`.
    pub fn parse_at(s: &str, level: Level) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('L') {
            let e: RingElem = t.parse()?;
            if e.level != level {
                return Err(Error::parse(t, format!("expected an element at {level}")));
            }
            Ok(e)
        } else {
            check_level(level)?;
            Ok(Self::from_rational(level, &parse_rational(t)?))
        }
    }
}

fn relative_norm_of_split(p: &RingElem, q: &RingElem) -> RingElem {
    // X_n^2 = X_{n-1} + 2
    let xsq = RingElem::generator(p.level).add_int(2);
    &p.square() - &(&xsq * &q.square())
}

fn parse_rational(t: &str) -> Result<BigRational> {
    let t = t.trim();
    let bad = |m: &str| Error::parse(t, m);
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad("invalid numerator"))?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad("invalid denominator"))?;
            if d.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(BigInt::from_str(t).map_err(|_| bad("invalid integer"))?)),
    }
}

impl FromStr for RingElem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let rest = t.strip_prefix('L').ok_or_else(|| Error::parse(t, "expected `L<n>:[...]`"))?;
        let (lvl, body) = rest.split_once(':').ok_or_else(|| Error::parse(t, "missing `:`"))?;
        let n: u32 = lvl.trim().parse().map_err(|_| Error::parse(lvl, "invalid level"))?;
        let level = Level(n);
        check_level(level)?;
        let body = body.trim();
        let inner = body
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| Error::parse(body, "expected `[...]`"))?;
        let coeffs: Vec<BigRational> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner.split(',').map(parse_rational).collect::<Result<_>>()?
        };
        if coeffs.len() > level.degree() {
            return Err(Error::parse(t, format!("{} coefficients exceed degree {}", coeffs.len(), level.degree())));
        }
        Ok(Self::from_rationals(level, &coeffs))
    }
}

impl fmt::Display for RingElem {
    /// Canonical textual form `Ln:[c0,...]`, constant term first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}:[", self.level.0)?;
        for (i, c) in self.coefficients().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for RingElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RingElem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// Operator forms panic on level mismatch; use the `checked_*` methods to
// handle it as an error.
macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&RingElem> for &RingElem {
            type Output = RingElem;
            fn $m(self, rhs: &RingElem) -> RingElem {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<RingElem> for RingElem {
            type Output = RingElem;
            fn $m(self, rhs: RingElem) -> RingElem {
                (&self).$m(&rhs)
            }
        }
    };
}
binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        self.neg_ref()
    }
}

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        self.neg_ref()
    }
}

/// `x = p + X_n q` with `p, q` one level down.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerSplit {
    pub p: RingElem,
    pub q: RingElem,
}

impl TowerSplit {
    /// Reassembles `p + X_n q` at level `n`.
    pub fn join(&self) -> Result<RingElem> {
        self.p.same_level(&self.q)?;
        let n = self.p.level.child();
        check_level(n)?;
        Ok(&self.p.lift(n)? + &self.q.lift(n)?.mul_generator())
    }
}

/// `2cos(kπ/2^(n+1))` for `0 <= k < 2^(n+1)`, built from the recurrence
/// `D_0 = 2`, `D_1 = X_n`, `D_k = X_n D_{k-1} - D_{k-2}`.
pub fn cos_element(level: Level, k: u64) -> Result<RingElem> {
    check_level(level)?;
    let bound = 1u64 << (level.0 + 1);
    if k >= bound {
        return Err(Error::OutOfRange { index: k, bound });
    }
    let mut prev = RingElem::from_int(level, 2);
    if k == 0 {
        return Ok(prev);
    }
    let mut cur = RingElem::generator(level);
    for _ in 1..k {
        let next = &cur.mul_generator() - &prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `2cos(kπ/2^(n+1))` for any integer `k`, folded into the principal range.
pub(crate) fn cos_element_mod(level: Level, k: i128) -> RingElem {
    let period = 1i128 << (level.0 + 2);
    let mut k = k.rem_euclid(period);
    if k >= period / 2 {
        k = period - k;
    }
    if k == period / 2 {
        // 2cos(π) = -2, just outside the principal range
        return RingElem::from_int(level, -2);
    }
    cos_element(level, k as u64).expect("folded index in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(level: u32, c: &[i64]) -> RingElem {
        RingElem::from_i64s(Level(level), c)
    }

    #[test]
    fn minimal_polys() {
        assert_eq!(minimal_poly(Level(0)), ints(&[0, 1]));
        assert_eq!(minimal_poly(Level(1)), ints(&[-2, 0, 1]));
        assert_eq!(minimal_poly(Level(2)), ints(&[2, 0, -4, 0, 1]));
    }

    #[test]
    fn minimal_poly_root_numeric() {
        // 2cos(π/8) is a root of t^4 - 4t^2 + 2
        let x = 2.0 * (std::f64::consts::PI / 8.0).cos();
        let v = x.powi(4) - 4.0 * x * x + 2.0;
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn basic_arithmetic() {
        let a = e(1, &[1, 1]);
        let b = e(1, &[1, -1]);
        assert_eq!(&a * &b, e(1, &[-1]));
        assert_eq!(a.square(), e(1, &[3, 2]));
        let x2 = RingElem::generator(Level(2));
        // X_2^2 = 2 + X_1, and X_1 lifts to X_2^2 - 2
        assert_eq!(x2.square(), e(2, &[0, 0, 1, 0]));
        assert_eq!(x2.square(), RingElem::generator(Level(1)).add_int(2).lift(Level(2)).unwrap());
    }

    #[test]
    fn level_mismatch_is_an_error() {
        let err = e(1, &[1]).checked_add(&e(2, &[1])).unwrap_err();
        assert!(matches!(err, Error::LevelMismatch { .. }));
    }

    #[test]
    fn lift_and_descend() {
        let x1 = RingElem::generator(Level(1));
        let lifted = x1.lift(Level(2)).unwrap();
        assert_eq!(lifted, e(2, &[-2, 0, 1]));
        assert_eq!(lifted.descend(Level(1)).unwrap(), x1);
        let err = RingElem::generator(Level(2)).descend(Level(1)).unwrap_err();
        assert!(matches!(err, Error::NotInSubfield(_)));
        assert!(x1.lift(Level(0)).is_err());
    }

    #[test]
    fn split_examples() {
        let r = RingElem::from_int(Level(2), 7);
        let s = r.tower_split().unwrap();
        assert_eq!(s.p, RingElem::from_int(Level(1), 7));
        assert!(s.q.is_zero());
        let d1 = e(1, &[-3, -2]);
        let s = d1.tower_split().unwrap();
        assert_eq!((s.p.clone(), s.q.clone()), (e(0, &[-3]), e(0, &[-2])));
        assert_eq!(s.join().unwrap(), d1);
        assert!(matches!(e(0, &[3]).tower_split(), Err(Error::LevelZero { .. })));
    }

    #[test]
    fn norms() {
        assert_eq!(RingElem::one(Level(3)).relative_norm().unwrap(), RingElem::one(Level(2)));
        assert_eq!(e(1, &[1, 1]).relative_norm().unwrap(), e(0, &[-1]));
        assert_eq!(e(1, &[2, 1]).absolute_norm(), BigRational::from_integer(2.into()));
        assert_eq!(e(1, &[-2, 1]).absolute_norm(), BigRational::from_integer(2.into()));
        assert!(e(0, &[5]).relative_norm().is_err());
    }

    #[test]
    fn exact_division() {
        let x2 = RingElem::generator(Level(2));
        let delta2 = x2.add_int(2).exact_div(&x2.add_int(-2)).unwrap().unwrap();
        // (-7 - 4X_1) + (-4 - 2X_1) X_2
        let want = TowerSplit { p: e(1, &[-7, -4]), q: e(1, &[-4, -2]) }.join().unwrap();
        assert_eq!(delta2, want);
        assert_eq!(&delta2 * &x2.add_int(-2), x2.add_int(2));
        let a = e(2, &[3, 1, 4, 1]);
        assert_eq!(a.exact_div(&RingElem::one(Level(2))).unwrap(), Some(a.clone()));
        let x1 = RingElem::generator(Level(1));
        assert_eq!(x1.exact_div(&RingElem::from_int(Level(1), 2)).unwrap(), None);
        assert!(matches!(a.exact_div(&RingElem::zero(Level(2))), Err(Error::DivisionByZero)));
    }

    #[test]
    fn cos_elements() {
        for n in 0..4 {
            assert_eq!(cos_element(Level(n), 1).unwrap(), RingElem::generator(Level(n)));
        }
        assert!(cos_element(Level(1), 2).unwrap().is_zero());
        // D_3 at level 2 is (X_1 - 1) X_2
        let want = TowerSplit { p: e(1, &[0]), q: e(1, &[-1, 1]) }.join().unwrap();
        assert_eq!(cos_element(Level(2), 3).unwrap(), want);
        assert!(matches!(cos_element(Level(2), 8), Err(Error::OutOfRange { .. })));
        assert_eq!(cos_element_mod(Level(1), 4), RingElem::from_int(Level(1), -2));
        assert_eq!(cos_element_mod(Level(1), 7), RingElem::generator(Level(1)));
    }

    #[test]
    fn textual_form() {
        let x: RingElem = "L2:[1,0,3,0]".parse().unwrap();
        assert_eq!(x, e(2, &[1, 0, 3]));
        assert_eq!(x.to_string(), "L2:[1,0,3,0]");
        let h: RingElem = "L1:[1/2, -3/4]".parse().unwrap();
        assert_eq!(h.to_string(), "L1:[1/2,-3/4]");
        assert!(!h.is_integral());
        assert!("L1:[1,2,3]".parse::<RingElem>().is_err());
        assert!("1,2".parse::<RingElem>().is_err());
        let err = "L1:[1,x]".parse::<RingElem>().unwrap_err();
        assert!(err.to_string().contains("`x`"), "{err}");
        assert_eq!(RingElem::parse_at("-4", Level(1)).unwrap(), e(1, &[-4]));
        assert!(RingElem::parse_at("L2:[1]", Level(1)).is_err());
    }

    #[test]
    fn pretty_forms() {
        assert_eq!(e(1, &[3, -2]).pretty(), "3 - 2X_1");
        assert_eq!(e(1, &[0, 1]).pretty(), "X_1");
        assert_eq!(e(2, &[-1, 0, 1]).pretty(), "-1 + X_2^2");
        assert_eq!(RingElem::zero(Level(3)).pretty(), "0");
    }

    #[test]
    fn negative_powers() {
        let u = e(1, &[1, 1]);
        let inv = u.pow(-3).unwrap();
        assert!((&inv * &u.pow(3).unwrap()).is_one());
        assert!(inv.is_integral());
    }
}
