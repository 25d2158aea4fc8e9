//! Galois action on each layer and certified real embeddings.
//!
//! The fixed generator `σ` of `Gal(Q(X_n)/Q)` sends `2cosθ` to `2cos3θ`,
//! i.e. `X_n ↦ X_n^3 - 3X_n`. The index `j` always means `σ^j`.
//!
//! Two families of real embeddings are used:
//! * [`embed`]: the genuine conjugate `σ^j(x)` under the identity embedding,
//!   `j < 2^n` for `x` at level `n`;
//! * [`embed_extended`]: for `x` at level `n >= 1` and `j < 2^(n-1)`, the
//!   embedding restricting to `σ^j` on level `n-1` and sending `X_n` to the
//!   positive root `sqrt(2 + σ^j(X_{n-1}))`. This is the convention behind
//!   the log embedding.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::interval::{refine, Interval, MAX_PRECISION, MIN_PRECISION};
use crate::ring::{check_level, cos_element_mod, Level, RingElem};

/// `3^j mod 2^bits`.
fn pow3_mod(j: u64, bits: u32) -> u128 {
    let m: u128 = 1u128 << bits;
    let (mut base, mut e, mut acc) = (3u128 % m, j, 1u128 % m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

/// `σ^j(x)`; `σ` has order `2^n` on level `n`.
pub fn sigma(x: &RingElem, j: u64) -> RingElem {
    let n = x.level();
    let order = 1u64 << n.index();
    let j = j % order;
    if j == 0 {
        return x.clone();
    }
    let k = pow3_mod(j, n.index() + 2);
    let image = cos_element_mod(n, k as i128);
    x.substitute(&image).expect("image at same level")
}

/// The generator `τ_n` of `Gal(Q(X_n)/Q(X_{n-1}))`: `p + X_n q ↦ p - X_n q`.
pub fn tau(x: &RingElem) -> Result<RingElem> {
    let s = x.tower_split()?;
    let n = x.level();
    Ok(&s.p.lift(n)? - &s.q.lift(n)?.mul_generator())
}

/// The exponent `i` with `σ^i` restricting to `σ^j` on level `n-1` and
/// sending `X_n` to a positive number, so that the extended embedding `j`
/// equals the identity embedding composed with `σ^i`. `n >= 1`, `j < 2^(n-1)`.
pub fn extended_automorphism(n: Level, j: u64) -> u64 {
    debug_assert!(n.index() >= 1 && j < 1 << (n.index() - 1));
    if conjugate_sign(n.index(), j) > 0 {
        j
    } else {
        j + (1 << (n.index() - 1))
    }
}

/// Sign of `σ^j(X_m)` under the identity embedding: `2cos(3^j·2π/2^(m+2))`.
fn conjugate_sign(m: u32, j: u64) -> i8 {
    let k = pow3_mod(j, m + 2);
    let full = 1u128 << (m + 2);
    if 4 * k < full || 4 * k > 3 * full {
        1
    } else {
        -1
    }
}

/// Certified values of every conjugate `σ^j(X_m)`, `m <= n`, at a fixed
/// working precision. Immutable once built.
#[derive(Debug)]
pub struct EmbeddingContext {
    level: Level,
    precision: u32,
    /// `conj[m][j]` encloses `σ^j(X_m)`.
    conj: Vec<Vec<Interval>>,
    /// `ext[j]` encloses `sqrt(2 + σ^j(X_{n-1}))`, `j < 2^(n-1)`.
    ext: Vec<Interval>,
}

impl EmbeddingContext {
    fn build(level: Level, precision: u32) -> Self {
        let w = precision;
        let two = Interval::from_int(2, w);
        let mut conj: Vec<Vec<Interval>> = vec![vec![Interval::zero(w)]];
        for m in 1..=level.index() {
            let below = &conj[m as usize - 1];
            let row = (0..1u64 << m)
                .map(|j| {
                    let base = &below[(j % (1 << (m - 1))) as usize];
                    let r = two.add(base).sqrt().expect("2 + X >= 0");
                    if conjugate_sign(m, j) > 0 {
                        r
                    } else {
                        r.neg()
                    }
                })
                .collect();
            conj.push(row);
        }
        let ext = match level.parent() {
            Some(p) => conj[p.index() as usize].iter().map(|v| two.add(v).sqrt().unwrap()).collect(),
            None => Vec::new(),
        };
        EmbeddingContext { level, precision, conj, ext }
    }

    /// Shared context for `(level, precision)`; contexts are cached and never
    /// mutated.
    pub fn get(level: Level, precision: u32) -> Arc<EmbeddingContext> {
        type Cache = Mutex<HashMap<(u32, u32), Arc<EmbeddingContext>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (level.index(), precision);
        if let Some(ctx) = cache.lock().unwrap().get(&key) {
            return ctx.clone();
        }
        let ctx = Arc::new(Self::build(level, precision));
        cache.lock().unwrap().entry(key).or_insert(ctx).clone()
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Enclosure of `σ^j(X_m)`.
    pub fn conjugate(&self, m: Level, j: u64) -> &Interval {
        let row = &self.conj[m.index() as usize];
        &row[(j % row.len() as u64) as usize]
    }

    /// Enclosure of the extended `σ^j(X_n) = sqrt(2 + σ^j(X_{n-1}))`.
    pub fn extended(&self, j: u64) -> &Interval {
        &self.ext[j as usize]
    }

    /// `σ^j(x)` for `x` at any level up to the context's.
    pub fn eval(&self, x: &RingElem, j: u64) -> Interval {
        eval_poly(x, self.conjugate(x.level(), j))
    }

    /// Extended embedding of `x` at the context's own level.
    pub fn eval_extended(&self, x: &RingElem, j: u64) -> Interval {
        assert_eq!(x.level(), self.level);
        eval_poly(x, self.extended(j))
    }
}

/// Horner evaluation of the power-basis polynomial at `point`.
fn eval_poly(x: &RingElem, point: &Interval) -> Interval {
    let w = point.precision();
    let mut acc = Interval::zero(w);
    for c in x.numerators().iter().rev() {
        acc = acc.mul(point);
        if !c.is_zero() {
            acc = acc.add(&Interval::from_int(c.clone(), w));
        }
    }
    let d: &BigInt = x.denominator();
    if d == &BigInt::from(1) {
        acc
    } else {
        acc.div_int(d)
    }
}

fn validate_precision(precision: u32) -> Result<()> {
    if precision < MIN_PRECISION {
        return Err(Error::Precondition(format!("precision {precision} below {MIN_PRECISION} bits")));
    }
    Ok(())
}

/// Guard bits for Horner on `x`: coefficient size plus degree growth.
fn guard_bits(x: &RingElem) -> u32 {
    let coeff_bits = x.numerators().iter().map(|c| c.bits()).max().unwrap_or(0) as u32;
    32 + coeff_bits + 2 * x.level().degree() as u32
}

fn embed_with(x: &RingElem, precision: u32, f: impl Fn(&EmbeddingContext) -> Interval) -> Result<Interval> {
    validate_precision(precision)?;
    let level = x.level();
    check_level(level)?;
    refine(precision + guard_bits(x), MAX_PRECISION.max(precision * 4), |w| {
        let v = f(&EmbeddingContext::get(level, w));
        v.width_below(precision).then_some(v)
    })
}

/// Enclosure of `σ^j(x)` of width below `2^(1 - precision)`.
pub fn embed(x: &RingElem, j: u64, precision: u32) -> Result<Interval> {
    embed_with(x, precision, |ctx| ctx.eval(x, j))
}

/// Enclosure of the extended embedding `σ^j(x)`, `x` at level `n >= 1`,
/// `j < 2^(n-1)`.
pub fn embed_extended(x: &RingElem, j: u64, precision: u32) -> Result<Interval> {
    let parent = x.level().parent().ok_or(Error::LevelZero { op: "embed_extended" })?;
    let bound = parent.degree() as u64;
    if j >= bound {
        return Err(Error::OutOfRange { index: j, bound });
    }
    embed_with(x, precision, |ctx| ctx.eval_extended(x, j))
}

/// Exact sign of `σ^j(x)`, decided by doubling precision.
pub fn sign_of(x: &RingElem, j: u64) -> Result<i8> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    if let Some(r) = x.as_rational() {
        return Ok(if r > num_rational::BigRational::zero() { 1 } else { -1 });
    }
    let level = x.level();
    refine(64 + guard_bits(x), MAX_PRECISION, |w| {
        EmbeddingContext::get(level, w).eval(x, j).sign().filter(|&s| s != 0)
    })
}

/// `(log|σ(ε)|)_σ` over `Gal(Q(X_{n-1})/Q)` with the extended embeddings.
#[derive(Clone, Debug, PartialEq)]
pub struct LogVector {
    pub coords: Vec<Interval>,
}

impl LogVector {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.coords.iter().map(Interval::mid_f64).collect()
    }
}

/// Log embedding of a nonzero element at level `n >= 1`, with every
/// coordinate certified to width below `2^(1 - precision)`.
pub fn log_embedding(x: &RingElem, precision: u32) -> Result<LogVector> {
    validate_precision(precision)?;
    let parent = x.level().parent().ok_or(Error::LevelZero { op: "log_embedding" })?;
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    let level = x.level();
    let coords = (0..parent.degree() as u64)
        .map(|j| {
            refine(precision + guard_bits(x), MAX_PRECISION.max(precision * 4), |w| {
                let v = EmbeddingContext::get(level, w).eval_extended(x, j).abs();
                // ln is 1/|v|-Lipschitz: demand enough room above zero
                if v.sign() != Some(1) {
                    return None;
                }
                let l = v.ln()?;
                l.width_below(precision).then_some(l)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LogVector { coords })
}
