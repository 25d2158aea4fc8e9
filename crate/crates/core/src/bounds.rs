//! Closest lattice vectors to the signed targets `μ_s(X_n)`, the bound
//! constants `b_{s,σ}` and `C_{s,σ}`, and the exclusion test derived from
//! them.
//!
//! The lattice is `μ_n(Z[X_{n-1}]) ⊂ R^(2^(n-1))`. In the integral basis
//! `1, D_1, ..., D_{d-1}` (`D_k = 2cos(2πk/2^(n+1))`) it is orthogonal, with
//! squared lengths `d` and `2d`, so the box around the rounded center is a
//! certified search region. Squared distances are elements of `Q(X_n)` and
//! are compared exactly.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::{extended_automorphism, sigma, sign_of, EmbeddingContext};
use crate::interval::{refine, Interval, MAX_PRECISION};
use crate::ring::{cos_element, Level, RingElem};
use crate::units::RelUnit;

/// Highest level accepted by [`nearest_lattice`] (lattice dimension 16).
pub const MAX_CVP_LEVEL: u32 = 5;
/// Highest level accepted by [`bound_table`], which solves one closest
/// vector problem per sign vector.
pub const MAX_TABLE_LEVEL: u32 = 4;

/// `(s_σ)_σ ∈ {±1}^(2^(n-1))`, indexed by `j` for `σ^j`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.is_empty() || entries.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Precondition("sign vector entries must be +1 or -1".into()));
        }
        Ok(SignVector(entries))
    }

    pub fn ones(len: usize) -> Self {
        SignVector(vec![1; len])
    }

    /// Entry `j` is `-1` exactly when bit `j` of `index` is set.
    pub fn from_index(len: usize, index: u64) -> Self {
        SignVector((0..len).map(|j| if index >> j & 1 == 1 { -1 } else { 1 }).collect())
    }

    /// All `2^len` sign vectors, all-ones first.
    pub fn all(len: usize) -> impl Iterator<Item = SignVector> {
        (0..1u64 << len).map(move |i| SignVector::from_index(len, i))
    }

    /// Signs of `σ^j(p(ε) q(ε))`, `j < 2^(n-1)`.
    pub fn of_unit(eps: &RelUnit) -> Result<Self> {
        let pq = eps.p() * eps.q();
        if pq.is_zero() {
            return Err(Error::Precondition("sign pattern of ±1 is undefined".into()));
        }
        let d = pq.level().degree() as u64;
        Ok(SignVector((0..d).map(|j| sign_of(&pq, j)).collect::<Result<_>>()?))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, j: usize) -> i8 {
        self.0[j]
    }

    pub fn negate(&self) -> Self {
        SignVector(self.0.iter().map(|s| -s).collect())
    }

    fn check_level(&self, n: Level) -> Result<()> {
        let parent = n.parent().ok_or(Error::LevelZero { op: "sign vector" })?;
        if self.len() != parent.degree() {
            return Err(Error::Precondition(format!(
                "sign vector of length {} at {n} (expected {})",
                self.len(),
                parent.degree()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|&s| f.write_str(if s > 0 { "+" } else { "-" }))
    }
}

impl fmt::Debug for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignVector({self})")
    }
}

impl FromStr for SignVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(Error::parse(s, format!("unexpected `{c}` in sign pattern"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        SignVector::new(v)
    }
}

/// Which of the two bound theorems a table or test refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PcfType {
    /// Type `(1,2)`, units of norm `+1`.
    #[serde(rename = "12")]
    T12,
    /// Type `(0,3)`, units of norm `-1`.
    #[serde(rename = "03")]
    T03,
}

impl fmt::Display for PcfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PcfType::T12 => "12",
            PcfType::T03 => "03",
        })
    }
}

impl PcfType {
    /// `(1,2)` or `(0,3)`.
    pub fn label(&self) -> &'static str {
        match self {
            PcfType::T12 => "(1,2)",
            PcfType::T03 => "(0,3)",
        }
    }
}

impl FromStr for PcfType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "12" => Ok(PcfType::T12),
            "03" => Ok(PcfType::T03),
            _ => Err(Error::parse(s, "expected `12` or `03`")),
        }
    }
}

fn require_cvp_level(n: Level) -> Result<Level> {
    let m = n.parent().ok_or(Error::LevelZero { op: "nearest_lattice" })?;
    if n.index() > MAX_CVP_LEVEL {
        return Err(Error::LevelTooHigh(n.index()));
    }
    Ok(m)
}

/// `μ_s(X_n) = (s_j σ^j(X_n))_j` with the positive square roots, each
/// coordinate of width below `2^(1 - precision)`.
pub fn mu_target(n: Level, s: &SignVector, precision: u32) -> Result<Vec<Interval>> {
    s.check_level(n)?;
    refine(precision + 16, MAX_PRECISION, |w| {
        let ctx = EmbeddingContext::get(n, w);
        let v: Vec<Interval> = (0..s.len())
            .map(|j| {
                let x = ctx.extended(j as u64);
                if s.get(j) > 0 {
                    x.clone()
                } else {
                    x.neg()
                }
            })
            .collect();
        v.iter().all(|x| x.width_below(precision)).then_some(v)
    })
}

/// Exact `||μ_s(X_n) - μ_n(a)||^2 = Σ_j ρ_j((s_j X_n - a)^2)` where `ρ_j` is
/// the automorphism realizing the extended embedding `j`. The result is a
/// totally positive element of level `n`, real-valued under the identity.
pub fn squared_distance(n: Level, s: &SignVector, a: &RingElem) -> Result<RingElem> {
    s.check_level(n)?;
    let x = RingElem::generator(n);
    let a = a.lift(n)?;
    let plus = (&x - &a).square();
    let minus = (&x + &a).square();
    let mut acc = RingElem::zero(n);
    for j in 0..s.len() {
        let w = if s.get(j) > 0 { &plus } else { &minus };
        acc = &acc + &sigma(w, extended_automorphism(n, j as u64));
    }
    Ok(acc)
}

/// Closest lattice vectors to `μ_s(X_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CvpResult {
    pub signs: SignVector,
    /// Canonical minimizer: the lexicographically smallest coefficient
    /// sequence among [`CvpResult::minimizers`].
    pub best: RingElem,
    /// Every minimizer; more than one means an exact tie.
    pub minimizers: Vec<RingElem>,
    /// Exact minimal squared distance, an element of level `n`.
    pub dist2: RingElem,
    /// Lattice points inside the certified search region.
    pub searched: usize,
}

/// Integral basis `1, D_1, ..., D_{d-1}` of `Z[X_m]`, `d = 2^m`.
fn chebyshev_basis(m: Level) -> Vec<RingElem> {
    let d = m.degree() as u64;
    std::iter::once(RingElem::one(m))
        .chain((1..d).map(|k| cos_element(m, k).expect("k < 2^(m+1)")))
        .collect()
}

/// Lower and upper f64 bounds of an interval, widened to absorb the
/// conversion rounding.
fn f64_bounds(v: &Interval) -> (f64, f64) {
    let pad = |x: f64| x.abs() * 1e-14 + 1e-300;
    (v.lo_f64() - pad(v.lo_f64()), v.hi_f64() + pad(v.hi_f64()))
}

/// Bounds on `(c - x)^2` for `x ∈ [lo, hi]`.
fn sq_gap_bounds(c: f64, lo: f64, hi: f64) -> (f64, f64) {
    let (a, b) = (c - hi, c - lo);
    let upper = a.abs().max(b.abs());
    let lower = if a <= 0.0 && b >= 0.0 { 0.0 } else { a.abs().min(b.abs()) };
    (lower * lower * (1.0 - 1e-12), upper * upper * (1.0 + 1e-12))
}

/// A closest vector of `μ_n(Z[X_{n-1}])` to `μ_s(X_n)`, with every
/// minimizer reported. The search region is the box of the rounded
/// candidate's radius in orthogonal coordinates; pruning is certified and
/// the final comparison is exact.
pub fn nearest_lattice(n: Level, s: &SignVector) -> Result<CvpResult> {
    let m = require_cvp_level(n)?;
    s.check_level(n)?;
    let d = m.degree();
    let basis = chebyshev_basis(m);
    let norms: Vec<f64> = (0..d).map(|k| if k == 0 { d as f64 } else { 2.0 * d as f64 }).collect();

    // centers c*_k = <t, b_k> / ||b_k||^2, certified to ~100 bits
    let w = 160;
    let ctx = EmbeddingContext::get(n, w);
    let target = mu_target(n, s, 128)?;
    let centers: Vec<(f64, f64)> = (0..d)
        .map(|k| {
            let dot = (0..d).fold(Interval::zero(w), |acc, j| {
                acc.add(&target[j].with_precision(w).mul(&ctx.eval(&basis[k], j as u64)))
            });
            let den = if k == 0 { d } else { 2 * d };
            f64_bounds(&dot.div_int(&BigInt::from(den)))
        })
        .collect();

    let combine = |c: &[i64]| -> RingElem {
        c.iter().zip(&basis).fold(RingElem::zero(m), |acc, (&ck, b)| &acc + &b.scale(&ck.into()))
    };
    let rounded: Vec<i64> = centers.iter().map(|&(lo, hi)| ((lo + hi) / 2.0).round() as i64).collect();
    let r2_hi = rounded
        .iter()
        .zip(&centers)
        .zip(&norms)
        .map(|((&c, &(lo, hi)), nk)| nk * sq_gap_bounds(c as f64, lo, hi).1)
        .sum::<f64>()
        * (1.0 + 1e-12);

    // depth-first enumeration of the ellipsoid Σ ||b_k||^2 (c_k - c*_k)^2 <= r^2
    let mut survivors: Vec<(Vec<i64>, f64, f64)> = Vec::new();
    let mut stack: Vec<(Vec<i64>, f64, f64)> = vec![(Vec::new(), 0.0, 0.0)];
    while let Some((prefix, lo_sum, hi_sum)) = stack.pop() {
        let k = prefix.len();
        if k == d {
            survivors.push((prefix, lo_sum, hi_sum));
            continue;
        }
        let (lo, hi) = centers[k];
        let half = ((r2_hi - lo_sum).max(0.0) / norms[k]).sqrt() * (1.0 + 1e-12) + 1e-12;
        let first = (lo - half).ceil() as i64;
        let last = (hi + half).floor() as i64;
        for c in first..=last {
            let (gl, gh) = sq_gap_bounds(c as f64, lo, hi);
            let next_lo = lo_sum + norms[k] * gl;
            if next_lo > r2_hi {
                continue;
            }
            let mut p = prefix.clone();
            p.push(c);
            stack.push((p, next_lo, hi_sum + norms[k] * gh));
        }
    }
    let searched = survivors.len();
    let min_hi = survivors.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let contenders: Vec<RingElem> =
        survivors.iter().filter(|s| s.1 <= min_hi).map(|(c, _, _)| combine(c)).collect();
    if contenders.is_empty() {
        return Err(Error::Precondition("empty closest vector search region".into()));
    }

    let mut best: Vec<(RingElem, RingElem)> = Vec::new();
    for a in contenders {
        let dist = squared_distance(n, s, &a)?;
        match best.first() {
            None => best.push((a, dist)),
            Some((_, current)) => {
                let diff = &dist - current;
                if diff.is_zero() {
                    best.push((a, dist));
                } else {
                    let sign = sign_of(&diff, 0).map_err(|e| match e {
                        Error::Undecided { precision } => Error::UndecidedTie { precision, candidates: best.len() + 1 },
                        other => other,
                    })?;
                    if sign < 0 {
                        best = vec![(a, dist)];
                    }
                }
            }
        }
    }
    let mut minimizers: Vec<RingElem> = best.iter().map(|(a, _)| a.clone()).collect();
    minimizers.sort_by(RingElem::cmp_coeffs);
    Ok(CvpResult {
        signs: s.clone(),
        best: minimizers[0].clone(),
        dist2: best.swap_remove(0).1,
        minimizers,
        searched,
    })
}

/// [`nearest_lattice`], memoized per `(n, s)`.
pub fn nearest_lattice_cached(n: Level, s: &SignVector) -> Result<CvpResult> {
    type Cache = Mutex<HashMap<(u32, SignVector), CvpResult>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (n.index(), s.clone());
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let r = nearest_lattice(n, s)?;
    cache.lock().unwrap().insert(key, r.clone());
    Ok(r)
}

/// `b_{s,σ}` and `C_{s,σ} = log(sqrt(b^2 + 1) + |b|)` at working precision
/// `w`, `None` when an enclosure is too wide to be useful.
fn bound_pair(ctx: &EmbeddingContext, kind: PcfType, sign: i8, a: &RingElem, j: u64) -> Option<(Interval, Interval)> {
    let x = ctx.extended(j);
    let signed = if sign > 0 { x.clone() } else { x.neg() };
    let den = signed.sub(&ctx.eval(a, j)).abs();
    let num = match kind {
        PcfType::T12 => x.mul_int(&BigInt::from(2)),
        PcfType::T03 => x.add(&Interval::one(x.precision())).abs(),
    };
    let b = num.div(&den)?;
    let c = b.square().add(&Interval::one(b.precision())).sqrt()?.add(&b.abs()).ln()?;
    Some((b, c))
}

/// One row of a bound table: a sign vector, its closest vector, and the
/// bounds for every `σ^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundRow {
    pub signs: SignVector,
    pub a_s: RingElem,
    pub minimizers: Vec<RingElem>,
    pub b: Vec<Interval>,
    pub c: Vec<Interval>,
}

/// `b_{s,σ}` and `C_{s,σ}` over all sign vectors and embeddings.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundTable {
    pub level: Level,
    pub pcf_type: PcfType,
    pub rows: Vec<BoundRow>,
}

/// The row for one sign vector, with every bound certified to width below
/// `2^(1 - precision)`.
pub fn bound_row(n: Level, kind: PcfType, s: &SignVector, precision: u32) -> Result<BoundRow> {
    let cvp = nearest_lattice_cached(n, s)?;
    let a = cvp.best.clone();
    let guard = 32 + a.numerators().iter().map(|c| c.bits() as u32).max().unwrap_or(0);
    let (b, c) = refine(precision + guard, MAX_PRECISION, |w| {
        let ctx = EmbeddingContext::get(n, w);
        let mut bs = Vec::with_capacity(s.len());
        let mut cs = Vec::with_capacity(s.len());
        for j in 0..s.len() {
            let (b, c) = bound_pair(&ctx, kind, s.get(j), &a, j as u64)?;
            if !(b.width_below(precision) && c.width_below(precision)) {
                return None;
            }
            bs.push(b);
            cs.push(c);
        }
        Some((bs, cs))
    })?;
    Ok(BoundRow { signs: s.clone(), a_s: a, minimizers: cvp.minimizers, b, c })
}

/// Full table over all `2^(2^(n-1))` sign vectors, `1 <= n <= 4`.
pub fn bound_table(n: Level, kind: PcfType, precision: u32) -> Result<BoundTable> {
    let m = n.parent().ok_or(Error::LevelZero { op: "bound_table" })?;
    if n.index() > MAX_TABLE_LEVEL {
        return Err(Error::LevelTooHigh(n.index()));
    }
    let signs: Vec<SignVector> = SignVector::all(m.degree()).collect();
    let rows = crate::par_map(&signs, |s| bound_row(n, kind, s, precision)).into_iter().collect::<Result<_>>()?;
    Ok(BoundTable { level: n, pcf_type: kind, rows })
}

impl BoundTable {
    /// CSV with columns `s,sigma,a_s,b,C` (midpoints, 17 significant
    /// digits).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,sigma,a_s,b,C\n");
        for row in &self.rows {
            for j in 0..row.signs.len() {
                out.push_str(&format!(
                    "{},{},\"{}\",{},{}\n",
                    row.signs,
                    j,
                    row.a_s,
                    crate::interval::format_sig17(row.b[j].mid_f64()),
                    crate::interval::format_sig17(row.c[j].mid_f64()),
                ));
            }
        }
        out
    }

    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let cells: Vec<[String; 5]> = self
            .rows
            .iter()
            .flat_map(|row| {
                (0..row.signs.len()).map(move |j| {
                    let a = if row.minimizers.len() > 1 {
                        format!("{} ({} tied)", row.a_s.pretty(), row.minimizers.len())
                    } else {
                        row.a_s.pretty()
                    };
                    [
                        row.signs.to_string(),
                        j.to_string(),
                        a,
                        format!("{:.10}", row.b[j].mid_f64()),
                        format!("{:.10}", row.c[j].mid_f64()),
                    ]
                })
            })
            .collect();
        let header = ["s", "sigma", "a_s", "b", "C"].map(String::from);
        let mut widths = header.clone().map(|h| h.chars().count());
        for r in &cells {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |r: &[String; 5]| {
            r.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
        };
        let mut out = format!("type {} bounds at {}\n", self.pcf_type.label(), self.level);
        out.push_str(&line(&header));
        out.push('\n');
        for r in &cells {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

/// True when `|log|σ(ε)|| > C_{s,σ}` for every `σ`, with `s` the sign
/// pattern of `p(ε) q(ε)`. A true result certifies that `ε` is not in
/// `RE_n^+(1,2)` (resp. `RE_n^-(0,3)`).
pub fn bound_excludes(eps: &RelUnit, kind: PcfType) -> Result<bool> {
    if eps.is_torsion() {
        return Err(Error::Precondition("bound test needs ε ≠ ±1".into()));
    }
    let n = eps.level();
    require_cvp_level(n)?;
    let s = SignVector::of_unit(eps)?;
    let a = nearest_lattice_cached(n, &s)?.best;
    let x = eps.elem();
    let bits = x.numerators().iter().chain(a.numerators()).map(|c| c.bits() as u32).max().unwrap_or(0);
    refine(64 + bits + 2 * n.degree() as u32, MAX_PRECISION, |w| {
        let ctx = EmbeddingContext::get(n, w);
        let mut all_above = true;
        for j in 0..s.len() {
            let (_, c) = bound_pair(&ctx, kind, s.get(j), &a, j as u64)?;
            let v = ctx.eval_extended(x, j as u64).abs();
            if v.sign() != Some(1) {
                return None;
            }
            let l = v.ln()?.abs();
            if l.certainly_le(&c) {
                return Some(false);
            }
            if !l.certainly_gt(&c) {
                all_above = false;
            }
        }
        all_above.then_some(true)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{delta, eta, rel_unit_from};

    fn e(level: u32, c: &[i64]) -> RingElem {
        RingElem::from_i64s(Level(level), c)
    }

    fn sv(s: &str) -> SignVector {
        s.parse().unwrap()
    }

    #[test]
    fn sign_vectors() {
        assert_eq!(sv("+-").entries(), &[1, -1]);
        assert_eq!(SignVector::all(2).map(|s| s.to_string()).collect::<Vec<_>>(), ["++", "-+", "+-", "--"]);
        assert_eq!(sv("+-").negate(), sv("-+"));
        assert!("+x".parse::<SignVector>().is_err());
        assert!("".parse::<SignVector>().is_err());
        assert_eq!(SignVector::of_unit(&eta(Level(2)).unwrap()).unwrap(), sv("++"));
    }

    #[test]
    fn targets() {
        let t = mu_target(Level(1), &sv("+"), 64).unwrap();
        assert!((t[0].mid_f64() - 2f64.sqrt()).abs() < 1e-15);
        let t = mu_target(Level(2), &sv("++"), 64).unwrap();
        let pi = std::f64::consts::PI;
        assert!((t[0].mid_f64() - 2.0 * (pi / 8.0).cos()).abs() < 1e-15);
        assert!((t[1].mid_f64() - 2.0 * (3.0 * pi / 8.0).cos()).abs() < 1e-15);
        let u = mu_target(Level(2), &sv("--"), 64).unwrap();
        assert!(t.iter().zip(&u).all(|(a, b)| a.neg().overlaps(b)));
        assert!(mu_target(Level(2), &sv("+"), 64).is_err());
    }

    #[test]
    fn basis_is_orthogonal() {
        for n in 1..=4 {
            let m = Level(n - 1);
            let d = m.degree();
            let basis = chebyshev_basis(m);
            let ctx = EmbeddingContext::get(Level(n), 96);
            for i in 0..d {
                for k in 0..d {
                    let g = (0..d as u64).fold(Interval::zero(96), |acc, j| {
                        acc.add(&ctx.eval(&basis[i], j).mul(&ctx.eval(&basis[k], j)))
                    });
                    let want = if i != k { 0 } else if i == 0 { d } else { 2 * d };
                    assert!(g.contains(&Interval::from_int(want, 96)), "n={n} ({i},{k}): {g}");
                }
            }
        }
    }

    #[test]
    fn squared_distance_matches_numeric() {
        let s = sv("+-");
        let a = e(1, &[1, 1]);
        let d = squared_distance(Level(2), &s, &a).unwrap();
        let v = crate::galois::embed(&d, 0, 64).unwrap();
        let pi = std::f64::consts::PI;
        let t = [2.0 * (pi / 8.0).cos(), -2.0 * (3.0 * pi / 8.0).cos()];
        let mu = [1.0 + 2f64.sqrt(), 1.0 - 2f64.sqrt()];
        let want: f64 = (0..2).map(|j| (t[j] - mu[j]).powi(2)).sum();
        assert!((v.mid_f64() - want).abs() < 1e-12);
        assert!((want - 0.4442).abs() < 1e-4);
    }

    #[test]
    fn cvp_examples() {
        for n in 1..=4 {
            let r = nearest_lattice(Level(n), &SignVector::ones(Level(n - 1).degree())).unwrap();
            assert_eq!(r.best, RingElem::one(Level(n - 1)), "n = {n}");
            assert_eq!(r.minimizers.len(), 1);
        }
        assert_eq!(nearest_lattice(Level(1), &sv("-")).unwrap().best, e(0, &[-1]));
        assert_eq!(nearest_lattice(Level(2), &sv("+-")).unwrap().best, e(1, &[1, 1]));
        assert_eq!(nearest_lattice(Level(2), &sv("-+")).unwrap().best, e(1, &[-1, -1]));
        assert!(nearest_lattice(Level(6), &SignVector::ones(32)).is_err());
    }

    #[test]
    fn cvp_all_ones_level_five() {
        let r = nearest_lattice(Level(5), &SignVector::ones(16)).unwrap();
        assert!(r.best.is_one());
        assert_eq!(r.minimizers.len(), 1);
    }

    /// Brute force over a coefficient box with f64 distances.
    #[test]
    fn cvp_agrees_with_brute_force_n2() {
        let pi = std::f64::consts::PI;
        let xs = [2.0 * (pi / 8.0).cos(), 2.0 * (3.0 * pi / 8.0).cos()];
        let ys = [2f64.sqrt(), -(2f64.sqrt())];
        for s in SignVector::all(2) {
            let mut best = (f64::INFINITY, (0, 0));
            for c0 in -4..=4 {
                for c1 in -4..=4 {
                    let dist: f64 = (0..2)
                        .map(|j| (s.get(j) as f64 * xs[j] - (c0 as f64 + c1 as f64 * ys[j])).powi(2))
                        .sum();
                    if dist < best.0 {
                        best = (dist, (c0, c1));
                    }
                }
            }
            let r = nearest_lattice(Level(2), &s).unwrap();
            assert_eq!(r.best, e(1, &[best.1 .0, best.1 .1]), "{s}");
        }
    }

    #[test]
    fn symmetric_under_negation() {
        for s in SignVector::all(4) {
            let a = nearest_lattice(Level(3), &s).unwrap();
            let b = nearest_lattice(Level(3), &s.negate()).unwrap();
            assert_eq!(b.best, -a.best, "{s}");
        }
    }

    #[test]
    fn closed_form_bounds_n1() {
        let t12 = bound_table(Level(1), PcfType::T12, 64).unwrap();
        let r = &t12.rows[0];
        assert_eq!(r.signs, sv("+"));
        assert!((r.b[0].mid_f64() - (4.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!((r.c[0].mid_f64() - 2.619560576453013).abs() < 1e-12);
        let t03 = bound_table(Level(1), PcfType::T03, 64).unwrap();
        assert!((t03.rows[0].b[0].mid_f64() - (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!((t03.rows[0].c[0].mid_f64() - 2.4631737317054054).abs() < 1e-12);
        for row in t12.rows.iter().chain(&t03.rows) {
            for (b, c) in row.b.iter().zip(&row.c) {
                assert_eq!(b.sign(), Some(1));
                assert_eq!(c.sign(), Some(1));
                let asinh = b.mid_f64().asinh();
                assert!((c.mid_f64() - asinh).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn table_rendering() {
        let t = bound_table(Level(2), PcfType::T12, 64).unwrap();
        assert_eq!(t.rows.len(), 4);
        let csv = t.to_csv();
        assert_eq!(csv.lines().count(), 1 + 8);
        assert!(csv.starts_with("s,sigma,a_s,b,C\n++,0,"));
        assert!(t.to_text().contains("sigma"));
    }

    #[test]
    fn exclusion_examples() {
        assert!(!bound_excludes(&delta(Level(1)).unwrap(), PcfType::T12).unwrap());
        assert!(!bound_excludes(&eta(Level(1)).unwrap(), PcfType::T03).unwrap());
        let big = rel_unit_from(&e(1, &[99, 70])).unwrap();
        assert!(bound_excludes(&big, PcfType::T12).unwrap());
        assert!(bound_excludes(&rel_unit_from(&e(1, &[1])).unwrap(), PcfType::T12).is_err());
    }
}
