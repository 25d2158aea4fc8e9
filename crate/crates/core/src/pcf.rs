//! Periodic continued fractions over `Z[X_{n-1}]`: convergents, E-matrices,
//! variety membership, the convergence checks for period 2 and 3, and
//! evaluation.

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::galois::{embed, sign_of, EmbeddingContext};
use crate::interval::{refine, Interval, DEFAULT_PRECISION, MAX_PRECISION, MIN_PRECISION};
use crate::ring::{check_level, Level, RingElem};

/// `[c_0, ..., c_{N-1}, overline{c_N, ..., c_{N+ℓ-1}}]` with coefficients at
/// one level. Zero partial quotients are allowed; `N` and `ℓ` are taken as
/// given, without a minimality reduction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pcf {
    level: Level,
    preperiod: Vec<RingElem>,
    period: Vec<RingElem>,
}

impl Pcf {
    pub fn new(level: Level, preperiod: Vec<RingElem>, period: Vec<RingElem>) -> Result<Self> {
        check_level(level)?;
        if period.is_empty() {
            return Err(Error::Precondition("period must be nonempty".into()));
        }
        for c in preperiod.iter().chain(&period) {
            if c.level() != level {
                return Err(Error::LevelMismatch { left: level, right: c.level() });
            }
            if !c.is_integral() {
                return Err(Error::NotIntegral);
            }
        }
        Ok(Pcf { level, preperiod, period })
    }

    /// Level of the coefficients (`n - 1`).
    pub fn level(&self) -> Level {
        self.level
    }

    /// Level `n` of the number `X_n` the fraction is meant to expand.
    pub fn target_level(&self) -> Level {
        self.level.child()
    }

    pub fn preperiod(&self) -> &[RingElem] {
        &self.preperiod
    }

    pub fn period(&self) -> &[RingElem] {
        &self.period
    }

    /// `(N, ℓ)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.preperiod.len(), self.period.len())
    }

    /// `c_i`: the preperiod, then the period repeated.
    pub fn coefficient(&self, i: usize) -> &RingElem {
        let n = self.preperiod.len();
        if i < n {
            &self.preperiod[i]
        } else {
            &self.period[(i - n) % self.period.len()]
        }
    }

    /// Parses `[c0, ..., cN-1 | p0, ..., pl-1]`. Coefficients are either
    /// canonical `Lk:[...]` elements or bare rationals placed at `level`.
    /// Without a `|`, the whole list is the period.
    pub fn parse(s: &str, level: Level) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| Error::parse(t, "expected `[ ... | ... ]`"))?;
        let mut groups: Vec<Vec<String>> = vec![Vec::new()];
        let mut depth = 0i32;
        let mut token = String::new();
        let flush = |token: &mut String, groups: &mut Vec<Vec<String>>| -> Result<()> {
            let tok = token.trim().to_string();
            token.clear();
            if tok.is_empty() {
                return Err(Error::parse(t, "empty coefficient"));
            }
            groups.last_mut().unwrap().push(tok);
            Ok(())
        };
        for ch in inner.chars() {
            match ch {
                '[' => {
                    depth += 1;
                    token.push(ch);
                }
                ']' => {
                    depth -= 1;
                    if depth < 0 {
                        return Err(Error::parse(t, "unbalanced `]`"));
                    }
                    token.push(ch);
                }
                ',' if depth == 0 => flush(&mut token, &mut groups)?,
                '|' if depth == 0 => {
                    if !token.trim().is_empty() {
                        flush(&mut token, &mut groups)?;
                    }
                    if groups.len() > 1 {
                        return Err(Error::parse(t, "more than one `|`"));
                    }
                    groups.push(Vec::new());
                }
                _ => token.push(ch),
            }
        }
        if depth != 0 {
            return Err(Error::parse(t, "unbalanced `[`"));
        }
        if !token.trim().is_empty() {
            flush(&mut token, &mut groups)?;
        }
        let parse_all =
            |g: &[String]| g.iter().map(|tok| RingElem::parse_at(tok, level)).collect::<Result<Vec<_>>>();
        let (pre, per) = match groups.as_slice() {
            [per] => (Vec::new(), parse_all(per)?),
            [pre, per] => (parse_all(pre)?, parse_all(per)?),
            _ => unreachable!(),
        };
        Pcf::new(level, pre, per)
    }

    /// Human-readable form such as `[2, bar(-4 - 2X_1, 4)]`.
    pub fn pretty(&self) -> String {
        let mut parts: Vec<String> = self.preperiod.iter().map(RingElem::pretty).collect();
        let bar = self.period.iter().map(RingElem::pretty).collect::<Vec<_>>().join(", ");
        parts.push(format!("bar({bar})"));
        format!("[{}]", parts.join(", "))
    }
}

impl fmt::Display for Pcf {
    /// Canonical textual form `[c0, ... | p0, ...]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[RingElem]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        write!(f, "[{} | {}]", join(&self.preperiod), join(&self.period))
    }
}

impl fmt::Debug for Pcf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pcf({})", self.pretty())
    }
}

/// 2×2 matrix over one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2 {
    pub a11: RingElem,
    pub a12: RingElem,
    pub a21: RingElem,
    pub a22: RingElem,
}

impl Mat2 {
    pub fn identity(level: Level) -> Self {
        Mat2 {
            a11: RingElem::one(level),
            a12: RingElem::zero(level),
            a21: RingElem::zero(level),
            a22: RingElem::one(level),
        }
    }

    /// `[[c, 1], [1, 0]]`.
    pub fn elementary(c: &RingElem) -> Self {
        let level = c.level();
        Mat2 { a11: c.clone(), a12: RingElem::one(level), a21: RingElem::one(level), a22: RingElem::zero(level) }
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a11: &(&self.a11 * &o.a11) + &(&self.a12 * &o.a21),
            a12: &(&self.a11 * &o.a12) + &(&self.a12 * &o.a22),
            a21: &(&self.a21 * &o.a11) + &(&self.a22 * &o.a21),
            a22: &(&self.a21 * &o.a12) + &(&self.a22 * &o.a22),
        }
    }

    pub fn det(&self) -> RingElem {
        &(&self.a11 * &self.a22) - &(&self.a12 * &self.a21)
    }

    pub fn trace(&self) -> RingElem {
        &self.a11 + &self.a22
    }

    pub fn scalar(level: Level, k: i64) -> Self {
        let mut m = Self::identity(level);
        m.a11 = RingElem::from_int(level, k);
        m.a22 = RingElem::from_int(level, k);
        m
    }

    /// True when the matrix has the shape `[[p, X_n^2 q], [q, p]]`, where
    /// `X_n^2 = 2 + X_{n-1}` and the entries sit at level `n-1`.
    pub fn is_pell_shaped(&self) -> bool {
        let xsq = RingElem::generator(self.a11.level()).add_int(2);
        self.a11 == self.a22 && self.a12 == &xsq * &self.a21
    }
}

/// `M([c_0, ..., c_m])`, the ordered product of elementary matrices.
pub fn m_matrix(level: Level, coeffs: &[RingElem]) -> Mat2 {
    coeffs.iter().fold(Mat2::identity(level), |acc, c| acc.mul(&Mat2::elementary(c)))
}

/// `(p_k, q_k, p_{k-1}, q_{k-1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergents {
    pub p: RingElem,
    pub q: RingElem,
    pub p_prev: RingElem,
    pub q_prev: RingElem,
}

/// The `k`-th convergent of `pcf`.
pub fn convergents(pcf: &Pcf, k: usize) -> Convergents {
    let coeffs: Vec<RingElem> = (0..=k).map(|i| pcf.coefficient(i).clone()).collect();
    let m = m_matrix(pcf.level, &coeffs);
    Convergents { p: m.a11, q: m.a21, p_prev: m.a12, q_prev: m.a22 }
}

fn check_shape(pcf: &Pcf) -> Result<()> {
    let (n, l) = pcf.shape();
    if n > 1 {
        return Err(Error::UnsupportedShape { preperiod: n, period: l });
    }
    Ok(())
}

/// `M([x_1..x_ℓ])` for `N = 0`, `M([y_1, x_1..x_ℓ, 0, -y_1, 0])` for `N = 1`.
pub fn e_matrix(pcf: &Pcf) -> Result<Mat2> {
    check_shape(pcf)?;
    let level = pcf.level;
    let mut coeffs = Vec::new();
    if let Some(y) = pcf.preperiod.first() {
        coeffs.push(y.clone());
        coeffs.extend(pcf.period.iter().cloned());
        coeffs.extend([RingElem::zero(level), -y, RingElem::zero(level)]);
    } else {
        coeffs.extend(pcf.period.iter().cloned());
    }
    Ok(m_matrix(level, &coeffs))
}

/// Matrix fixing the value, built as in the Pell-identity argument:
/// `M([a_0..a_ℓ]) [[0, 1], [1, -a_0]]` for `N = 1`, `M(period)` for `N = 0`.
pub fn fixing_matrix(pcf: &Pcf) -> Result<Mat2> {
    check_shape(pcf)?;
    let level = pcf.level;
    match pcf.preperiod.first() {
        None => Ok(m_matrix(level, &pcf.period)),
        Some(a0) => {
            let mut coeffs = vec![a0.clone()];
            coeffs.extend(pcf.period.iter().cloned());
            let tail = Mat2 { a11: RingElem::zero(level), a12: RingElem::one(level), a21: RingElem::one(level), a22: -a0 };
            Ok(m_matrix(level, &coeffs).mul(&tail))
        }
    }
}

fn require_target(pcf: &Pcf, target: Level) -> Result<()> {
    if target != pcf.target_level() {
        return Err(Error::LevelMismatch { left: pcf.target_level(), right: target });
    }
    Ok(())
}

/// Membership of the coefficient vector in the PCF variety of `X_n`:
/// `E_22 = E_11` and `E_12 = X_n^2 E_21`.
pub fn variety_member(pcf: &Pcf, target: Level) -> Result<bool> {
    require_target(pcf, target)?;
    Ok(e_matrix(pcf)?.is_pell_shaped())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Convergence {
    Converges,
    Fails(String),
}

impl Convergence {
    pub fn converges(&self) -> bool {
        matches!(self, Convergence::Converges)
    }
}

/// The three convergence conditions for period 2 and 3: `E ≠ (√-1)^ℓ I`,
/// every cyclic rotation of the period has `M(..)_21 ≠ 0`, and
/// `(-1)^ℓ Tr(E)^2 ∉ [0, 4)` under the identity embedding (for ℓ = 2 this is
/// `Tr(E)^2 >= 4`, for ℓ = 3 it is `Tr(E) ≠ 0`).
pub fn convergence_check(pcf: &Pcf) -> Result<Convergence> {
    check_shape(pcf)?;
    let (n, l) = pcf.shape();
    if !(2..=3).contains(&l) {
        return Err(Error::UnsupportedShape { preperiod: n, period: l });
    }
    let level = pcf.level;
    let e = e_matrix(pcf)?;
    // (√-1)^2 = -1; (√-1)^3 is not real, so E can never equal it
    if l == 2 && e == Mat2::scalar(level, -1) {
        return Ok(Convergence::Fails("E = -I".into()));
    }
    for r in 0..l {
        let rotated: Vec<RingElem> = (0..l).map(|i| pcf.period[(r + i) % l].clone()).collect();
        if m_matrix(level, &rotated).a21.is_zero() {
            return Ok(Convergence::Fails(format!("M(rotation {r})_21 = 0")));
        }
    }
    let tr = e.trace();
    if l == 2 {
        let d = &tr.square() - &RingElem::from_int(level, 4);
        if !d.is_zero() && sign_of(&d, 0)? < 0 {
            return Ok(Convergence::Fails("Tr(E)^2 < 4".into()));
        }
    } else if tr.is_zero() {
        return Ok(Convergence::Fails("Tr(E) = 0".into()));
    }
    Ok(Convergence::Converges)
}

/// Value of a convergent PCF.
#[derive(Clone, Debug, PartialEq)]
pub enum PcfValue {
    /// `sign · X_n`, exact.
    Exact { sign: i8, level: Level },
    /// Certified enclosure of the limit under the identity embedding.
    Numeric(Interval),
}

impl PcfValue {
    pub fn is_plus_generator(&self) -> bool {
        matches!(self, PcfValue::Exact { sign: 1, .. })
    }
}

impl fmt::Display for PcfValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PcfValue::Exact { sign, level } => write!(f, "{}X_{}", if *sign > 0 { '+' } else { '-' }, level.index()),
            PcfValue::Numeric(v) => write!(f, "{v}"),
        }
    }
}

/// Limit of the PCF. Pell-shaped E-matrices give `sgn(p q) X_n` exactly;
/// otherwise the attracting fixed point of `E` is enclosed numerically.
pub fn evaluate(pcf: &Pcf, target: Level) -> Result<PcfValue> {
    evaluate_at(pcf, target, DEFAULT_PRECISION)
}

/// [`evaluate`] with numeric values enclosed to width below `2^(1 - precision)`.
pub fn evaluate_at(pcf: &Pcf, target: Level, precision: u32) -> Result<PcfValue> {
    if precision < MIN_PRECISION {
        return Err(Error::Precondition(format!("precision {precision} below {MIN_PRECISION} bits")));
    }
    require_target(pcf, target)?;
    if let Convergence::Fails(why) = convergence_check(pcf)? {
        return Err(Error::Divergent(why));
    }
    let e = e_matrix(pcf)?;
    if e.is_pell_shaped() {
        let sign = sign_of(&(&e.a11 * &e.a21), 0)?;
        return Ok(PcfValue::Exact { sign, level: target });
    }
    fixed_point(&e, precision).map(PcfValue::Numeric)
}

/// Attracting fixed point `(λ - d)/c` of `z ↦ (az + b)/(cz + d)`, with `λ`
/// the eigenvalue of larger modulus.
fn fixed_point(e: &Mat2, precision: u32) -> Result<Interval> {
    if e.a21.is_zero() {
        return Err(Error::Divergent("E_21 = 0".into()));
    }
    let level = e.a11.level();
    let det = e.det();
    refine(precision + 32, MAX_PRECISION.max(4 * precision), |w| {
        let ctx = EmbeddingContext::get(level, w);
        let (a, c, d) = (ctx.eval(&e.a11, 0), ctx.eval(&e.a21, 0), ctx.eval(&e.a22, 0));
        let t = a.add(&d);
        let disc = t.square().sub(&ctx.eval(&det, 0).mul_int(&BigInt::from(4)));
        let root = disc.sqrt()?;
        let lambda = match t.sign()? {
            1 => t.add(&root),
            -1 => t.sub(&root),
            _ => return None,
        }
        .div_int(&BigInt::from(2));
        let v = lambda.sub(&d).div(&c)?;
        v.width_below(precision).then_some(v)
    })
}

/// Value of the finite fraction made of the preperiod followed by `periods`
/// full periods, enclosed to width below `2^(1 - precision)`.
pub fn truncated_value(pcf: &Pcf, periods: usize, precision: u32) -> Result<Interval> {
    let (n, l) = pcf.shape();
    let k = n + periods * l;
    if k == 0 {
        return Err(Error::Precondition("empty finite continued fraction".into()));
    }
    let c = convergents(pcf, k - 1);
    if c.q.is_zero() {
        return Err(Error::Divergent(format!("q_{} = 0", k - 1)));
    }
    refine(precision, MAX_PRECISION.max(4 * precision), |w| {
        let p = embed(&c.p, 0, w).ok()?;
        let q = embed(&c.q, 0, w).ok()?;
        let p = p.with_precision(w + 64);
        let q = q.with_precision(w + 64);
        let v = p.div(&q)?;
        v.width_below(precision).then_some(v)
    })
}

/// `p_{ℓ-1}^2 - X_n^2 q_{ℓ-1}^2 = (-1)^ℓ`, exactly.
pub fn pell_identity_check(pcf: &Pcf, target: Level) -> Result<bool> {
    require_target(pcf, target)?;
    check_shape(pcf)?;
    let l = pcf.period.len();
    let c = convergents(pcf, l - 1);
    let level = pcf.level;
    let xsq = RingElem::generator(level).add_int(2);
    let lhs = &c.p.square() - &(&xsq * &c.q.square());
    let rhs = RingElem::from_int(level, if l.is_multiple_of(2) { 1 } else { -1 });
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(level: u32, c: &[i64]) -> RingElem {
        RingElem::from_i64s(Level(level), c)
    }

    fn ints(level: u32, pre: &[i64], per: &[i64]) -> Pcf {
        let f = |v: &[i64]| v.iter().map(|&x| e(level, &[x])).collect();
        Pcf::new(Level(level), f(pre), f(per)).unwrap()
    }

    fn mat(v: [i64; 4]) -> Mat2 {
        Mat2 { a11: e(0, &[v[0]]), a12: e(0, &[v[1]]), a21: e(0, &[v[2]]), a22: e(0, &[v[3]]) }
    }

    #[test]
    fn convergent_examples() {
        let pcf = ints(0, &[2], &[-2, 4]);
        let c0 = convergents(&pcf, 0);
        assert_eq!((c0.p, c0.q, c0.p_prev, c0.q_prev), (e(0, &[2]), e(0, &[1]), e(0, &[1]), e(0, &[0])));
        let c2 = convergents(&pcf, 2);
        assert_eq!((c2.p.clone(), c2.q.clone()), (e(0, &[-10]), e(0, &[-7])));
        let det = &(&c2.p * &c2.q_prev) - &(&c2.p_prev * &c2.q);
        assert_eq!(det, e(0, &[-1]));
    }

    #[test]
    fn e_matrix_examples() {
        assert_eq!(e_matrix(&ints(0, &[], &[1, 1, 0])).unwrap(), mat([1, 2, 1, 1]));
        assert_eq!(e_matrix(&ints(0, &[2], &[-2, 4])).unwrap(), mat([-3, -4, -2, -3]));
        assert_eq!(e_matrix(&ints(0, &[], &[7])).unwrap(), mat([7, 1, 1, 0]));
        assert!(matches!(e_matrix(&ints(0, &[1, 2], &[3])), Err(Error::UnsupportedShape { .. })));
    }

    #[test]
    fn fixing_matrix_agrees_with_e_matrix() {
        for pcf in [ints(0, &[2], &[-2, 4]), ints(0, &[1], &[2, 2]), ints(0, &[], &[1, 1, 0])] {
            assert_eq!(fixing_matrix(&pcf).unwrap(), e_matrix(&pcf).unwrap());
        }
    }

    #[test]
    fn variety_examples() {
        assert!(variety_member(&ints(0, &[2], &[-2, 4]), Level(1)).unwrap());
        let eta2 = Pcf::new(Level(1), vec![], vec![e(1, &[3, -1]), e(1, &[1, 1]), e(1, &[3, -2])]).unwrap();
        assert!(variety_member(&eta2, Level(2)).unwrap());
        assert!(!variety_member(&ints(0, &[], &[0, 0, 0]), Level(1)).unwrap());
        assert!(variety_member(&ints(0, &[2], &[-2, 4]), Level(2)).is_err());
    }

    #[test]
    fn convergence_examples() {
        assert!(convergence_check(&ints(0, &[2], &[-2, 4])).unwrap().converges());
        assert!(convergence_check(&ints(0, &[], &[1, 1, 0])).unwrap().converges());
        assert_eq!(convergence_check(&ints(0, &[], &[0, 0, 0])).unwrap(), Convergence::Fails("Tr(E) = 0".into()));
        // x_2 x_3 + 1 = 0 in the first rotation
        let vanishing = ints(0, &[], &[1, 1, -1]);
        assert_eq!(convergence_check(&vanishing).unwrap(), Convergence::Fails("M(rotation 0)_21 = 0".into()));
        assert!(!convergence_check(&ints(0, &[], &[0, 0])).unwrap().converges());
        assert!(matches!(convergence_check(&ints(0, &[], &[1])), Err(Error::UnsupportedShape { .. })));
    }

    #[test]
    fn evaluate_examples() {
        for pcf in [ints(0, &[2], &[-2, 4]), ints(0, &[1], &[2, 2]), ints(0, &[], &[1, 1, 0])] {
            assert_eq!(evaluate(&pcf, Level(1)).unwrap(), PcfValue::Exact { sign: 1, level: Level(1) });
        }
        assert!(matches!(evaluate(&ints(0, &[], &[0, 0, 0]), Level(1)), Err(Error::Divergent(_))));
    }

    #[test]
    fn evaluate_numeric_golden_ratio() {
        // [1, 1, ...] with period written as (1, 1): (1 + √5)/2
        let v = evaluate(&ints(0, &[], &[1, 1]), Level(1)).unwrap();
        match v {
            PcfValue::Numeric(iv) => assert!((iv.mid_f64() - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15),
            other => panic!("expected numeric value, got {other}"),
        }
    }

    #[test]
    fn pell_examples() {
        assert!(pell_identity_check(&ints(0, &[2], &[-2, 4]), Level(1)).unwrap());
        assert!(pell_identity_check(&ints(0, &[], &[1, 1, 0]), Level(1)).unwrap());
        assert!(pell_identity_check(&ints(0, &[1], &[2, 2]), Level(1)).unwrap());
        assert!(!pell_identity_check(&ints(0, &[1], &[3, 2]), Level(1)).unwrap());
    }

    #[test]
    fn truncation_approaches_sqrt2() {
        let v = truncated_value(&ints(0, &[2], &[-2, 4]), 30, 128).unwrap();
        assert!((v.mid_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn parse_and_print() {
        let p = Pcf::parse("[2|-2,4]", Level(0)).unwrap();
        assert_eq!(p, ints(0, &[2], &[-2, 4]));
        let q = Pcf::parse("[ | L1:[3,-1], L1:[1,1], 3]", Level(1)).unwrap();
        assert_eq!(q.shape(), (0, 3));
        assert_eq!(q.period()[2], e(1, &[3]));
        assert_eq!(Pcf::parse(&q.to_string(), Level(1)).unwrap(), q);
        assert_eq!(Pcf::parse("[1,1,0]", Level(0)).unwrap().shape(), (0, 3));
        assert_eq!(q.pretty(), "[bar(3 - X_1, 1 + X_1, 3)]");
        for bad in ["2|-2,4", "[2|-2,,4]", "[1|2|3]", "[L1:[1,2|3]", "[x|1]", "[1|]"] {
            assert!(Pcf::parse(bad, Level(1)).is_err(), "{bad}");
        }
        let err = Pcf::parse("[2|-2,zz]", Level(0)).unwrap_err();
        assert!(err.to_string().contains("zz"), "{err}");
    }
}
