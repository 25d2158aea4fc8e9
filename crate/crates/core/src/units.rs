//! Relative units of `Z[X_n]` over `Z[X_{n-1}]`, the two unit/PCF
//! bijections, the units `δ_n` and `η_n`, and the Pell correspondence.

use std::fmt;

use crate::error::{Error, Result};
use crate::galois::{sigma, sign_of};
use crate::pcf::{convergence_check, Convergence, convergents, evaluate, variety_member, Pcf};
use crate::ring::{cos_element, Level, RingElem, TowerSplit};

/// An element of `Z[X_n]` whose relative norm down to `Z[X_{n-1}]` is `±1`,
/// together with its tower parts `p + X_n q`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RelUnit {
    elem: RingElem,
    p: RingElem,
    q: RingElem,
    norm_sign: i8,
}

impl RelUnit {
    pub fn elem(&self) -> &RingElem {
        &self.elem
    }

    pub fn p(&self) -> &RingElem {
        &self.p
    }

    pub fn q(&self) -> &RingElem {
        &self.q
    }

    pub fn norm_sign(&self) -> i8 {
        self.norm_sign
    }

    pub fn level(&self) -> Level {
        self.elem.level()
    }

    /// `ε = ±1`.
    pub fn is_torsion(&self) -> bool {
        self.q.is_zero()
    }

    pub fn mul(&self, other: &RelUnit) -> Result<RelUnit> {
        let e = self.elem.checked_mul(&other.elem)?;
        Ok(Self::from_parts(e, self.norm_sign * other.norm_sign))
    }

    /// `ε^{-1} = N(ε) τ(ε)`.
    pub fn inverse(&self) -> RelUnit {
        let n = self.level();
        let s = i64::from(self.norm_sign);
        let p = self.p.lift(n).expect("parent level").scale(&s.into());
        let q = self.q.lift(n).expect("parent level").scale(&(-s).into());
        Self::from_parts(&p + &q.mul_generator(), self.norm_sign)
    }

    pub fn neg(&self) -> RelUnit {
        RelUnit { elem: -&self.elem, p: -&self.p, q: -&self.q, norm_sign: self.norm_sign }
    }

    /// `ε^e` for any integer `e`.
    pub fn pow(&self, e: i64) -> RelUnit {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = RelUnit::one(self.level());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base).expect("same level");
        }
        acc
    }

    pub fn one(level: Level) -> RelUnit {
        rel_unit_from(&RingElem::one(level)).expect("1 is a relative unit")
    }

    /// `σ^j(ε)`; Galois conjugates of relative units are relative units
    /// with the conjugate norm, and `σ(±1) = ±1`.
    pub fn conjugate(&self, j: u64) -> RelUnit {
        rel_unit_from(&sigma(&self.elem, j)).expect("conjugate of a relative unit")
    }

    fn from_parts(elem: RingElem, norm_sign: i8) -> RelUnit {
        let TowerSplit { p, q } = elem.tower_split().expect("level >= 1");
        let u = RelUnit { elem, p, q, norm_sign };
        u.assert_parts();
        u
    }

    fn assert_parts(&self) {
        if !self.q.is_zero() {
            assert!(!self.p.is_zero(), "relative unit with p = 0");
        }
    }
}

impl fmt::Debug for RelUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RelUnit({}, N = {:+})", self.elem.pretty(), self.norm_sign)
    }
}

impl fmt::Display for RelUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.elem)
    }
}

/// `Some` when `x` is integral at level `>= 1` with relative norm `±1`.
pub fn rel_unit_from(x: &RingElem) -> Option<RelUnit> {
    if !x.is_integral() || x.level().index() == 0 {
        return None;
    }
    let norm = x.relative_norm().ok()?;
    let norm_sign = if norm.is_one() {
        1
    } else if (-&norm).is_one() {
        -1
    } else {
        return None;
    };
    let TowerSplit { p, q } = x.tower_split().ok()?;
    let u = RelUnit { elem: x.clone(), p, q, norm_sign };
    u.assert_parts();
    Some(u)
}

fn sign_pq_positive(eps: &RelUnit) -> Result<bool> {
    Ok(sign_of(&(&eps.p * &eps.q), 0)? == 1)
}

fn x_squared(level: Level) -> RingElem {
    RingElem::generator(level).add_int(2)
}

/// Membership in `RE_n^+(1,2)`: `N(ε) = 1`, `ε ≠ ±1`, `q | p - 1` and
/// `p q > 0`.
pub fn in_re12(eps: &RelUnit) -> Result<bool> {
    if eps.norm_sign != 1 || eps.is_torsion() {
        return Ok(false);
    }
    if !eps.q.divides(&eps.p.add_int(-1))? {
        return Ok(false);
    }
    sign_pq_positive(eps)
}

/// `[a_0, bar(a_1, a_2)]` with `a_0 = (p-1)/q`, `a_1 = q`, `a_2 = 2 a_0`.
pub fn pcf12_from_unit(eps: &RelUnit) -> Result<Pcf> {
    if !in_re12(eps)? {
        return Err(Error::Precondition(format!("{} is not in RE^+(1,2)", eps.elem.pretty())));
    }
    let a0 = eps.p.add_int(-1).exact_div(&eps.q)?.expect("checked by in_re12");
    let a2 = a0.scale(&2.into());
    Pcf::new(eps.p.level(), vec![a0], vec![eps.q.clone(), a2])
}

fn require_plus_generator(pcf: &Pcf, shape: (usize, usize)) -> Result<()> {
    if pcf.shape() != shape {
        return Err(Error::Precondition(format!(
            "expected shape ({}, {}), got ({}, {})",
            shape.0,
            shape.1,
            pcf.shape().0,
            pcf.shape().1
        )));
    }
    let target = pcf.target_level();
    if !variety_member(pcf, target)? {
        return Err(Error::Precondition(format!("{} is not on the variety of X_{}", pcf.pretty(), target.index())));
    }
    if let Convergence::Fails(why) = convergence_check(pcf)? {
        return Err(Error::Precondition(format!("{} does not converge: {why}", pcf.pretty())));
    }
    if !evaluate(pcf, target)?.is_plus_generator() {
        return Err(Error::Precondition(format!("{} does not converge to +X_{}", pcf.pretty(), target.index())));
    }
    Ok(())
}

/// `ε = a_0 a_1 + 1 + X_n a_1` from a type-(1,2) expansion of `X_n`.
pub fn unit_from_pcf12(pcf: &Pcf) -> Result<RelUnit> {
    require_plus_generator(pcf, (1, 2))?;
    let n = pcf.target_level();
    let (a0, a1) = (&pcf.preperiod()[0], &pcf.period()[0]);
    let p = (a0 * a1).add_int(1).lift(n)?;
    let e = &p + &a1.lift(n)?.mul_generator();
    rel_unit_from(&e).ok_or_else(|| Error::Precondition("reconstructed element is not a relative unit".into()))
}

/// Membership in `RE_n^-(0,3)`: `N(ε) = -1`, `p | X_n^2 q - 1`, `p | q - 1`
/// and `p q > 0`.
pub fn in_re03(eps: &RelUnit) -> Result<bool> {
    if eps.norm_sign != -1 {
        return Ok(false);
    }
    let xq = &x_squared(eps.p.level()) * &eps.q;
    if !eps.p.divides(&xq.add_int(-1))? || !eps.p.divides(&eps.q.add_int(-1))? {
        return Ok(false);
    }
    sign_pq_positive(eps)
}

/// `[bar(a_1, a_2, a_3)]` with `a_1 = (X_n^2 q - 1)/p`, `a_2 = p`,
/// `a_3 = (q - 1)/p`.
pub fn pcf03_from_unit(eps: &RelUnit) -> Result<Pcf> {
    if !in_re03(eps)? {
        return Err(Error::Precondition(format!("{} is not in RE^-(0,3)", eps.elem.pretty())));
    }
    let xq = &x_squared(eps.p.level()) * &eps.q;
    let a1 = xq.add_int(-1).exact_div(&eps.p)?.expect("checked by in_re03");
    let a3 = eps.q.add_int(-1).exact_div(&eps.p)?.expect("checked by in_re03");
    Pcf::new(eps.p.level(), vec![], vec![a1, eps.p.clone(), a3])
}

/// `ε = a_2 + X_n (a_2 a_3 + 1)` from a type-(0,3) expansion of `X_n`.
pub fn unit_from_pcf03(pcf: &Pcf) -> Result<RelUnit> {
    require_plus_generator(pcf, (0, 3))?;
    let n = pcf.target_level();
    let (a2, a3) = (&pcf.period()[1], &pcf.period()[2]);
    let q = (a2 * a3).add_int(1).lift(n)?;
    let e = &a2.lift(n)? + &q.mul_generator();
    rel_unit_from(&e).ok_or_else(|| Error::Precondition("reconstructed element is not a relative unit".into()))
}

fn require_positive(n: Level, op: &'static str) -> Result<Level> {
    n.parent().ok_or(Error::LevelZero { op })
}

/// `δ_n = (X_n + 2)/(X_n - 2)`.
pub fn delta(n: Level) -> Result<RelUnit> {
    require_positive(n, "delta")?;
    let x = RingElem::generator(n);
    let e = x.add_int(2).exact_div(&x.add_int(-2))?.ok_or(Error::NotIntegral)?;
    rel_unit_from(&e).ok_or_else(|| Error::Precondition("delta is not a relative unit".into()))
}

/// `(p, q)` of `δ_n` from the closed forms `(X_{n-1} + 6)/(X_{n-1} - 2)`
/// and `4/(X_{n-1} - 2)`.
pub fn delta_closed_form(n: Level) -> Result<(RingElem, RingElem)> {
    let m = require_positive(n, "delta_closed_form")?;
    let y = RingElem::generator(m);
    let den = y.add_int(-2);
    let p = y.add_int(6).exact_div(&den)?.ok_or(Error::NotIntegral)?;
    let q = RingElem::from_int(m, 4).exact_div(&den)?.ok_or(Error::NotIntegral)?;
    Ok((p, q))
}

/// `η_n = 1 + Σ_{k=1}^{2^n - 1} 2cos(kπ/2^(n+1))`, an element of level `n`.
pub fn eta_element(n: Level) -> Result<RingElem> {
    let mut acc = RingElem::one(n);
    for k in 1..(1u64 << n.index()) {
        acc = &acc + &cos_element(n, k)?;
    }
    Ok(acc)
}

/// `η_n` as a relative unit, `n >= 1`.
pub fn eta(n: Level) -> Result<RelUnit> {
    require_positive(n, "eta")?;
    rel_unit_from(&eta_element(n)?).ok_or_else(|| Error::Precondition("eta is not a relative unit".into()))
}

/// The explicit type-(1,2) expansion `[2, bar(4/(X_{n-1} - 2), 4)]`.
pub fn explicit_pcf12(n: Level) -> Result<Pcf> {
    let m = require_positive(n, "explicit_pcf12")?;
    let (_, q) = delta_closed_form(n)?;
    Pcf::new(m, vec![RingElem::from_int(m, 2)], vec![q, RingElem::from_int(m, 4)])
}

/// The explicit type-(0,3) expansion built from `η_n` and `η_{n-1}`:
/// `[bar(((η_n - η_{n-1})X_n - 1)/η_{n-1}, η_{n-1}, ((η_n - η_{n-1})/X_n - 1)/η_{n-1})]`.
pub fn explicit_pcf03(n: Level) -> Result<Pcf> {
    let m = require_positive(n, "explicit_pcf03")?;
    let x = RingElem::generator(n);
    let eta_n = eta_element(n)?;
    let eta_m = eta_element(m)?.lift(n)?;
    let diff = &eta_n - &eta_m;
    let quotient = |num: RingElem| -> Result<RingElem> {
        num.exact_div(&eta_m)?.ok_or(Error::NotIntegral)?.descend(m)
    };
    let a1 = quotient((&diff * &x).add_int(-1))?;
    let a3 = quotient(diff.checked_div(&x)?.add_int(-1))?;
    Pcf::new(m, vec![], vec![a1, eta_m.descend(m)?, a3])
}

/// `(x, y)` with `x^2 - X_n^2 y^2 = rhs`, all at level `n-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PellSolution {
    pub x: RingElem,
    pub y: RingElem,
    pub rhs: i8,
}

impl PellSolution {
    /// Exact check of the Pell identity.
    pub fn holds(&self) -> bool {
        let lhs = &self.x.square() - &(&x_squared(self.x.level()) * &self.y.square());
        lhs == RingElem::from_int(self.x.level(), self.rhs)
    }

    /// `x + X_n y`.
    pub fn unit(&self) -> Result<RelUnit> {
        let n = self.x.level().child();
        let e = &self.x.lift(n)? + &self.y.lift(n)?.mul_generator();
        rel_unit_from(&e).ok_or_else(|| Error::Precondition("not a Pell solution".into()))
    }
}

/// `ε ↦ (p(ε), q(ε))`.
pub fn pell_map(eps: &RelUnit) -> PellSolution {
    PellSolution { x: eps.p.clone(), y: eps.q.clone(), rhs: eps.norm_sign }
}

/// The type-(1,3) relaxation `[a_1, bar(a_2, a_3, a_1)]` of the type-(0,3)
/// expansion of `ε ∈ RE_n^-(0,3)`, and the second convergent of the
/// relaxation as a Pell solution.
pub fn pcf13_from_unit(eps: &RelUnit) -> Result<(Pcf, PellSolution)> {
    let base = pcf03_from_unit(eps)?;
    let per = base.period();
    let pcf = Pcf::new(base.level(), vec![per[0].clone()], vec![per[1].clone(), per[2].clone(), per[0].clone()])?;
    let c = convergents(&pcf, 2);
    let rhs = if c.p.square() == (&x_squared(pcf.level()) * &c.q.square()).add_int(1) { 1 } else { -1 };
    Ok((pcf, PellSolution { x: c.p, y: c.q, rhs }))
}

/// [`pcf13_from_unit`] for `η_n`.
pub fn pcf13(n: Level) -> Result<(Pcf, PellSolution)> {
    pcf13_from_unit(&eta(n)?)
}
