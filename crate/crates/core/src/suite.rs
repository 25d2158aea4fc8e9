//! The verification suite: the relative norms of `δ_n` and `η_n`, the
//! explicit expansions of `X_n`, the Pell identities, the bijection round
//! trips and a numeric convergence check, for each level up to a maximum.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::enumerate::{enumerate, COMPLETENESS_ASSUMPTION};
use crate::interval::Interval;
use crate::pcf::{convergence_check, evaluate, pell_identity_check, truncated_value, variety_member, Pcf, PcfValue};
use crate::ring::{Level, RingElem};
use crate::units::{
    delta, delta_closed_form, eta, explicit_pcf03, explicit_pcf12, in_re03, in_re12, pcf03_from_unit,
    pcf12_from_unit, pcf13, unit_from_pcf03, unit_from_pcf12,
};

/// Highest level the suite accepts.
pub const MAX_SUITE_LEVEL: u32 = 6;
/// Enumeration bound used for the round-trip checks at levels `<= 3`.
pub const ROUND_TRIP_BOUND: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Evidence {
    Exact,
    /// Certified interval arithmetic.
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub level: u32,
    pub name: String,
    pub evidence: Evidence,
    pub status: Status,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub max_level: u32,
    pub checks: Vec<Check>,
    pub assumption: String,
}

impl SuiteReport {
    pub fn status(&self) -> Status {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if self.checks.iter().any(|c| c.status == Status::Undecided) {
            Status::Undecided
        } else {
            Status::Pass
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Undecided => "UNDECIDED",
            };
            let tag = match c.evidence {
                Evidence::Exact => "exact",
                Evidence::Numeric => "numeric (certified interval)",
            };
            write!(f, "{status:<9} n={} {} [{tag}]", c.level, c.name)?;
            if !c.detail.is_empty() {
                write!(f, ": {}", c.detail)?;
            }
            writeln!(f)?;
        }
        let total = self.checks.len();
        let passed = self.checks.iter().filter(|c| c.status == Status::Pass).count();
        writeln!(f, "{passed}/{total} checks passed (levels 1..={})", self.max_level)
    }
}

struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn record(&mut self, level: u32, name: &str, evidence: Evidence, outcome: Result<std::result::Result<(), String>>) {
        let (status, detail) = match outcome {
            Ok(Ok(())) => (Status::Pass, String::new()),
            Ok(Err(why)) => (Status::Fail, why),
            Err(e) if e.is_undecided() => (Status::Undecided, e.to_string()),
            Err(e) => (Status::Fail, e.to_string()),
        };
        self.checks.push(Check { level, name: name.into(), evidence, status, detail });
    }
}

fn expect(ok: bool, why: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

/// Variety membership, convergence and exact value `+X_n`.
fn check_expansion(pcf: &Pcf, n: Level) -> Result<std::result::Result<(), String>> {
    if !variety_member(pcf, n)? {
        return Ok(Err(format!("{} is off the variety", pcf.pretty())));
    }
    let conv = convergence_check(pcf)?;
    if !conv.converges() {
        return Ok(Err(format!("{} fails convergence: {conv:?}", pcf.pretty())));
    }
    let v = evaluate(pcf, n)?;
    Ok(expect(v == PcfValue::Exact { sign: 1, level: n }, || format!("{} evaluates to {v}", pcf.pretty())))
}

fn level_checks(rec: &mut Recorder, k: u32) {
    let n = Level(k);
    let one = || RingElem::one(Level(k - 1));
    rec.record(k, "relative norm of delta is 1", Evidence::Exact, (|| {
        let d = delta(n)?;
        Ok(expect(d.elem().relative_norm()? == one(), || "N(delta) != 1".into()))
    })());
    rec.record(k, "relative norm of eta is -1", Evidence::Exact, (|| {
        let h = eta(n)?;
        Ok(expect(h.elem().relative_norm()? == -one(), || "N(eta) != -1".into()))
    })());
    rec.record(k, "delta agrees with the closed forms for p and q", Evidence::Exact, (|| {
        let d = delta(n)?;
        let (p, q) = delta_closed_form(n)?;
        Ok(expect(d.p() == &p && d.q() == &q, || format!("split of delta is ({}, {})", d.p(), d.q())))
    })());
    rec.record(k, "type (1,2) expansion from delta", Evidence::Exact, (|| {
        let pcf = pcf12_from_unit(&delta(n)?)?;
        let want = explicit_pcf12(n)?;
        if pcf != want {
            return Ok(Err(format!("{} != {}", pcf.pretty(), want.pretty())));
        }
        check_expansion(&pcf, n)
    })());
    rec.record(k, "type (0,3) expansion from eta", Evidence::Exact, (|| {
        let pcf = pcf03_from_unit(&eta(n)?)?;
        let want = explicit_pcf03(n)?;
        if pcf != want {
            return Ok(Err(format!("{} != {}", pcf.pretty(), want.pretty())));
        }
        check_expansion(&pcf, n)
    })());
    rec.record(k, "Pell identities of the explicit expansions", Evidence::Exact, (|| {
        let ok = pell_identity_check(&explicit_pcf12(n)?, n)? && pell_identity_check(&explicit_pcf03(n)?, n)?;
        Ok(expect(ok, || "p^2 - X^2 q^2 != (-1)^l".into()))
    })());
    rec.record(k, "round trips of delta and eta", Evidence::Exact, (|| {
        let d = delta(n)?;
        let h = eta(n)?;
        let ok = unit_from_pcf12(&pcf12_from_unit(&d)?)? == d && unit_from_pcf03(&pcf03_from_unit(&h)?)? == h;
        Ok(expect(ok, || "round trip changed the unit".into()))
    })());
    rec.record(k, "second convergent of the (1,3) expansion is eta", Evidence::Exact, (|| {
        let (pcf, sol) = pcf13(n)?;
        let ok = sol.unit()? == eta(n)? && pell_identity_check(&pcf, n)?;
        Ok(expect(ok, || format!("p_2 + X q_2 = {} + X ({})", sol.x, sol.y)))
    })());
    if k <= 4 {
        rec.record(k, "30 periods of the delta expansion approximate X_n", Evidence::Numeric, (|| {
            let v = truncated_value(&explicit_pcf12(n)?, 30, 256)?;
            let x = crate::galois::embed(&RingElem::generator(n), 0, 256)?;
            let tol = Interval::from_ratio(&1.into(), &num_bigint::BigInt::from(10u64).pow(12), 256);
            let gap = v.sub(&x).abs();
            Ok(expect(gap.certainly_lt(&tol), || format!("|value - X_n| = {gap}")))
        })());
    }
    if k <= 3 {
        rec.record(k, "round trips on enumerated members", Evidence::Exact, (|| {
            for (e, u) in enumerate(n, ROUND_TRIP_BOUND)? {
                if in_re12(&u)? {
                    let pcf = pcf12_from_unit(&u)?;
                    if unit_from_pcf12(&pcf)? != u || pcf12_from_unit(&unit_from_pcf12(&pcf)?)? != pcf {
                        return Ok(Err(format!("type (1,2) round trip fails at {e}")));
                    }
                }
                if in_re03(&u)? {
                    let pcf = pcf03_from_unit(&u)?;
                    if unit_from_pcf03(&pcf)? != u || pcf03_from_unit(&unit_from_pcf03(&pcf)?)? != pcf {
                        return Ok(Err(format!("type (0,3) round trip fails at {e}")));
                    }
                }
            }
            Ok(Ok(()))
        })());
    }
}

/// Runs every check for levels `1..=max_level`; `max_level = 0` is a
/// vacuous pass.
pub fn run_suite(max_level: u32) -> Result<SuiteReport> {
    if max_level > MAX_SUITE_LEVEL {
        return Err(Error::LevelTooHigh(max_level));
    }
    let mut rec = Recorder { checks: Vec::new() };
    for k in 1..=max_level {
        level_checks(&mut rec, k);
    }
    Ok(SuiteReport { max_level, checks: rec.checks, assumption: COMPLETENESS_ASSUMPTION.into() })
}
