//! Expansion and evaluation reports shared by the command-line and browser
//! front ends.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::format_sig17;
use crate::pcf::{convergence_check, evaluate, evaluate_at, pell_identity_check, variety_member, Convergence, Pcf, PcfValue};
use crate::ring::{Level, RingElem};
use crate::units::{
    delta, eta, pcf03_from_unit, pcf12_from_unit, pcf13_from_unit, rel_unit_from, unit_from_pcf03, unit_from_pcf12,
    PellSolution, RelUnit,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpansionType {
    T12,
    T03,
    T13,
}

impl FromStr for ExpansionType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "12" => Ok(ExpansionType::T12),
            "03" => Ok(ExpansionType::T03),
            "13" => Ok(ExpansionType::T13),
            _ => Err(Error::parse(s, "expected `12`, `03` or `13`")),
        }
    }
}

impl fmt::Display for ExpansionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExpansionType::T12 => "(1,2)",
            ExpansionType::T03 => "(0,3)",
            ExpansionType::T13 => "(1,3)",
        })
    }
}

/// `delta`, `eta`, or an element of level `n`.
pub fn parse_unit(text: &str, n: Level) -> Result<RelUnit> {
    match text.trim() {
        "delta" => delta(n),
        "eta" => eta(n),
        other => {
            let x = RingElem::parse_at(other, n)?;
            if x.level() != n {
                return Err(Error::LevelMismatch { left: n, right: x.level() });
            }
            rel_unit_from(&x)
                .ok_or_else(|| Error::Precondition(format!("{} is not a relative unit at {n}", x.pretty())))
        }
    }
}

/// A named verification flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub name: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expansion {
    pub level: u32,
    pub kind: String,
    pub unit: String,
    pub unit_pretty: String,
    pub norm_sign: i8,
    pub pcf: String,
    pub pcf_pretty: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pell: Option<String>,
    pub flags: Vec<Flag>,
}

impl Expansion {
    pub fn all_ok(&self) -> bool {
        self.flags.iter().all(|f| f.ok)
    }
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "unit:  {} (relative norm {:+})", self.unit_pretty, self.norm_sign)?;
        writeln!(f, "type:  {}", self.kind)?;
        writeln!(f, "pcf:   {}", self.pcf_pretty)?;
        writeln!(f, "text:  {}", self.pcf)?;
        if let Some(p) = &self.pell {
            writeln!(f, "pell:  {p}")?;
        }
        for flag in &self.flags {
            writeln!(f, "{:<5} {}", if flag.ok { "ok" } else { "FAIL" }, flag.name)?;
        }
        Ok(())
    }
}

fn flag(name: &str, ok: bool) -> Flag {
    Flag { name: name.into(), ok }
}

fn pcf_flags(pcf: &Pcf, n: Level) -> Result<Vec<Flag>> {
    let on_variety = variety_member(pcf, n)?;
    let conv = convergence_check(pcf)?;
    let value = if conv.converges() { Some(evaluate(pcf, n)?) } else { None };
    Ok(vec![
        flag(&format!("on the variety of X_{}", n.index()), on_variety),
        flag("convergence conditions hold", conv.converges()),
        flag(
            &format!("value is +X_{} (exact)", n.index()),
            value.is_some_and(|v| v == PcfValue::Exact { sign: 1, level: n }),
        ),
        flag("Pell identity p^2 - X^2 q^2 = (-1)^l (exact)", pell_identity_check(pcf, n)?),
    ])
}

fn pell_text(s: &PellSolution) -> String {
    format!("x = {}, y = {}, x^2 - X^2 y^2 = {}", s.x.pretty(), s.y.pretty(), s.rhs)
}

/// Expands `unit` as a PCF of the requested type and verifies it.
pub fn expand(unit: &RelUnit, kind: ExpansionType) -> Result<Expansion> {
    let n = unit.level();
    let (pcf, pell, round_trip) = match kind {
        ExpansionType::T12 => {
            let pcf = pcf12_from_unit(unit)?;
            let back = unit_from_pcf12(&pcf).ok();
            (pcf, None, back.as_ref() == Some(unit))
        }
        ExpansionType::T03 => {
            let pcf = pcf03_from_unit(unit)?;
            let back = unit_from_pcf03(&pcf).ok();
            (pcf, None, back.as_ref() == Some(unit))
        }
        ExpansionType::T13 => {
            let (pcf, sol) = pcf13_from_unit(unit)?;
            let ok = sol.holds() && sol.unit().ok().as_ref() == Some(unit);
            (pcf, Some(pell_text(&sol)), ok)
        }
    };
    let mut flags = pcf_flags(&pcf, n)?;
    flags.push(flag(
        if kind == ExpansionType::T13 { "second convergent reassembles the unit" } else { "round trip to the unit" },
        round_trip,
    ));
    Ok(Expansion {
        level: n.index(),
        kind: kind.to_string(),
        unit: unit.elem().to_string(),
        unit_pretty: unit.elem().pretty(),
        norm_sign: unit.norm_sign(),
        pcf: pcf.to_string(),
        pcf_pretty: pcf.pretty(),
        pell,
        flags,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub level: u32,
    pub pcf: String,
    pub pcf_pretty: String,
    pub on_variety: bool,
    pub convergence: String,
    pub converges: bool,
    /// `+X_n`, `-X_n`, or a certified enclosure `mid ± rad`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approx: Option<String>,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pell_identity: Option<bool>,
}

impl fmt::Display for Evaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pcf:         {}", self.pcf_pretty)?;
        writeln!(f, "on variety:  {}", if self.on_variety { "yes" } else { "no" })?;
        writeln!(f, "convergence: {}", self.convergence)?;
        if let Some(v) = &self.value {
            let tag = if self.exact { "exact" } else { "numeric (certified interval)" };
            writeln!(f, "value:       {v} [{tag}]")?;
        }
        if let Some(a) = &self.approx {
            writeln!(f, "approx:      {a}")?;
        }
        if let Some(p) = self.pell_identity {
            writeln!(f, "pell:        {}", if p { "holds" } else { "fails" })?;
        }
        Ok(())
    }
}

/// Parses and evaluates a PCF whose coefficients sit at level `n - 1`;
/// numeric values are enclosed at `precision` bits.
pub fn evaluate_text(text: &str, n: Level, precision: u32) -> Result<Evaluation> {
    let m = n.parent().ok_or(Error::LevelZero { op: "eval" })?;
    let pcf = Pcf::parse(text, m)?;
    let shape = pcf.shape();
    if shape.0 > 1 || !(2..=3).contains(&shape.1) {
        return Err(Error::UnsupportedShape { preperiod: shape.0, period: shape.1 });
    }
    let on_variety = variety_member(&pcf, n)?;
    let conv = convergence_check(&pcf)?;
    let (value, approx, exact) = if conv.converges() {
        match evaluate_at(&pcf, n, precision)? {
            v @ PcfValue::Exact { sign, .. } => {
                let x = crate::galois::embed(&RingElem::generator(n), 0, 64)?.mid_f64();
                (Some(v.to_string()), Some(format_sig17(f64::from(sign) * x)), true)
            }
            PcfValue::Numeric(iv) => (Some(iv.to_string()), Some(format_sig17(iv.mid_f64())), false),
        }
    } else {
        (None, None, false)
    };
    Ok(Evaluation {
        level: n.index(),
        pcf: pcf.to_string(),
        pcf_pretty: pcf.pretty(),
        on_variety,
        convergence: match &conv {
            Convergence::Converges => "converges".into(),
            Convergence::Fails(why) => format!("fails ({why})"),
        },
        converges: conv.converges(),
        value,
        approx,
        exact,
        pell_identity: on_variety.then(|| pell_identity_check(&pcf, n)).transpose()?,
    })
}
