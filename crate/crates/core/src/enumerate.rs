//! Relative units generated by `-1` and the conjugates `σ^j(η_n)`,
//! classified by the two membership predicates, and the log-embedding
//! datasets built from them.
//!
//! The enumeration covers the subgroup `A_n`. That it equals the full group
//! of relative units rests on Weber's class number conjecture.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{bound_excludes, PcfType, SignVector};
use crate::error::{Error, Result};
use crate::galois::{log_embedding, EmbeddingContext, LogVector};
use crate::interval::{format_sig17, refine, Interval, MAX_PRECISION};
use crate::ring::Level;
use crate::units::{eta, in_re03, in_re12, rel_unit_from, RelUnit};

/// Stated with every report built from the enumeration.
pub const COMPLETENESS_ASSUMPTION: &str =
    "enumeration covers the subgroup generated by -1 and the conjugates of eta_n; \
     it is all relative units only under Weber's class number conjecture";

/// Largest number of exponent vectors [`enumerate`] will visit.
pub const MAX_EXPONENT_VECTORS: u64 = 1 << 16;

/// `unit_sign · Π_j σ^j(η_n)^(e_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExponentVector {
    pub e: Vec<i64>,
    pub unit_sign: i8,
}

impl ExponentVector {
    /// `(-1)^(Σ e_j)`, the relative norm of the product.
    pub fn norm_parity(&self) -> i8 {
        if self.e.iter().sum::<i64>().rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.e.iter().map(i64::to_string).collect();
        write!(f, "{}({})", if self.unit_sign > 0 { '+' } else { '-' }, e.join(","))
    }
}

/// One enumerated unit with its classification.
#[derive(Clone, Debug, PartialEq)]
pub struct PointRecord {
    pub exponents: ExponentVector,
    pub unit: RelUnit,
    pub log_coords: LogVector,
    pub member12: bool,
    pub member03: bool,
    /// Signs of `σ^j(p q)`; absent for `±1`.
    pub sign_pattern: Option<SignVector>,
    pub norm_sign: i8,
}

/// `σ^j(η_n)` for `j < 2^(n-1)`. Together with `-1` they generate `A_n`.
pub fn generators(n: Level) -> Result<Vec<RelUnit>> {
    let m = n.parent().ok_or(Error::LevelZero { op: "generators" })?;
    let h = eta(n)?;
    Ok((0..m.degree() as u64).map(|j| h.conjugate(j)).collect())
}

/// Exponent vectors of `[-bound, bound]^d` in lexicographic order.
fn exponent_box(d: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-bound..=bound).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// All `±Π σ^j(η_n)^(e_j)` with `|e_j| <= bound`, deduplicated by exact
/// equality, ordered lexicographically in the exponents with `+` before
/// `-`. Every product is checked to have relative norm `(-1)^(Σ e_j)`.
pub fn enumerate(n: Level, bound: u32) -> Result<Vec<(ExponentVector, RelUnit)>> {
    let gens = generators(n)?;
    let count = (2 * u64::from(bound) + 1).checked_pow(gens.len() as u32).unwrap_or(u64::MAX);
    if count > MAX_EXPONENT_VECTORS {
        return Err(Error::TooLarge { what: "enumeration", size: count, limit: MAX_EXPONENT_VECTORS });
    }
    let b = i64::from(bound);
    let powers: Vec<Vec<RelUnit>> = gens.iter().map(|g| (-b..=b).map(|e| g.pow(e)).collect()).collect();
    let vectors = exponent_box(gens.len(), b);
    let products = crate::par_map(&vectors, |e| -> Result<RelUnit> {
        let mut acc = RelUnit::one(n);
        for (j, &ej) in e.iter().enumerate() {
            acc = acc.mul(&powers[j][(ej + b) as usize])?;
        }
        // recheck the norm from scratch rather than trusting the tracked sign
        let fresh = rel_unit_from(acc.elem()).ok_or(Error::NotIntegral)?;
        let parity = ExponentVector { e: e.clone(), unit_sign: 1 }.norm_parity();
        if fresh.norm_sign() != parity {
            return Err(Error::Precondition(format!("relative norm of {e:?} is not {parity}")));
        }
        Ok(fresh)
    });
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(2 * vectors.len());
    for (e, u) in vectors.into_iter().zip(products) {
        let u = u?;
        for (sign, unit) in [(1i8, u.clone()), (-1, u.neg())] {
            if seen.insert(unit.elem().clone()) {
                out.push((ExponentVector { e: e.clone(), unit_sign: sign }, unit));
            }
        }
    }
    Ok(out)
}

/// Classifies one unit: log embedding, both memberships, sign pattern.
pub fn classify(exponents: ExponentVector, unit: RelUnit, precision: u32) -> Result<PointRecord> {
    let log_coords = log_embedding(unit.elem(), precision)?;
    let sign_pattern = if unit.is_torsion() { None } else { Some(SignVector::of_unit(&unit)?) };
    Ok(PointRecord {
        member12: in_re12(&unit)?,
        member03: in_re03(&unit)?,
        norm_sign: unit.norm_sign(),
        exponents,
        unit,
        log_coords,
        sign_pattern,
    })
}

/// [`enumerate`] followed by [`classify`], in the enumeration order.
pub fn point_records(n: Level, bound: u32, precision: u32) -> Result<Vec<PointRecord>> {
    let units = enumerate(n, bound)?;
    crate::par_map(&units, |(e, u)| classify(e.clone(), u.clone(), precision)).into_iter().collect()
}

/// Output format of a dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::parse(s, "expected `csv` or `json`")),
        }
    }
}

#[derive(Serialize)]
struct JsonRow<'a> {
    e: &'a [i64],
    torsion: i8,
    norm_sign: i8,
    log: Vec<f64>,
    member12: bool,
    member03: bool,
    sign_pattern: String,
}

#[derive(Serialize)]
struct JsonDataset<'a> {
    level: u32,
    bound: u32,
    assumption: &'static str,
    points: Vec<JsonRow<'a>>,
}

fn pattern(r: &PointRecord) -> String {
    r.sign_pattern.as_ref().map(ToString::to_string).unwrap_or_default()
}

/// Renders records as CSV with columns `e_0.., torsion, norm_sign, log_0..,
/// member12, member03, sign_pattern`; logs are 17-digit midpoints.
pub fn render_csv(records: &[PointRecord], d: usize) -> String {
    let mut cols: Vec<String> = (0..d).map(|j| format!("e_{j}")).collect();
    cols.extend(["torsion".into(), "norm_sign".into()]);
    cols.extend((0..d).map(|j| format!("log_{j}")));
    cols.extend(["member12".into(), "member03".into(), "sign_pattern".into()]);
    let mut out = cols.join(",");
    out.push('\n');
    for r in records {
        let mut row: Vec<String> = r.exponents.e.iter().map(i64::to_string).collect();
        row.push(r.exponents.unit_sign.to_string());
        row.push(r.norm_sign.to_string());
        row.extend(r.log_coords.coords.iter().map(|c| format_sig17(c.mid_f64())));
        row.push(r.member12.to_string());
        row.push(r.member03.to_string());
        row.push(pattern(r));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// JSON with the same fields as the CSV rows.
pub fn render_json(records: &[PointRecord], n: Level, bound: u32) -> Result<String> {
    let points = records
        .iter()
        .map(|r| JsonRow {
            e: &r.exponents.e,
            torsion: r.exponents.unit_sign,
            norm_sign: r.norm_sign,
            log: r.log_coords.coords.iter().map(|c| format_sig17(c.mid_f64()).parse().unwrap()).collect(),
            member12: r.member12,
            member03: r.member03,
            sign_pattern: pattern(r),
        })
        .collect();
    let ds = JsonDataset { level: n.index(), bound, assumption: COMPLETENESS_ASSUMPTION, points };
    Ok(serde_json::to_string_pretty(&ds)? + "\n")
}

/// The full dataset for `(n, bound)` in the requested format.
pub fn emit_points(n: Level, bound: u32, format: Format, precision: u32) -> Result<String> {
    let records = point_records(n, bound, precision)?;
    let d = n.parent().ok_or(Error::LevelZero { op: "emit_points" })?.degree();
    match format {
        Format::Csv => Ok(render_csv(&records, d)),
        Format::Json => render_json(&records, n, bound),
    }
}

/// Writes `contents` to `path`, reporting failures with the path.
pub fn write_output(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Outcome of sweeping the exclusion test over enumerated units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub level: u32,
    pub bound: u32,
    pub pcf_type: PcfType,
    /// Non-torsion units of the matching relative norm.
    pub tested: usize,
    pub members: usize,
    pub excluded: usize,
    pub undecided: usize,
    pub violations: usize,
    pub assumption: String,
}

/// Checks that no member of `RE_n^+(1,2)` (resp. `RE_n^-(0,3)`) among the
/// enumerated units is excluded by its bound. A violation is returned as
/// [`Error::BoundViolation`].
pub fn verify_bounds_theorem(n: Level, bound: u32, kind: PcfType) -> Result<BoundsReport> {
    let want_norm = match kind {
        PcfType::T12 => 1,
        PcfType::T03 => -1,
    };
    let units: Vec<(ExponentVector, RelUnit)> = enumerate(n, bound)?
        .into_iter()
        .filter(|(_, u)| !u.is_torsion() && u.norm_sign() == want_norm)
        .collect();
    let outcomes = crate::par_map(&units, |(_, u)| -> Result<(bool, Option<bool>)> {
        let member = match kind {
            PcfType::T12 => in_re12(u)?,
            PcfType::T03 => in_re03(u)?,
        };
        match bound_excludes(u, kind) {
            Ok(x) => Ok((member, Some(x))),
            Err(e) if e.is_undecided() => Ok((member, None)),
            Err(e) => Err(e),
        }
    });
    let mut report = BoundsReport {
        level: n.index(),
        bound,
        pcf_type: kind,
        tested: units.len(),
        members: 0,
        excluded: 0,
        undecided: 0,
        violations: 0,
        assumption: COMPLETENESS_ASSUMPTION.into(),
    };
    for ((e, _), outcome) in units.iter().zip(outcomes) {
        let (member, excluded) = outcome?;
        report.members += usize::from(member);
        match excluded {
            Some(true) if member => {
                return Err(Error::BoundViolation { exponents: e.e.clone(), torsion: e.unit_sign });
            }
            Some(true) => report.excluded += 1,
            Some(false) => {}
            None => report.undecided += 1,
        }
    }
    Ok(report)
}

/// Determinant of the matrix `(log|σ^k(σ^j(η_n))|)_{j,k}` of generator log
/// vectors, enclosed to width below `2^(1 - precision)` when possible.
pub fn generator_log_determinant(n: Level, precision: u32) -> Result<Interval> {
    let gens = generators(n)?;
    refine(precision + 32, MAX_PRECISION, |w| {
        let ctx = EmbeddingContext::get(n, w);
        let mut rows = Vec::with_capacity(gens.len());
        for g in &gens {
            let row = (0..gens.len() as u64)
                .map(|k| {
                    let v = ctx.eval_extended(g.elem(), k).abs();
                    if v.sign() == Some(1) {
                        v.ln()
                    } else {
                        None
                    }
                })
                .collect::<Option<Vec<_>>>()?;
            rows.push(row);
        }
        let det = interval_det(rows)?;
        det.width_below(precision.min(w / 2)).then_some(det)
    })
}

/// Gaussian elimination with pivots chosen among entries certainly away
/// from zero.
fn interval_det(mut a: Vec<Vec<Interval>>) -> Option<Interval> {
    let d = a.len();
    let w = a.first().map(|r| r[0].precision()).unwrap_or(64);
    let mut det = Interval::one(w);
    for col in 0..d {
        let pivot = (col..d)
            .filter(|&r| a[r][col].sign().is_some_and(|s| s != 0))
            .max_by(|&x, &y| a[x][col].abs().mid_f64().total_cmp(&a[y][col].abs().mid_f64()))?;
        if pivot != col {
            a.swap(pivot, col);
            det = det.neg();
        }
        let p = a[col][col].clone();
        det = det.mul(&p);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in rest {
            let f = row[col].div(&p)?;
            for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = x.sub(&y.mul(&f));
            }
        }
    }
    Some(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingElem;

    #[test]
    fn generator_examples() {
        let g1 = generators(Level(1)).unwrap();
        assert_eq!(g1.len(), 1);
        assert_eq!(g1[0].elem(), &RingElem::from_i64s(Level(1), &[1, 1]));
        for n in 1..=4 {
            let g = generators(Level(n)).unwrap();
            assert_eq!(g.len(), 1 << (n - 1));
            assert!(g.iter().all(|u| u.norm_sign() == -1));
        }
    }

    #[test]
    fn enumeration_counts() {
        let u = enumerate(Level(1), 3).unwrap();
        assert_eq!(u.len(), 14);
        assert_eq!(enumerate(Level(1), 1).unwrap().len(), 6);
        let zero = enumerate(Level(2), 0).unwrap();
        assert_eq!(zero.len(), 2);
        assert!(zero[0].1.elem().is_one());
        assert_eq!(zero[1].0.unit_sign, -1);
        // n = 2, E = 6: no collisions apart from the sign pairing
        assert_eq!(enumerate(Level(2), 6).unwrap().len(), 2 * 13 * 13);
        assert!(matches!(enumerate(Level(5), 1), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn enumeration_order() {
        let u = enumerate(Level(1), 1).unwrap();
        let keys: Vec<String> = u.iter().map(|(e, _)| e.to_string()).collect();
        assert_eq!(keys, ["+(-1)", "-(-1)", "+(0)", "-(0)", "+(1)", "-(1)"]);
    }

    #[test]
    fn classification() {
        let recs = point_records(Level(1), 2, 64).unwrap();
        let sq = recs.iter().find(|r| r.exponents.e == [2] && r.exponents.unit_sign == 1).unwrap();
        assert_eq!(sq.unit.elem(), &RingElem::from_i64s(Level(1), &[3, 2]));
        assert!(sq.member12 && !sq.member03);
        let one = recs.iter().find(|r| r.exponents.e == [0] && r.exponents.unit_sign == 1).unwrap();
        assert!(!one.member12 && !one.member03 && one.sign_pattern.is_none());
        for r in &recs {
            assert!(!r.member12 || r.norm_sign == 1);
            assert!(!r.member03 || r.norm_sign == -1);
        }
    }

    #[test]
    fn csv_layout() {
        let csv = emit_points(Level(2), 1, Format::Csv, 64).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "e_0,e_1,torsion,norm_sign,log_0,log_1,member12,member03,sign_pattern"
        );
        assert_eq!(csv.lines().count(), 1 + 18);
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 9);
        assert_eq!(&first[..4], ["-1", "-1", "1", "1"]);
        assert_eq!(emit_points(Level(2), 1, Format::Csv, 64).unwrap(), csv);
    }

    #[test]
    fn json_mirrors_csv() {
        let json = emit_points(Level(1), 1, Format::Json, 64).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let pts = v["points"].as_array().unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[4]["e"], serde_json::json!([1]));
        assert_eq!(pts[4]["norm_sign"], -1);
        assert_eq!(pts[4]["sign_pattern"], "+");
    }

    #[test]
    fn small_sweeps() {
        for kind in [PcfType::T12, PcfType::T03] {
            let r = verify_bounds_theorem(Level(1), 8, kind).unwrap();
            assert_eq!(r.violations, 0);
            assert!(r.members > 0);
            assert!(r.excluded > 0);
        }
    }

    #[test]
    fn determinant_nonzero() {
        let d1 = generator_log_determinant(Level(1), 64).unwrap();
        assert!((d1.mid_f64() - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-14);
        for n in 2..=3 {
            let d = generator_log_determinant(Level(n), 64).unwrap();
            assert!(!d.contains_zero(), "n = {n}: {d}");
        }
    }
}
