//! Browser bindings for the demo page in `www/`. Every export returns JSON
//! text; the plain functions are the same operations for native callers.

use serde::Serialize;
use wasm_bindgen::prelude::*;
use z2pcf::bounds::{bound_excludes, bound_table, PcfType};
use z2pcf::enumerate::{point_records, COMPLETENESS_ASSUMPTION};
use z2pcf::expand::{evaluate_text, expand, parse_unit, ExpansionType};
use z2pcf::interval::DEFAULT_PRECISION;
use z2pcf::Level;

/// Highest level the plot accepts.
pub const MAX_PLOT_LEVEL: u32 = 3;

#[derive(Serialize)]
struct PlotPoint {
    e: Vec<i64>,
    torsion: i8,
    norm_sign: i8,
    log: Vec<f64>,
    member12: bool,
    member03: bool,
    sign_pattern: String,
    /// Whether the bounds rule the unit out of the type matching its norm;
    /// null for `±1`.
    excluded: Option<bool>,
}

#[derive(Serialize)]
struct Region {
    #[serde(rename = "type")]
    kind: String,
    signs: String,
    a_s: String,
    c: Vec<f64>,
}

#[derive(Serialize)]
struct PlotData {
    level: u32,
    bound: u32,
    assumption: &'static str,
    points: Vec<PlotPoint>,
    regions: Vec<Region>,
}

fn text(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Log-embedding points of the enumerated units at level `n` with exponents
/// in `[-bound, bound]`, plus the constants `C_{s,σ}` of both types.
pub fn plot_data(n: u32, bound: u32) -> Result<String, String> {
    if !(1..=MAX_PLOT_LEVEL).contains(&n) {
        return Err(format!("level must be 1..={MAX_PLOT_LEVEL}"));
    }
    let level = Level(n);
    let records = point_records(level, bound, DEFAULT_PRECISION).map_err(text)?;
    let mut points = Vec::with_capacity(records.len());
    for r in records {
        let excluded = if r.unit.is_torsion() {
            None
        } else {
            let kind = if r.norm_sign > 0 { PcfType::T12 } else { PcfType::T03 };
            Some(bound_excludes(&r.unit, kind).map_err(text)?)
        };
        points.push(PlotPoint {
            e: r.exponents.e.clone(),
            torsion: r.exponents.unit_sign,
            norm_sign: r.norm_sign,
            log: r.log_coords.midpoints(),
            member12: r.member12,
            member03: r.member03,
            sign_pattern: r.sign_pattern.map(|s| s.to_string()).unwrap_or_default(),
            excluded,
        });
    }
    let mut regions = Vec::new();
    for kind in [PcfType::T12, PcfType::T03] {
        let table = bound_table(level, kind, DEFAULT_PRECISION).map_err(text)?;
        regions.extend(table.rows.into_iter().map(|row| Region {
            kind: kind.to_string(),
            signs: row.signs.to_string(),
            a_s: row.a_s.pretty(),
            c: row.c.iter().map(|c| c.mid_f64()).collect(),
        }));
    }
    let data = PlotData { level: n, bound, assumption: COMPLETENESS_ASSUMPTION, points, regions };
    serde_json::to_string(&data).map_err(text)
}

/// Expansion of `unit` (`delta`, `eta` or an element) as a PCF of type
/// `12`, `03` or `13`, with its verification flags.
pub fn expand_unit(n: u32, kind: &str, unit: &str) -> Result<String, String> {
    let kind: ExpansionType = kind.parse().map_err(text)?;
    let unit = parse_unit(unit, Level(n)).map_err(text)?;
    let e = expand(&unit, kind).map_err(text)?;
    serde_json::to_string(&e).map_err(text)
}

/// Evaluation of a PCF given as text, such as `[2|-2,4]`.
pub fn evaluate_pcf(pcf: &str, n: u32) -> Result<String, String> {
    let v = evaluate_text(pcf, Level(n), DEFAULT_PRECISION).map_err(text)?;
    serde_json::to_string(&v).map_err(text)
}

#[wasm_bindgen(js_name = plotData)]
pub fn plot_data_js(n: u32, bound: u32) -> Result<String, JsValue> {
    plot_data(n, bound).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = expandUnit)]
pub fn expand_unit_js(n: u32, kind: &str, unit: &str) -> Result<String, JsValue> {
    expand_unit(n, kind, unit).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = evaluatePcf)]
pub fn evaluate_pcf_js(pcf: &str, n: u32) -> Result<String, JsValue> {
    evaluate_pcf(pcf, n).map_err(|e| JsValue::from_str(&e))
}
