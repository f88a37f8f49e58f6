//! Browser bindings. Each entry point returns a JSON string; errors come back as a thrown string.

use serde_json::{Value, json};
use wasm_bindgen::prelude::*;

use pfhodge::connections::{self, ExamplePreset, PresetSeries};
use pfhodge::exact_algebra::mp::{MpComplex, with_default_bits};
use pfhodge::exact_algebra::rational::{BigQ, fmt_q};
use pfhodge::hodge_bundle::ExponentTable;
use pfhodge::pf_operator::PFOperator;
use pfhodge::presets;
use pfhodge::qforms::{self, Level};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Bundled operators, for prefilling the input box.
pub fn preset_list() -> Value {
    let items: Vec<Value> = presets::names()
        .into_iter()
        .filter_map(|n| presets::document(n).ok())
        .filter(|d| d.parameters.is_empty())
        .filter_map(|d| d.operator.clone().map(|op| json!({"name": d.name, "variable": d.variable, "operator": op})))
        .collect();
    json!({"operators": items, "geometry": ExamplePreset::available()})
}

pub fn analyze_operator(src: &str, var: &str) -> Result<Value, String> {
    let var = if var.trim().is_empty() { "z" } else { var.trim() };
    let op = PFOperator::parse(src, var).map_err(err)?;
    let points = op.singular_points().map_err(err)?;
    let table = ExponentTable::from_operator(&op).map_err(err)?;
    let report = table.report().map_err(err)?;
    let splitting = table.splitting_genus0().map_err(err)?;
    Ok(json!({
        "operator": op.display(),
        "rank": op.rank(),
        "fuchs_sum": fmt_q(&PFOperator::fuchs_sum(&points, op.rank())),
        "points": points.iter().map(|p| json!({
            "point": p.point.to_string(),
            "exponents": p.exponents.iter().map(fmt_q).collect::<Vec<_>>(),
            "class": format!("{:?}", p.class),
            "log_degree": p.log_degree,
        })).collect::<Vec<_>>(),
        "splitting": splitting,
        "bundle": serde_json::to_value(&report).map_err(err)?,
    }))
}

pub fn q_expansions(level: &str, order: usize, expr: &str) -> Result<Value, String> {
    let l = Level::parse(level).map_err(err)?;
    if order == 0 || order > 200 {
        return Err("order must be between 1 and 200".into());
    }
    let g = qforms::generators(l, order).map_err(err)?;
    let cut = BigQ::from_integer((order as i64).into());
    let show = |s: &pfhodge::exact_algebra::QExpansion| -> Vec<(String, String)> {
        s.truncate_to(&cut).terms().iter().map(|(e, c)| (fmt_q(e), fmt_q(c))).collect()
    };
    let mut out = json!({
        "level": l.to_string(),
        "r": l.r(),
        "A": show(&g.a),
        "B": show(&g.b),
        "C": {"prefactor": g.c.describe_prefactor(), "terms": show(&g.c.series)},
        "E": show(&g.e),
    });
    if !expr.trim().is_empty() {
        let v = qforms::eval_expression(&g, expr).map_err(err)?;
        out["expression"] = json!({"source": expr, "prefactor": v.describe_prefactor(), "terms": show(&v.series)});
    }
    Ok(out)
}

pub fn explore_tau(preset: &str, tau: &str, hbar: &str, order: usize, bits: usize) -> Result<Value, String> {
    if !(64..=1024).contains(&bits) {
        return Err("bits must be between 64 and 1024".into());
    }
    if order == 0 || order > 200 {
        return Err("order must be between 1 and 200".into());
    }
    let pr = ExamplePreset::load(preset).map_err(err)?;
    with_default_bits(bits, || {
        let t = connections::tau_value(tau, bits).map_err(err)?;
        let (hr, hi) = connections::parse_tau(hbar).map_err(err)?;
        let h = MpComplex::from_q_pair(&hr, &hi, bits);
        if h.is_zero() {
            return Err("hbar must be nonzero".to_string());
        }
        let series = PresetSeries::new(&pr, order).map_err(err)?;
        let s = series.sample(&t).map_err(err)?;
        let g = connections::verify_gauge(&s, &h).map_err(err)?;
        Ok(json!({
            "kahler": pr.kahler_formula(),
            "sample": serde_json::to_value(s.summary().map_err(err)?).map_err(err)?,
            "residuals": serde_json::to_value(&g).map_err(err)?,
            "max_residual": g.max_residual(),
        }))
    })
}

fn to_js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn presets_json() -> String {
    preset_list().to_string()
}

#[wasm_bindgen]
pub fn analyze(src: &str, var: &str) -> Result<String, JsValue> {
    to_js(analyze_operator(src, var))
}

#[wasm_bindgen]
pub fn qexp(level: &str, order: usize, expr: &str) -> Result<String, JsValue> {
    to_js(q_expansions(level, order, expr))
}

#[wasm_bindgen]
pub fn explore(preset: &str, tau: &str, hbar: &str, order: usize, bits: usize) -> Result<String, JsValue> {
    to_js(explore_tau(preset, tau, hbar, order, bits))
}
