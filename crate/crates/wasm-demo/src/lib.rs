//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes and returns plain strings: JSON in, JSON out. Errors
//! come back as `{"error": "..."}` so the page needs no exception handling.
//! The functions are ordinary Rust on native targets, which is how the
//! tests exercise them.

use parmint::catalog::{Catalog, IntegralFamily};
use parmint::expr::{parse, Bindings};
use parmint::quadrature::ToleranceConfig;
use parmint::verifier::{CheckTolerance, Verifier};
use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

fn catalog() -> Catalog {
    Catalog::builtin()
}

fn error(msg: impl ToString) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

fn respond<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(error),
        Err(e) => error(e),
    }
}

/// `{"a": 1, "b": 0.5}` to bindings. Empty text means no bindings.
fn bindings(text: &str) -> Result<Bindings, String> {
    if text.trim().is_empty() {
        return Ok(Bindings::new());
    }
    let map: serde_json::Map<String, Value> = serde_json::from_str(text).map_err(|e| format!("bad parameters: {e}"))?;
    let mut b = Bindings::new();
    for (k, v) in map {
        let x = v.as_f64().ok_or_else(|| format!("parameter `{k}` is not a number"))?;
        b.set(&k, x);
    }
    Ok(b)
}

#[derive(Serialize)]
struct FamilySummary<'a> {
    id: &'a str,
    reference: &'a str,
    integrand: String,
    lower: String,
    upper: String,
    closed_form: String,
    /// (name, symbol, first grid value)
    params: Vec<(&'a str, &'a str, f64)>,
}

fn summary(f: &IntegralFamily) -> FamilySummary<'_> {
    FamilySummary {
        id: &f.id,
        reference: &f.paper_ref,
        integrand: f.integrand.to_string(),
        lower: f.lower.to_string(),
        upper: f.upper.to_string(),
        closed_form: f.closed_form.to_string(),
        params: f
            .params
            .iter()
            .map(|p| (p.name.as_str(), p.display_name(), p.grid.first().copied().unwrap_or(1.0)))
            .collect(),
    }
}

/// All builtin families, for the page's picker.
#[wasm_bindgen]
pub fn families() -> String {
    let c = catalog();
    respond(Ok(c.families().iter().map(summary).collect::<Vec<_>>()))
}

/// Quadrature and closed form of family `id` at the JSON parameter object.
#[wasm_bindgen]
pub fn evaluate(id: &str, params: &str) -> String {
    respond((|| {
        let c = catalog();
        let f = c.get(id).map_err(|e| e.to_string())?;
        let b = bindings(params)?;
        f.check_bindings(&b).map_err(|e| e.to_string())?;
        let q = Verifier::new(ToleranceConfig::default()).quadrature(f, &b).map_err(|e| e.to_string())?;
        let closed = f.closed_form_value(&b).map_err(|e| e.to_string())?;
        let abs_dev = (q.value - closed).abs();
        let pass = q.is_converged() && abs_dev <= CheckTolerance::closed_form(f).allowed(closed);
        Ok(json!({
            "family_id": f.id,
            "quadrature": q,
            "closed_form_value": closed,
            "abs_dev": abs_dev,
            "rel_dev": abs_dev / closed.abs().max(1e-300),
            "pass": pass,
        }))
    })())
}

/// Closed-form check of family `id` over its default grid.
#[wasm_bindgen]
pub fn verify_closed_form(id: &str) -> String {
    respond((|| {
        let c = catalog();
        let f = c.get(id).map_err(|e| e.to_string())?;
        let v = Verifier::new(ToleranceConfig::default());
        Ok(v.check_closed_form(f, &f.grid_points(), &CheckTolerance::closed_form(f)))
    })())
}

/// Symbolic derivative of `expr` in `var`, and its value at `at` (a JSON
/// object) when every remaining symbol is bound, alongside a central
/// difference of the original expression for comparison.
#[wasm_bindgen]
pub fn differentiate(expr: &str, var: &str, at: &str) -> String {
    respond((|| {
        let e = parse(expr).map_err(|e| e.to_string())?;
        let var = var.trim();
        if var.is_empty() {
            return Err("no variable given".into());
        }
        let d = e.diff(var);
        let b = bindings(at)?;
        let (value, fd) = match (d.eval(&b), b.get(var)) {
            (Ok(v), Some(x)) => {
                let h = f64::EPSILON.cbrt() * x.abs().max(1.0);
                let f = |t: f64| e.eval(&b.clone().with(var, t));
                let fd = match (f(x + h), f(x - h)) {
                    (Ok(p), Ok(m)) => Some((p - m) / (2.0 * h)),
                    _ => None,
                };
                (Some(v), fd)
            }
            (Ok(v), None) => (Some(v), None),
            (Err(_), _) => (None, None),
        };
        Ok(json!({ "derivative": d.to_string(), "value": value, "finite_difference": fd }))
    })())
}
