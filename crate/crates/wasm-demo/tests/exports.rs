use parmint_wasm_demo::{differentiate, evaluate, families, verify_closed_form};
use serde_json::Value;

fn j(s: String) -> Value {
    serde_json::from_str(&s).expect("exports return JSON")
}

#[test]
fn lists_builtin_families() {
    let v = j(families());
    let list = v.as_array().unwrap();
    assert!(list.len() >= 35);
    assert!(list.iter().any(|f| f["id"] == "eq_3.2"));
}

#[test]
fn evaluates_a_point() {
    let v = j(evaluate("eq_1.4", r#"{"l": 1}"#));
    assert_eq!(v["pass"], true);
    assert!((v["closed_form_value"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    assert_eq!(v["quadrature"]["status"], "converged");
}

#[test]
fn evaluation_errors_are_reported() {
    assert!(j(evaluate("bogus", "{}"))["error"].is_string());
    assert!(j(evaluate("eq_1.4", r#"{"l": -1}"#))["error"].is_string());
    assert!(j(evaluate("eq_1.4", "not json"))["error"].is_string());
}

#[test]
fn closed_form_check_over_grid() {
    let v = j(verify_closed_form("eq_2.36"));
    assert_eq!(v["pass"], true);
    assert_eq!(v["details"].as_array().unwrap().len(), 9);
}

#[test]
fn derivative_matches_difference() {
    let v = j(differentiate("atan(a*x)", "a", r#"{"a": 0.5, "x": 2}"#));
    let d = v["value"].as_f64().unwrap();
    assert!((d - 2.0 / (1.0 + 1.0)).abs() < 1e-14, "{v}");
    assert!((v["finite_difference"].as_f64().unwrap() - d).abs() < 1e-8);
    assert!(j(differentiate("x +", "x", ""))["error"].is_string());
    let partial = j(differentiate("x^2*y", "x", ""));
    assert!(partial["value"].is_null());
    assert!(partial["derivative"].is_string());
}
