use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use super::*;

fn cat() -> Catalog {
    Catalog::builtin()
}

fn b(pairs: &[(&str, f64)]) -> Bindings {
    pairs.iter().copied().collect()
}

fn cf(id: &str, pairs: &[(&str, f64)]) -> f64 {
    cat().closed_form_value(id, &b(pairs)).unwrap()
}

#[test]
fn builtin_inventory() {
    let c = cat();
    assert!(c.len() >= 35, "{}", c.len());
    let mut names = BTreeSet::new();
    for f in c.families() {
        assert!(!f.paper_ref.is_empty(), "{} lacks a reference", f.id);
        for n in std::iter::once(&f.id).chain(&f.aliases) {
            assert!(names.insert(n.clone()), "duplicate name {n}");
        }
    }
    for id in [
        "frullani_sinx_over_x",
        "eq_1.2_laplace",
        "eq_1.4",
        "GR_4.291.8",
        "eq_2.2",
        "eq_2.6",
        "eq_2.10",
        "eq_2.12",
        "eq_2.16",
        "eq_2.17",
        "eq_2.21",
        "eq_2.24",
        "GR_3.947.1",
        "eq_2.28",
        "eq_2.30",
        "eq_2.32",
        "eq_2.33",
        "eq_2.34",
        "eq_2.36",
        "eq_3.2",
        "laplace_F",
        "gauss_cos",
        "hecke",
        "eq_4.1",
        "eq_4.4",
    ] {
        assert!(c.get(id).is_ok(), "missing {id}");
    }
}

#[test]
fn every_builtin_validates() {
    for f in cat().families() {
        f.validate().unwrap_or_else(|e| panic!("{}: {e:?}", f.id));
    }
}

#[test]
#[allow(clippy::approx_constant)] // documented decimals are the oracle
fn documented_closed_form_values() {
    assert_eq!(cf("frullani_sinx_over_x", &[]), FRAC_PI_2);
    assert!((cf("eq_1.4", &[("l", 0.0)]) - FRAC_PI_2).abs() < 1e-16);
    assert!((cf("eq_1.4", &[("l", 1.0)]) - 0.7853981634).abs() < 1e-10);
    assert!((cf("GR_4.291.8", &[]) - PI / 8.0 * LN_2).abs() < 1e-16);
    assert!((cf("hecke", &[("a", 0.0)]) - PI.sqrt()).abs() < 1e-15);
    assert!((cf("eq_2.17", &[("l", 1.0), ("m", 1.0)]) - 2.1775860903).abs() < 1e-10);
    assert!((cf("eq_2.30", &[]) + 1.0887930452).abs() < 1e-10);
    // 2*pi*ln 3; direct quadrature of ln(10 - 6 cos x) over [0, pi] agrees
    assert!((cf("eq_2.36", &[("a", 3.0), ("b", 1.0)]) - 6.902_784_590_446_4).abs() < 1e-12);
    assert!((cf("eq_2.21", &[("l", 4.0)]) - 3.5449077018).abs() < 1e-10);
    assert_eq!(cf("eq_2.2", &[("a", 0.0)]), 0.0);
    // midpoint rule with 2e5 panels gives 1.95975916376245
    assert!((cf("eq_2.28", &[("a", 2.0)]) - 1.959_759_163_762_45).abs() < 1e-12);
    assert!((cf("eq_3.2", &[("a", 1.0), ("l", 1.0)]) - FRAC_PI_2 * (-1f64).exp()).abs() < 1e-15);
}

#[test]
fn piecewise_branches() {
    for a in [-0.9, -0.5, 0.0, 0.5, 0.9] {
        assert_eq!(cf("eq_2.34", &[("a", a)]), 0.0);
        assert_eq!(cf("eq_2.36", &[("a", a), ("b", 1.0)]), 0.0);
    }
    for a in [-3.0f64, -1.5, 1.5, 3.0] {
        let want = PI * (a * a).ln();
        assert!((cf("eq_2.34", &[("a", a)]) - want).abs() < 1e-14);
        assert!((cf("eq_2.36", &[("a", a), ("b", 1.0)]) - want).abs() < 1e-14);
    }
    // boundary belongs to the outer branch, which is continuous there
    assert_eq!(cf("eq_2.34", &[("a", 1.0)]), 0.0);
}

#[test]
fn special_function_templates() {
    // large-s expansion: F(s) = sum_n (-1)^n (2n)!/s^(2n+1) for a = 1; the
    // error is below the first omitted term, 10!/s^11 ~ 8.7e-12 at s = 40
    let s = 40.0f64;
    let f = cf("laplace_F", &[("s", s), ("a", 1.0)]);
    let asym = 1.0 / s - 2.0 / s.powi(3) + 24.0 / s.powi(5) - 720.0 / s.powi(7) + 40320.0 / s.powi(9);
    assert!((f - asym).abs() < 1e-11, "{f} vs {asym}");
    let g = cf("ex_2.3_log_over_quadratic", &[]);
    assert!((g - (FRAC_PI_2 * LN_2 - 0.915_965_594_177_219)).abs() < 1e-13);
    assert!((cf("eq_4.7", &[]) - 2.0 * 0.915_965_594_177_219).abs() < 1e-13);
}

#[test]
fn instantiate_moving_bound() {
    let inst = cat().instantiate("eq_4.1", &b(&[("a", 2.0)])).unwrap();
    assert!((inst.lower - 3f64.sqrt() / 2.0).abs() < 1e-15);
    assert_eq!(inst.upper, 1.0);
    assert!(inst.hints.singular_upper);
}

#[test]
fn instantiate_patched_zero_parameter() {
    let inst = cat().instantiate("eq_2.32", &b(&[("a", 0.0)])).unwrap();
    assert_eq!(inst.integrand.eval(FRAC_PI_2).unwrap(), 0.0);
    for t in [0.1, 1.0, 2.0, 3.0] {
        assert_eq!(inst.integrand.eval(t).unwrap(), 0.0);
    }
    let inst = cat().instantiate("eq_2.32", &b(&[("a", 0.5)])).unwrap();
    assert_eq!(inst.integrand.eval(FRAC_PI_2).unwrap(), 0.5);
}

#[test]
fn instantiate_errors() {
    let c = cat();
    assert!(matches!(
        c.instantiate("eq_2.24", &b(&[("l", 1.0), ("a", 1.0), ("b", 2.0)])),
        Err(CatalogError::ConstraintViolated { .. })
    ));
    assert!(matches!(c.instantiate("eq_2.28", &b(&[("a", 0.5)])), Err(CatalogError::OutOfRange { .. })));
    assert!(matches!(c.instantiate("eq_2.28", &b(&[])), Err(CatalogError::MissingParameter { .. })));
    assert!(matches!(
        c.instantiate("eq_2.28", &b(&[("a", 2.0), ("z", 1.0)])),
        Err(CatalogError::UnknownParameter { .. })
    ));
    assert!(matches!(c.get("nope"), Err(CatalogError::UnknownFamily(_))));
}

#[test]
fn hints_are_evaluated() {
    let inst = cat().instantiate("eq_3.2", &b(&[("a", 1.0), ("l", 2.5)])).unwrap();
    assert_eq!(inst.hints.oscillatory, Some((2.5, TrigKind::Cos)));
}

#[test]
fn grid_respects_constraints() {
    let c = cat();
    let f = c.get("eq_2.24").unwrap();
    let pts = f.grid_points();
    assert_eq!(pts.len(), 6);
    assert!(pts.iter().all(|p| p.get("a").unwrap() > p.get("b").unwrap()));
    assert_eq!(c.get("GR_4.291.8").unwrap().grid_points(), vec![Bindings::new()]);
}

const LOG_QUOTIENT: &str = "
# x^a - 1 over ln x
id=user_log_quotient
integrand=(x^a - 1)/ln(x)
var=x
lower=0
upper=1
param a in [0,inf) grid 0,1,2 as α
closed_form=ln(1+a)
patch 1 -> a delta 1e-8
ref=user
";

#[test]
fn load_verbatim_family() {
    let fams = parse_families(LOG_QUOTIENT).unwrap();
    assert_eq!(fams.len(), 1);
    let f = &fams[0];
    assert_eq!(f.params[0].display_name(), "α");
    assert_eq!(f.params[0].grid, vec![0.0, 1.0, 2.0]);
    assert_eq!(f.patches.len(), 1);
    let two = format!("{LOG_QUOTIENT}\n\n{}", LOG_QUOTIENT.replace("user_log_quotient", "second"));
    assert_eq!(parse_families(&two).unwrap().len(), 2);
}

#[test]
fn load_empty_and_comments() {
    assert!(parse_families("").unwrap().is_empty());
    assert!(parse_families("# nothing\n\n   \n").unwrap().is_empty());
}

#[test]
fn load_rejects_undeclared_closed_form_symbol() {
    let text = LOG_QUOTIENT.replace("closed_form=ln(1+a)", "closed_form=ln(1+a+c)");
    match parse_families(&text) {
        Err(LoadError::Invariant { family, field, .. }) => {
            assert_eq!(family, "user_log_quotient");
            assert_eq!(field, "closed_form");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn load_reports_line_numbers() {
    let text = LOG_QUOTIENT.replace("integrand=(x^a - 1)/ln(x)", "integrand=(x^a - 1)/ln(x");
    match parse_families(&text) {
        Err(LoadError::Syntax { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    let text = LOG_QUOTIENT.replace("ref=user", "colour=blue");
    assert!(matches!(parse_families(&text), Err(LoadError::Syntax { line: 11, .. })));
    let text = LOG_QUOTIENT.replace("var=x\n", "");
    assert!(matches!(parse_families(&text), Err(LoadError::Syntax { .. })));
}

#[test]
fn load_rejects_grid_outside_range() {
    let text = LOG_QUOTIENT.replace("grid 0,1,2", "grid -2,1");
    assert!(matches!(parse_families(&text), Err(LoadError::Invariant { .. })));
}

#[test]
fn special_closed_form_syntax() {
    let text = "id=s\nintegrand=sin(a*x)/(x+1)\nvar=x\nlower=0\nupper=inf\nparam a in (0,inf) grid 1\n\
                closed_form=sici(a): CI*sin(a) - SI*cos(a)\nhint=oscillatory:sin:a\nref=r\n";
    let f = &parse_families(text).unwrap()[0];
    assert!(matches!(f.closed_form, ClosedForm::SiCi { .. }));
    let v = f.closed_form_value(&b(&[("a", 1.0)])).unwrap();
    assert!((v - cf("GR_3.772.1", &[("a", 1.0), ("b", 1.0)])).abs() < 1e-15);
}

#[test]
fn duplicate_ids_rejected() {
    let mut c = cat();
    let dup = parse_families(&LOG_QUOTIENT.replace("user_log_quotient", "eq_2.16")).unwrap();
    assert!(matches!(c.extend(dup), Err(CatalogError::DuplicateId(_))));
}
