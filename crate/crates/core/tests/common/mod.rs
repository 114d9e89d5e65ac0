//! Generators shared by the property suites and the acceptance runner.
#![allow(dead_code)]

use std::f64::consts::PI;

use parmint::catalog::Catalog;
use parmint::expr::{parse, BinOp, Bindings, Expr, Func};
use parmint::quadrature::{
    integrate_exp_sinh, integrate_finite, integrate_tanh_sinh, Integrand, QuadratureResult, ToleranceConfig,
};
use parmint::verifier::Verifier;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Check = Result<(), TestCaseError>;

pub fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-10.0f64..10.0).prop_map(Expr::num),
        (1u32..5).prop_map(|n| Expr::num(n as f64)),
        Just(Expr::Pi),
        Just(Expr::sym("x")),
        Just(Expr::sym("y")),
    ]
}

pub fn binop() -> impl Strategy<Value = BinOp> {
    prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)]
}

/// Arbitrary ASTs of depth at most 8, every operator and function included.
pub fn any_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(7, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            (binop(), inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::bin(op, a, b)),
            (prop::sample::select(Func::ALL.to_vec()), inner).prop_map(|(f, e)| Expr::apply(f, e)),
        ]
    })
}

/// Smooth everywhere on the real line, with bounded growth, so a central
/// difference is a trustworthy reference.
pub fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(-2.0f64..2.0).prop_map(Expr::num), Just(Expr::sym("x")), Just(Expr::sym("y")),];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            // denominators bounded away from zero
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::div(a, Expr::add(Expr::num(1.0), Expr::pow(b, Expr::num(2.0))))),
            inner.clone().prop_map(|e| Expr::apply(Func::Sin, e)),
            inner.clone().prop_map(|e| Expr::apply(Func::Cos, e)),
            inner.clone().prop_map(|e| Expr::apply(Func::Atan, e)),
            inner.clone().prop_map(|e| Expr::apply(Func::Exp, Expr::apply(Func::Sin, e))),
            inner
                .clone()
                .prop_map(|e| Expr::apply(Func::Sqrt, Expr::add(Expr::num(1.0), Expr::pow(e, Expr::num(2.0))))),
            inner.prop_map(|e| Expr::apply(Func::Ln, Expr::add(Expr::num(2.0), Expr::apply(Func::Cos, e)))),
        ]
    })
}

pub fn depth(e: &Expr) -> usize {
    match e {
        Expr::Const(_) | Expr::Pi | Expr::Sym(_) => 1,
        Expr::Neg(a) | Expr::Apply(_, a) => 1 + depth(a),
        Expr::Bin(_, a, b) => 1 + depth(a).max(depth(b)),
    }
}

pub fn point() -> impl Strategy<Value = Bindings> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(x, y)| Bindings::new().with("x", x).with("y", y))
}

/// Same value bit for bit, or both fail.
pub fn same(a: Result<f64, impl std::fmt::Debug>, b: Result<f64, impl std::fmt::Debug>) -> bool {
    match (a, b) {
        (Ok(u), Ok(v)) => u.to_bits() == v.to_bits() || u == v,
        (Err(_), Err(_)) => true,
        _ => false,
    }
}

/// c0 + c1 x + c2 x^2 + s sin(w x) + g exp(-k x^2)
#[derive(Clone, Copy, Debug)]
pub struct Smooth {
    pub c: [f64; 3],
    pub s: f64,
    pub w: f64,
    pub g: f64,
    pub k: f64,
}

impl Smooth {
    pub fn eval(&self, x: f64) -> f64 {
        self.c[0] + x * (self.c[1] + x * self.c[2]) + self.s * (self.w * x).sin() + self.g * (-self.k * x * x).exp()
    }

    pub fn integrand(self) -> Integrand {
        Integrand::from_fn(move |x| self.eval(x))
    }
}

pub fn smooth() -> impl Strategy<Value = Smooth> {
    (prop::array::uniform3(-3.0f64..3.0), -2.0f64..2.0, 0.1f64..6.0, -2.0f64..2.0, 0.1f64..4.0)
        .prop_map(|(c, s, w, g, k)| Smooth { c, s, w, g, k })
}

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn converged(r: &QuadratureResult) -> bool {
    r.is_converged() && r.evaluations > 0
}

// --- expr ---

pub fn round_trip(e: &Expr, b: &Bindings) -> Check {
    prop_assert!(depth(e) <= 8);
    let text = e.to_string();
    let back = parse(&text).map_err(|err| TestCaseError::fail(format!("reparse of {text}: {err}")))?;
    prop_assert!(same(e.eval(b), back.eval(b)), "{text}");
    prop_assert_eq!(back.to_string(), parse(&back.to_string()).unwrap().to_string());
    Ok(())
}

pub fn simplify_preserves(e: &Expr, b: &Bindings) -> Check {
    if let Ok(v) = e.eval(b) {
        let s = e.simplify().eval(b);
        prop_assert!(matches!(s, Ok(w) if w == v || (w.is_nan() && v.is_nan())), "{e}: {v} vs {s:?}");
    }
    Ok(())
}

/// |FD - diff| <= 1e-6 (1 + |diff|) with a fourth-order central difference.
pub fn diff_vs_fd(e: &Expr, b: &Bindings, var: &str) -> Check {
    let d = e.diff(var).eval(b).map_err(|err| TestCaseError::fail(format!("{e}: derivative fails: {err}")))?;
    let x0 = b.get(var).unwrap();
    let h = 2e-4;
    let f = |t: f64| e.eval(&b.clone().with(var, t)).unwrap();
    let fd = (f(x0 - 2.0 * h) - 8.0 * f(x0 - h) + 8.0 * f(x0 + h) - f(x0 + 2.0 * h)) / (12.0 * h);
    prop_assert!((fd - d).abs() <= 1e-6 * (1.0 + d.abs()), "{e} d/d{var} at {b}: symbolic {d}, fd {fd}");
    Ok(())
}

// --- quadrature ---

pub fn additivity(f: Smooth, a: f64, mid: f64, len: f64) -> Check {
    let c = a + len;
    let b = a + mid * len;
    let f = f.integrand();
    let (ab, bc, ac) =
        (integrate_finite(&f, a, b, &tol()), integrate_finite(&f, b, c, &tol()), integrate_finite(&f, a, c, &tol()));
    prop_assert!(converged(&ab) && converged(&bc) && converged(&ac));
    let bound = 2.0 * (ab.error_estimate + bc.error_estimate + ac.error_estimate);
    prop_assert!(
        (ab.value + bc.value - ac.value).abs() <= bound,
        "{} + {} vs {} (bound {bound:e})",
        ab.value,
        bc.value,
        ac.value
    );
    Ok(())
}

pub fn linearity(f: Smooth, g: Smooth, alpha: f64, beta: f64, a: f64, b: f64) -> Check {
    let combo = Integrand::from_fn(move |x| alpha * f.eval(x) + beta * g.eval(x));
    let (rf, rg, rc) = (
        integrate_finite(&f.integrand(), a, b, &tol()),
        integrate_finite(&g.integrand(), a, b, &tol()),
        integrate_finite(&combo, a, b, &tol()),
    );
    prop_assert!(converged(&rf) && converged(&rg) && converged(&rc));
    let bound = alpha.abs() * rf.error_estimate + beta.abs() * rg.error_estimate + rc.error_estimate;
    prop_assert!((rc.value - (alpha * rf.value + beta * rg.value)).abs() <= bound);
    Ok(())
}

/// Bit-identical values on repeated calls, for all three finite/half-line kernels.
pub fn determinism(f: Smooth, a: f64, b: f64, k: f64) -> Check {
    let fi = f.integrand();
    let r1 = integrate_finite(&fi, a, b, &tol());
    let r2 = integrate_finite(&fi, a, b, &tol());
    prop_assert_eq!(r1.value.to_bits(), r2.value.to_bits());
    prop_assert_eq!(r1, r2);
    let decay = Integrand::from_fn(move |x: f64| (-k * x).exp() * (1.0 + x).recip());
    let e1 = integrate_exp_sinh(&decay, 0.0, &tol());
    let e2 = integrate_exp_sinh(&decay, 0.0, &tol());
    prop_assert_eq!(e1.value.to_bits(), e2.value.to_bits());
    let t1 = integrate_tanh_sinh(&fi, a, b, &tol());
    let t2 = integrate_tanh_sinh(&fi, a, b, &tol());
    prop_assert_eq!(t1.value.to_bits(), t2.value.to_bits());
    Ok(())
}

// --- verifier ---

fn quad(v: &Verifier, c: &Catalog, id: &str, b: &Bindings) -> Result<f64, TestCaseError> {
    let r = v.quadrature(c.get(id).unwrap(), b).unwrap();
    prop_assert!(r.is_converged(), "{id} at {b}: {}", r.status);
    Ok(r.value)
}

/// Swapping l and m leaves the eq_2.17 integral and its closed form alone.
pub fn eq_2_17_symmetry(l: f64, m: f64) -> Check {
    let c = Catalog::builtin();
    let v = Verifier::new(tol());
    let fwd = Bindings::new().with("l", l).with("m", m);
    let rev = Bindings::new().with("l", m).with("m", l);
    prop_assert!((quad(&v, &c, "eq_2.17", &fwd)? - quad(&v, &c, "eq_2.17", &rev)?).abs() <= 1e-9);
    let cf = |b: &Bindings| c.closed_form_value("eq_2.17", b).unwrap();
    prop_assert!((cf(&fwd) - cf(&rev)).abs() <= 1e-9);
    Ok(())
}

/// int ln(1 + l^2 x^2)/(1 + x^2) = 2 int atan(lx)/(x(1 + x^2)) = pi ln(1 + l).
pub fn eq_2_10_chain(l: f64) -> Check {
    let c = Catalog::builtin();
    let v = Verifier::new(tol());
    let b = Bindings::new().with("l", l);
    let lhs = quad(&v, &c, "eq_2.10", &b)?;
    let mid = 2.0 * quad(&v, &c, "eq_2.12", &b)?;
    let rhs = PI * l.ln_1p();
    let allowed = |x: f64| 1e-10_f64.max(1e-8 * x.abs());
    prop_assert!((lhs - mid).abs() <= allowed(mid), "{lhs} vs {mid}");
    prop_assert!((mid - rhs).abs() <= allowed(rhs), "{mid} vs {rhs}");
    Ok(())
}

/// The eq_2.4 integral splits into two eq_2.2 integrals.
pub fn eq_2_4_reduction(a: f64, b: f64) -> Check {
    let c = Catalog::builtin();
    let v = Verifier::new(tol());
    let whole = quad(&v, &c, "eq_2.4", &Bindings::new().with("a", a).with("b", b))?;
    let parts =
        quad(&v, &c, "eq_2.2", &Bindings::new().with("a", a))? - quad(&v, &c, "eq_2.2", &Bindings::new().with("a", b))?;
    prop_assert!((whole - parts).abs() <= 1e-10_f64.max(1e-8 * parts.abs()), "{whole} vs {parts}");
    Ok(())
}
