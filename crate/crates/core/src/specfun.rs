//! Sine and cosine integrals, Catalan's constant, the Gaussian integral and
//! Frullani's formula.
//!
//! `si` and `ci` use the tail-normalized convention
//! `si(x) = -int_x^inf sin t/t dt` and `ci(x) = -int_x^inf cos t/t dt`,
//! and are evaluated purely by quadrature. Both are defined for `x > 0` only.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::accel::euler_averages;
use crate::quadrature::{
    integrate_exp_sinh, integrate_finite, integrate_oscillatory, Integrand, Patch, QuadratureResult, ToleranceConfig,
    TrigKind,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    Quadrature,
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpecialValue {
    pub value: f64,
    pub method: Method,
    pub error_bound: f64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SpecfunError {
    #[error("{function} requires a positive argument, got {arg}")]
    NonPositive { function: &'static str, arg: f64 },
    #[error("quadrature for {function}({arg}) did not converge")]
    NoConvergence { function: &'static str, arg: f64 },
}

fn internal_tol() -> ToleranceConfig {
    ToleranceConfig { rel_tol: 1e-11, abs_tol: 1e-13, ..ToleranceConfig::default() }
}

fn require_positive(function: &'static str, x: f64) -> Result<(), SpecfunError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(SpecfunError::NonPositive { function, arg: x })
    }
}

fn sinc() -> Integrand {
    Integrand::from_fn(|t| t.sin() / t).with_patch(Patch::new(0.0, 1.0, 1e-8))
}

fn converged(function: &'static str, arg: f64, r: QuadratureResult) -> Result<QuadratureResult, SpecfunError> {
    if r.is_converged() {
        Ok(r)
    } else {
        Err(SpecfunError::NoConvergence { function, arg })
    }
}

/// `si(x) = -pi/2 + int_0^x sin t/t dt`.
pub fn si_value(x: f64) -> Result<SpecialValue, SpecfunError> {
    require_positive("si", x)?;
    let r = converged("si", x, integrate_finite(&sinc(), 0.0, x, &internal_tol()))?;
    Ok(SpecialValue {
        value: -FRAC_PI_2 + r.value,
        method: Method::Quadrature,
        error_bound: r.error_estimate + 4.0 * f64::EPSILON,
    })
}

pub fn si(x: f64) -> Result<f64, SpecfunError> {
    si_value(x).map(|v| v.value)
}

/// `ci(x) = -(int_x^X cos t/t dt + int_X^inf cos t/t dt)` with `X = max(x, 1)`;
/// the tail goes through the oscillatory kernel.
pub fn ci_value(x: f64) -> Result<SpecialValue, SpecfunError> {
    require_positive("ci", x)?;
    let tol = internal_tol();
    let split = x.max(1.0);
    let head = if split > x {
        let f = Integrand::from_fn(|t| t.cos() / t);
        converged("ci", x, integrate_finite(&f, x, split, &tol))?
    } else {
        QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            status: crate::quadrature::Status::Converged,
        }
    };
    let env = Integrand::from_fn(|t| 1.0 / t);
    let tail = converged("ci", x, integrate_oscillatory(&env, split, 1.0, TrigKind::Cos, &tol))?;
    Ok(SpecialValue {
        value: -(head.value + tail.value),
        method: Method::Quadrature,
        error_bound: head.error_estimate + tail.error_estimate,
    })
}

pub fn ci(x: f64) -> Result<f64, SpecfunError> {
    ci_value(x).map(|v| v.value)
}

const CATALAN_TERMS: usize = 80;
const CATALAN_DEPTH: usize = 12;

/// Partial sums of `sum_{n>=0} (-1)^n / (2n+1)^2`.
pub fn catalan_partial_sums(terms: usize) -> Vec<f64> {
    (0..terms)
        .scan(0.0, |s, n| {
            let d = (2 * n + 1) as f64;
            let term = 1.0 / (d * d);
            *s += if n % 2 == 0 { term } else { -term };
            Some(*s)
        })
        .collect()
}

/// Successive Euler-averaged estimates of Catalan's constant. Consecutive
/// estimates lie on opposite sides of the limit with shrinking error.
pub fn catalan_estimates() -> Vec<f64> {
    euler_averages(&catalan_partial_sums(CATALAN_TERMS), CATALAN_DEPTH)
}

pub fn catalan_value() -> SpecialValue {
    let est = catalan_estimates();
    let n = est.len();
    SpecialValue {
        value: est[n - 1],
        method: Method::Series,
        // bracketing: the limit lies between the last two estimates
        error_bound: (est[n - 1] - est[n - 2]).abs(),
    }
}

pub fn catalan() -> f64 {
    catalan_value().value
}

/// `int_0^inf exp(-x^2) dx = sqrt(pi)/2`, with `sqrt(pi) = Gamma(1/2)`.
pub fn gaussian_integral() -> SpecialValue {
    SpecialValue { value: 0.5 * PI.sqrt(), method: Method::Constant, error_bound: f64::EPSILON }
}

/// Frullani's formula `(f(0) - f(inf)) * ln(b/a)`.
pub fn frullani(f0: f64, finf: f64, a: f64, b: f64) -> Result<f64, SpecfunError> {
    require_positive("frullani scale a", a)?;
    require_positive("frullani scale b", b)?;
    Ok((f0 - finf) * (b / a).ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrullaniCheck {
    pub formula: f64,
    pub quadrature: QuadratureResult,
}

impl FrullaniCheck {
    pub fn deviation(&self) -> f64 {
        (self.formula - self.quadrature.value).abs()
    }
}

/// Evaluates `int_0^inf (f(ax) - f(bx))/x dx` by quadrature next to the formula.
pub fn frullani_check(
    f: &Integrand,
    f0: f64,
    finf: f64,
    a: f64,
    b: f64,
    tol: &ToleranceConfig,
) -> Result<FrullaniCheck, SpecfunError> {
    let formula = frullani(f0, finf, a, b)?;
    let g = f.clone();
    let integrand = Integrand::new(move |x| Ok((g.eval(a * x)? - g.eval(b * x)?) / x));
    let quadrature = integrate_exp_sinh(&integrand, 0.0, tol);
    Ok(FrullaniCheck { formula, quadrature })
}
