//! Double-exponential (tanh-sinh and exp-sinh) rules.
//!
//! Both rules run the trapezoid rule in a transformed variable `t`, halving
//! the step each level and reusing the previous level's sum. Abscissae are
//! generated from their distance to the endpoint, so the endpoint itself is
//! never evaluated.
//!
//! Near an endpoint `e != 0` doubles run out of resolution: `e - d` rounds
//! to `e` once `d` drops below an ulp, which silently drops a tail of order
//! `sqrt(ulp)` for inverse-square-root singularities, and well before that
//! the integrand loses digits to cancellation (`1 - x*x`). Below a cutoff of
//! `|e| * 2^-27` the integrand is instead extrapolated with a power law
//! `f(d) ~ c * d^p` fitted at two representable anchor points.

use std::f64::consts::FRAC_PI_2;

use super::{Integrand, QuadratureResult, Status, ToleranceConfig};
use crate::expr::EvalError;

const TANH_SINH_T_MAX: f64 = 6.0;
const EXP_SINH_T_MIN: f64 = -6.0;
const EXP_SINH_T_MAX: f64 = 4.5;
const MIN_LEVEL: u32 = 3;
const RESOLUTION: f64 = 7.450580596923828e-9; // 2^-27
const ANCHOR_RATIO: f64 = 4.0;
// Rounding floor of the error estimate, in units of eps * h * sum |terms|.
// Without it two levels that agree bit for bit claim zero error.
const ROUNDING_FLOOR: f64 = 10.0 * f64::EPSILON;

#[derive(Clone, Copy, Debug)]
struct PowerFit {
    d_ref: f64,
    f_ref: f64,
    p: f64,
}

impl PowerFit {
    fn at(&self, d: f64) -> f64 {
        if self.p == 0.0 {
            self.f_ref
        } else {
            self.f_ref * (d / self.d_ref).powf(self.p)
        }
    }
}

/// One endpoint of the integration domain, approached from inside.
struct Side {
    endpoint: f64,
    // +1: abscissa is endpoint + d; -1: endpoint - d
    dir: f64,
    cutoff: f64,
    fit: Option<PowerFit>,
}

impl Side {
    fn new(endpoint: f64, dir: f64) -> Self {
        Side { endpoint, dir, cutoff: endpoint.abs() * RESOLUTION, fit: None }
    }

    fn value(&mut self, f: &Integrand, d: f64, evals: &mut usize) -> Result<f64, EvalError> {
        if d <= 0.0 {
            return Ok(0.0);
        }
        if d >= self.cutoff {
            *evals += 1;
            return f.eval(self.endpoint + self.dir * d);
        }
        if self.fit.is_none() {
            self.fit = Some(self.fit_power(f, evals)?);
        }
        Ok(self.fit.expect("fit just computed").at(d))
    }

    fn fit_power(&self, f: &Integrand, evals: &mut usize) -> Result<PowerFit, EvalError> {
        let xa = self.endpoint + self.dir * self.cutoff;
        let xb = self.endpoint + self.dir * self.cutoff * ANCHOR_RATIO;
        // exact distances of the rounded anchors (Sterbenz)
        let da = (xa - self.endpoint).abs();
        let db = (xb - self.endpoint).abs();
        *evals += 2;
        let fa = f.eval(xa)?;
        let fb = f.eval(xb)?;
        let p = if fa * fb > 0.0 && da > 0.0 && db > da {
            ((fa / fb).ln() / (da / db).ln()).clamp(-0.99, 50.0)
        } else {
            0.0
        };
        Ok(PowerFit { d_ref: da, f_ref: fa, p })
    }
}

struct Level {
    h: f64,
    sum: f64,
    abs_sum: f64,
}

/// Runs the level-doubling trapezoid loop. `eval_step(t)` returns the
/// weighted contribution of all abscissae at parameter `t`.
fn de_loop<F>(t_min: f64, t_max: f64, tol: &ToleranceConfig, mut eval_step: F, evals: &mut usize) -> QuadratureResult
where
    F: FnMut(f64, &mut usize) -> Result<f64, EvalError>,
{
    let fault = |value: f64, evaluations: usize| QuadratureResult {
        value,
        error_estimate: f64::INFINITY,
        evaluations,
        status: Status::EvaluationFault,
    };
    let mut level = Level { h: 1.0, sum: 0.0, abs_sum: 0.0 };
    let k_lo = t_min.ceil() as i64;
    let k_hi = t_max.floor() as i64;
    for k in k_lo..=k_hi {
        match eval_step(k as f64, evals) {
            Ok(v) => {
                level.sum += v;
                level.abs_sum += v.abs();
            }
            Err(_) => return fault(f64::NAN, *evals),
        }
    }
    let mut estimate = level.h * level.sum;
    let mut error = f64::INFINITY;
    for lvl in 1..=tol.de_max_level {
        level.h *= 0.5;
        let h = level.h;
        let k_lo = (t_min / h).ceil() as i64;
        let k_hi = (t_max / h).floor() as i64;
        let mut fresh = 0.0;
        for k in k_lo..=k_hi {
            if k % 2 == 0 {
                continue;
            }
            match eval_step(k as f64 * h, evals) {
                Ok(v) => {
                    fresh += v;
                    level.abs_sum += v.abs();
                }
                Err(_) => return fault(estimate, *evals),
            }
        }
        level.sum += fresh;
        let next = h * level.sum;
        error = (next - estimate).abs().max(ROUNDING_FLOOR * h * level.abs_sum);
        estimate = next;
        if lvl >= MIN_LEVEL && error <= tol.target(estimate) {
            return QuadratureResult {
                value: estimate,
                error_estimate: error,
                evaluations: *evals,
                status: Status::Converged,
            };
        }
    }
    QuadratureResult { value: estimate, error_estimate: error, evaluations: *evals, status: Status::MaxDepthReached }
}

/// Tanh-sinh quadrature on a finite interval `[a, b]`; tolerates integrable
/// singularities at either endpoint.
pub fn integrate_tanh_sinh(f: &Integrand, a: f64, b: f64, tol: &ToleranceConfig) -> QuadratureResult {
    if a == b {
        return QuadratureResult { value: 0.0, error_estimate: 0.0, evaluations: 0, status: Status::Converged };
    }
    if a > b {
        let r = integrate_tanh_sinh(f, b, a, tol);
        return QuadratureResult { value: -r.value, ..r };
    }
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let mut left = Side::new(a, 1.0);
    let mut right = Side::new(b, -1.0);
    let mut evals = 0;
    let step = |t: f64, evals: &mut usize| -> Result<f64, EvalError> {
        if t == 0.0 {
            *evals += 1;
            return Ok(half * FRAC_PI_2 * f.eval(center)?);
        }
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u).exp();
        // distance to the endpoint: half * (1 - tanh u)
        let d = half * (2.0 * e / (1.0 + e));
        let w = half * FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        if w == 0.0 {
            return Ok(0.0);
        }
        let fl = left.value(f, d, evals)?;
        let fr = right.value(f, d, evals)?;
        Ok(w * (fl + fr))
    };
    // only t >= 0 is enumerated; each positive t covers both sides
    de_loop(0.0, TANH_SINH_T_MAX, tol, step, &mut evals)
}

/// Exp-sinh quadrature on `[a, inf)` for integrands that decay at infinity;
/// tolerates an integrable singularity at `a`.
pub fn integrate_exp_sinh(f: &Integrand, a: f64, tol: &ToleranceConfig) -> QuadratureResult {
    let mut side = Side::new(a, 1.0);
    let mut evals = 0;
    let step = |t: f64, evals: &mut usize| -> Result<f64, EvalError> {
        let v = FRAC_PI_2 * t.sinh();
        let d = v.exp();
        let w = FRAC_PI_2 * t.cosh() * d;
        if w == 0.0 || !d.is_finite() {
            return Ok(0.0);
        }
        Ok(w * side.value(f, d, evals)?)
    };
    de_loop(EXP_SINH_T_MIN, EXP_SINH_T_MAX, tol, step, &mut evals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Patch;
    use std::f64::consts::{LN_2, PI};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn arcsine_one() {
        let f = Integrand::from_fn(|x| 1.0 / (1.0 - x * x).sqrt());
        let r = integrate_tanh_sinh(&f, 0.0, 1.0, &tol());
        assert!(r.is_converged(), "{r:?}");
        assert!((r.value - FRAC_PI_2).abs() < 1e-11, "{r:?}");
    }

    #[test]
    fn arctan_over_x_sqrt() {
        let f = Integrand::from_fn(|x| x.atan() / (x * (1.0 - x * x).sqrt()));
        let r = integrate_tanh_sinh(&f, 0.0, 1.0, &tol());
        let exact = FRAC_PI_2 * (1.0 + 2f64.sqrt()).ln();
        assert!((r.value - exact).abs() < 1e-10 * exact, "{r:?} vs {exact}");
    }

    #[test]
    fn arctan_over_sqrt() {
        let f = Integrand::from_fn(|x| x.atan() / (1.0 - x * x).sqrt());
        let r = integrate_tanh_sinh(&f, 0.0, 1.0, &tol());
        let l = (1.0 + 2f64.sqrt()).ln();
        let exact = PI * PI / 8.0 - 0.5 * l * l;
        assert!((r.value - exact).abs() < 1e-10 * exact, "{r:?} vs {exact}");
    }

    #[test]
    fn log_sine() {
        let f = Integrand::from_fn(|x: f64| x.sin().ln());
        let r = integrate_tanh_sinh(&f, 0.0, FRAC_PI_2, &tol());
        assert!((r.value + FRAC_PI_2 * LN_2).abs() < 1e-11, "{r:?}");
    }

    #[test]
    fn gaussian_half_line() {
        let f = Integrand::from_fn(|x| (-x * x).exp());
        let r = integrate_exp_sinh(&f, 0.0, &tol());
        assert!(r.is_converged());
        assert!((r.value - 0.886226925452758).abs() < 1e-13, "{r:?}");
    }

    #[test]
    fn squared_gaussian_difference() {
        let f = Integrand::from_fn(|x| (1.0 - (-x * x).exp()) / (x * x)).with_patch(Patch::new(0.0, 1.0, 1e-4));
        let r = integrate_exp_sinh(&f, 0.0, &tol());
        assert!((r.value - PI.sqrt()).abs() < 1e-10 * PI.sqrt(), "{r:?}");
    }

    #[test]
    fn hecke() {
        let f = Integrand::from_fn(|x: f64| (-x - 1.0 / x).exp() / x.sqrt());
        let r = integrate_exp_sinh(&f, 0.0, &tol());
        let exact = PI.sqrt() * (-2.0f64).exp();
        assert!((r.value - exact).abs() < 1e-10 * exact, "{r:?}");
    }

    #[test]
    fn shifted_singularity_on_half_line() {
        // arctan t / (t sqrt(t^2-1)) on [1, inf)
        let f = Integrand::from_fn(|t: f64| t.atan() / (t * (t * t - 1.0).sqrt()));
        let r = integrate_exp_sinh(&f, 1.0, &tol());
        let l = (1.0 + 2f64.sqrt()).ln();
        let exact = PI * PI / 8.0 + 0.5 * l * l;
        assert!((r.value - exact).abs() < 1e-9 * exact, "{r:?} vs {exact}");
    }
}
