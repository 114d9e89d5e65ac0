//! One-dimensional quadrature for proper and improper integrals.
//!
//! Four kernels cover the hard cases met by parametric integral families:
//!
//! * [`integrate_finite`]: globally adaptive Gauss-Kronrod (7/15) bisection.
//! * [`integrate_tanh_sinh`]: double-exponential rule for integrable
//!   endpoint singularities on a finite interval.
//! * [`integrate_exp_sinh`]: double-exponential rule for `[a, inf)` with a
//!   decaying integrand.
//! * [`integrate_oscillatory`]: half-period cells summed and accelerated
//!   with the epsilon algorithm, for conditionally convergent tails.
//!
//! [`integrate_auto`] picks a kernel from [`Hints`]. All kernels are pure and
//! deterministic: the same inputs produce bit-identical values.

mod double_exp;
mod gauss_kronrod;
mod oscillatory;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::expr::{Compiled, EvalError};

pub use double_exp::{integrate_exp_sinh, integrate_tanh_sinh};
pub use gauss_kronrod::integrate_finite;
pub use oscillatory::{integrate_oscillating_cells, integrate_oscillatory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxDepthReached,
    EvaluationFault,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Converged => "converged",
            Status::MaxDepthReached => "max_depth_reached",
            Status::EvaluationFault => "evaluation_fault",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub status: Status,
}

impl QuadratureResult {
    pub fn is_converged(&self) -> bool {
        self.status == Status::Converged
    }

    fn negated(self) -> Self {
        QuadratureResult { value: -self.value, ..self }
    }

    /// Sum of two partial results; the worse status wins.
    fn combine(self, other: Self) -> Self {
        let status = match (self.status, other.status) {
            (Status::EvaluationFault, _) | (_, Status::EvaluationFault) => Status::EvaluationFault,
            (Status::MaxDepthReached, _) | (_, Status::MaxDepthReached) => Status::MaxDepthReached,
            _ => Status::Converged,
        };
        QuadratureResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
            status,
        }
    }
}

/// Accuracy targets and work limits shared by every kernel and by the
/// finite-difference checks in the verifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ToleranceConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum bisection depth of the Gauss-Kronrod kernel.
    pub max_depth: u32,
    /// Maximum step-halving level of the double-exponential kernels.
    pub de_max_level: u32,
    /// Maximum number of half-period cells in the oscillatory kernel.
    pub osc_max_periods: usize,
    /// Default removable-singularity patch radius, relative to `max(1, |x0|)`.
    pub patch_delta: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_depth: 18,
            de_max_level: 12,
            osc_max_periods: 200,
            patch_delta: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.patch_delta > 0.0) {
            return Err("tolerances must be positive".into());
        }
        if self.max_depth < 1 || self.de_max_level < 1 || self.osc_max_periods < 1 {
            return Err("depth limits must be at least 1".into());
        }
        Ok(())
    }

    /// Target error for a result of magnitude `value`.
    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    /// Central-difference step for a first derivative at `at`.
    pub fn fd_step_first(&self, at: f64) -> f64 {
        f64::EPSILON.cbrt() * at.abs().max(1.0)
    }

    /// Central-difference step for a second derivative at `at`.
    pub fn fd_step_second(&self, at: f64) -> f64 {
        f64::EPSILON.sqrt().sqrt() * at.abs().max(1.0)
    }

    pub(crate) fn scaled(&self, factor: f64) -> Self {
        ToleranceConfig { rel_tol: self.rel_tol * factor, abs_tol: self.abs_tol * factor, ..*self }
    }
}

/// A removable singularity: within `delta * max(1, |x0|)` of `x0` the
/// integrand returns `value` instead of evaluating its formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Patch {
    pub x0: f64,
    pub value: f64,
    pub delta: f64,
}

impl Patch {
    pub fn new(x0: f64, value: f64, delta: f64) -> Self {
        Patch { x0, value, delta }
    }

    fn covers(&self, x: f64) -> bool {
        (x - self.x0).abs() <= self.delta * self.x0.abs().max(1.0)
    }
}

type RealFn = dyn Fn(f64) -> Result<f64, EvalError> + Send + Sync;

/// A real function of one variable plus its removable-singularity patches.
#[derive(Clone)]
pub struct Integrand {
    f: Arc<RealFn>,
    patches: Vec<Patch>,
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand").field("patches", &self.patches).finish_non_exhaustive()
    }
}

impl Integrand {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(f64) -> Result<f64, EvalError> + Send + Sync + 'static,
    {
        Integrand { f: Arc::new(f), patches: Vec::new() }
    }

    /// Wraps an infallible closure.
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Integrand::new(move |x| Ok(f(x)))
    }

    /// An expression compiled with exactly one slot (the integration variable).
    pub fn from_compiled(c: Compiled) -> Self {
        Integrand::new(move |x| c.eval(&[x]))
    }

    pub fn with_patch(mut self, patch: Patch) -> Self {
        self.patches.push(patch);
        self
    }

    pub fn patches(&self) -> &[Patch] {
        &self.patches
    }

    /// Evaluates the integrand. Non-finite values count as domain faults.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        if let Some(p) = self.patches.iter().find(|p| p.covers(x)) {
            return Ok(p.value);
        }
        let y = (self.f)(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(EvalError::Domain { op: "non-finite value", arg: x })
        }
    }

    /// `x -> f(-x)`, keeping patches mirrored.
    pub fn reflected(&self) -> Integrand {
        let f = self.f.clone();
        Integrand {
            f: Arc::new(move |x| f(-x)),
            patches: self.patches.iter().map(|p| Patch { x0: -p.x0, ..*p }).collect(),
        }
    }

    /// `x -> scale * f(x)`.
    pub fn scaled(&self, scale: f64) -> Integrand {
        let f = self.f.clone();
        Integrand {
            f: Arc::new(move |x| Ok(scale * f(x)?)),
            patches: self.patches.iter().map(|p| Patch { value: scale * p.value, ..*p }).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigKind {
    Sin,
    Cos,
}

impl TrigKind {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            TrigKind::Sin => x.sin(),
            TrigKind::Cos => x.cos(),
        }
    }
}

/// Kernel selection metadata, normally supplied by a catalog entry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Hints {
    pub singular_lower: bool,
    pub singular_upper: bool,
    /// Angular frequency and trig factor of an undamped oscillation.
    pub oscillatory: Option<(f64, TrigKind)>,
    pub decay: bool,
}

/// Dispatches to the kernel that suits the domain and hints.
///
/// * finite, no singular endpoint: Gauss-Kronrod
/// * finite with a flagged endpoint: tanh-sinh
/// * semi-infinite oscillatory (`omega > 0`): oscillatory cells
/// * semi-infinite otherwise: exp-sinh
/// * doubly infinite: split at 0, each half as above
///
/// Reversed bounds flip the sign; equal bounds give exactly 0.
pub fn integrate_auto(f: &Integrand, lower: f64, upper: f64, hints: &Hints, tol: &ToleranceConfig) -> QuadratureResult {
    if lower.is_nan() || upper.is_nan() {
        return QuadratureResult {
            value: f64::NAN,
            error_estimate: f64::INFINITY,
            evaluations: 0,
            status: Status::EvaluationFault,
        };
    }
    if lower == upper {
        return QuadratureResult { value: 0.0, error_estimate: 0.0, evaluations: 0, status: Status::Converged };
    }
    if lower > upper {
        let swapped = Hints { singular_lower: hints.singular_upper, singular_upper: hints.singular_lower, ..*hints };
        return integrate_auto(f, upper, lower, &swapped, tol).negated();
    }
    let osc = hints.oscillatory.filter(|(w, _)| *w != 0.0);
    match (lower.is_finite(), upper.is_finite()) {
        (true, true) => {
            if hints.singular_lower || hints.singular_upper {
                integrate_tanh_sinh(f, lower, upper, tol)
            } else {
                integrate_finite(f, lower, upper, tol)
            }
        }
        (true, false) => semi_infinite(f, lower, osc, tol),
        (false, true) => semi_infinite(&f.reflected(), -upper, osc, tol),
        (false, false) => {
            let right = semi_infinite(f, 0.0, osc, tol);
            let left = semi_infinite(&f.reflected(), 0.0, osc, tol);
            left.combine(right)
        }
    }
}

fn semi_infinite(f: &Integrand, a: f64, osc: Option<(f64, TrigKind)>, tol: &ToleranceConfig) -> QuadratureResult {
    match osc {
        Some((omega, _)) => integrate_oscillating_cells(f, a, omega.abs(), osc_phase(osc), tol),
        None => integrate_exp_sinh(f, a, tol),
    }
}

// Zeros of sin(wx) sit at k*pi/w, zeros of cos(wx) are offset by half a cell.
fn osc_phase(osc: Option<(f64, TrigKind)>) -> f64 {
    match osc {
        Some((_, TrigKind::Cos)) => 0.5,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, LN_2, PI};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn patch_radius_is_relative() {
        let f = Integrand::from_fn(|x| x.sin() / x).with_patch(Patch::new(0.0, 1.0, 1e-8));
        assert_eq!(f.eval(0.0).unwrap(), 1.0);
        assert_eq!(f.eval(5e-9).unwrap(), 1.0);
        assert!(f.eval(1e-3).unwrap() < 1.0);
        let g = Integrand::from_fn(|x| x).with_patch(Patch::new(100.0, 0.0, 1e-8));
        assert_eq!(g.eval(100.0 + 5e-7).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_is_fault() {
        let f = Integrand::from_fn(|x| 1.0 / x);
        assert!(f.eval(0.0).is_err());
    }

    #[test]
    fn auto_squared_exponential_difference() {
        let f = Integrand::from_fn(|x| {
            let y = (1.0 - (-x).exp()) / x;
            y * y
        })
        .with_patch(Patch::new(0.0, 1.0, 1e-8));
        let r = integrate_auto(&f, 0.0, f64::INFINITY, &Hints::default(), &tol());
        assert!(r.is_converged());
        assert!((r.value - 4f64.ln()).abs() < 1e-10 * 4f64.ln(), "{r:?}");
    }

    #[test]
    fn auto_damped_cosine() {
        let f = Integrand::from_fn(|x| (-x).exp() * (1.0 - x.cos()) / x).with_patch(Patch::new(0.0, 0.0, 1e-8));
        let r = integrate_auto(&f, 0.0, f64::INFINITY, &Hints { decay: true, ..Hints::default() }, &tol());
        assert!((r.value - 0.5 * LN_2).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn auto_log_over_cubic_from_one() {
        let f = Integrand::from_fn(|x| (x + (x * x - 1.0).sqrt()).ln() / (x * (1.0 + x * x)));
        let r = integrate_auto(&f, 1.0, f64::INFINITY, &Hints::default(), &tol());
        let l = (1.0 + 2f64.sqrt()).ln();
        assert!((r.value - 0.5 * l * l).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn auto_doubly_infinite_gaussian_cosine() {
        let (a, t) = (0.7, 1.3);
        let f = Integrand::from_fn(move |x| (-a * x * x).exp() * (x * t).cos());
        let r = integrate_auto(&f, f64::NEG_INFINITY, f64::INFINITY, &Hints::default(), &tol());
        let exact = (PI / a).sqrt() * (-t * t / (4.0 * a)).exp();
        assert!((r.value - exact).abs() < 1e-9 * exact, "{r:?}");
    }

    #[test]
    fn auto_reversed_and_empty() {
        let f = Integrand::from_fn(|x| 1.0 / (1.0 + x * x));
        let fwd = integrate_auto(&f, 0.0, 1.0, &Hints::default(), &tol());
        let rev = integrate_auto(&f, 1.0, 0.0, &Hints::default(), &tol());
        assert_eq!(fwd.value, -rev.value);
        assert_eq!(integrate_auto(&f, 2.0, 2.0, &Hints::default(), &tol()).value, 0.0);
    }

    #[test]
    fn auto_oscillatory_dispatch() {
        let f = Integrand::from_fn(|x| x.sin() / x).with_patch(Patch::new(0.0, 1.0, 1e-8));
        let hints = Hints { oscillatory: Some((1.0, TrigKind::Sin)), ..Hints::default() };
        let r = integrate_auto(&f, 0.0, f64::INFINITY, &hints, &tol());
        assert!((r.value - FRAC_PI_2).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn fd_steps() {
        let t = tol();
        assert!((t.fd_step_first(0.5) - 6.055454452393343e-6).abs() < 1e-18);
        assert!((t.fd_step_second(4.0) - 4.0 * 1.220703125e-4).abs() < 1e-15);
    }
}
