//! Executable checks of integral identities over parameter grids: closed
//! forms, differentiation under the integral sign (with Leibniz boundary
//! terms), ODE residuals, Frullani structure, the Fourier-series oracle for
//! `int_0^pi ln(1 - 2a cos x + a^2) dx`, and cross-family identities.

mod identities;
mod ode;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{Catalog, CatalogError, Instance, IntegralFamily};
use crate::expr::{Bindings, Expr};
use crate::quadrature::{integrate_auto, Integrand, Patch, QuadratureResult, Status, ToleranceConfig};
use crate::specfun;

pub use identities::{builtin_identities, Identity, IdentityContext, Side};
pub use ode::{builtin_ode_specs, ode_spec_for, OdeSpec, ODE_SYMBOLS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    ClosedForm,
    Derivative,
    Leibniz,
    OdeResidual,
    Frullani,
    SeriesOracle,
    ReductionIdentity,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        CheckKind::ClosedForm,
        CheckKind::Derivative,
        CheckKind::Leibniz,
        CheckKind::OdeResidual,
        CheckKind::Frullani,
        CheckKind::SeriesOracle,
        CheckKind::ReductionIdentity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::ClosedForm => "closed_form",
            CheckKind::Derivative => "derivative",
            CheckKind::Leibniz => "leibniz",
            CheckKind::OdeResidual => "ode_residual",
            CheckKind::Frullani => "frullani",
            CheckKind::SeriesOracle => "series_oracle",
            CheckKind::ReductionIdentity => "reduction_identity",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown check `{s}`"))
    }
}

/// A point passes when `|computed - expected| <= max(abs, rel * |expected|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheckTolerance {
    pub rel: f64,
    pub abs: f64,
}

impl CheckTolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        CheckTolerance { rel, abs }
    }

    pub fn allowed(&self, expected: f64) -> f64 {
        self.abs.max(self.rel * expected.abs())
    }

    /// rel 1e-8 on finite domains, 1e-7 on infinite or oscillatory ones.
    pub fn closed_form(family: &IntegralFamily) -> Self {
        let rel = if family.has_infinite_domain() || family.is_oscillatory() { 1e-7 } else { 1e-8 };
        CheckTolerance { rel, abs: 1e-10 }
    }

    /// Finite-difference checks: rel 1e-5, with an absolute floor for
    /// derivatives that vanish.
    pub fn derivative() -> Self {
        CheckTolerance { rel: 1e-5, abs: 1e-8 }
    }

    pub fn identity() -> Self {
        CheckTolerance { rel: 1e-8, abs: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointRecord {
    pub params: Bindings,
    /// The quadrature-derived side.
    pub computed: f64,
    /// The reference side (closed form, derivative integral, zero residual...).
    pub expected: f64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    pub allowed: f64,
    /// Worst quadrature status among the evaluations behind this point.
    pub status: Status,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PointRecord {
    pub fn compare(params: Bindings, computed: f64, expected: f64, tol: &CheckTolerance, status: Status) -> Self {
        let abs_dev = (computed - expected).abs();
        let rel_dev = abs_dev / expected.abs().max(1e-300);
        let allowed = tol.allowed(expected);
        let converged = status == Status::Converged;
        PointRecord {
            params,
            computed,
            expected,
            abs_dev,
            rel_dev,
            allowed,
            status,
            pass: converged && abs_dev <= allowed,
            note: (!converged).then(|| format!("quadrature status: {status}")),
        }
    }

    pub fn failed(params: Bindings, note: impl Into<String>) -> Self {
        PointRecord {
            params,
            computed: f64::NAN,
            expected: f64::NAN,
            abs_dev: f64::INFINITY,
            rel_dev: f64::INFINITY,
            allowed: 0.0,
            status: Status::EvaluationFault,
            pass: false,
            note: Some(note.into()),
        }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(match self.note.take() {
            Some(old) => format!("{old}; {note}"),
            None => note,
        });
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub family_id: String,
    pub check_kind: CheckKind,
    pub grid: Vec<Bindings>,
    pub max_abs_dev: f64,
    pub max_rel_dev: f64,
    pub worst_point: Bindings,
    pub pass: bool,
    pub tolerance: CheckTolerance,
    pub details: Vec<PointRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    /// Aggregates point records. A report without any applicable point fails.
    pub fn from_records(
        family_id: &str,
        check_kind: CheckKind,
        tolerance: CheckTolerance,
        details: Vec<PointRecord>,
        mut notes: Vec<String>,
    ) -> Self {
        let worst = details
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| a.abs_dev.total_cmp(&b.abs_dev).then(j.cmp(i)))
            .map(|(_, r)| r);
        if details.is_empty() {
            notes.push("no applicable grid points".into());
        }
        let mut grid: Vec<Bindings> = Vec::new();
        for r in &details {
            if !grid.contains(&r.params) {
                grid.push(r.params.clone());
            }
        }
        CheckReport {
            family_id: family_id.to_string(),
            check_kind,
            grid,
            max_abs_dev: details.iter().map(|r| r.abs_dev).fold(0.0, f64::max),
            max_rel_dev: details.iter().map(|r| r.rel_dev).fold(0.0, f64::max),
            worst_point: worst.map(|r| r.params.clone()).unwrap_or_default(),
            pass: !details.is_empty() && details.iter().all(|r| r.pass),
            tolerance,
            details,
            notes,
        }
    }
}

fn worse(a: Status, b: Status) -> Status {
    let rank = |s| match s {
        Status::Converged => 0,
        Status::MaxDepthReached => 1,
        Status::EvaluationFault => 2,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct CacheKey {
    family: String,
    /// `None` for the integrand itself, `Some(p)` for its partial in `p`.
    partial: Option<String>,
    point: Vec<(String, u64)>,
    tol: (u64, u64),
}

/// Quadrature results keyed by family, integrand, bindings and tolerance.
/// Safe for concurrent use; values are computed outside the lock.
#[derive(Debug, Default)]
pub struct QuadCache {
    map: Mutex<HashMap<CacheKey, QuadratureResult>>,
}

impl QuadCache {
    pub fn len(&self) -> usize {
        self.map.lock().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get_or_compute(
        &self,
        key: CacheKey,
        compute: impl FnOnce() -> Result<QuadratureResult, CatalogError>,
    ) -> Result<QuadratureResult, CatalogError> {
        if let Some(r) = self.map.lock().ok().and_then(|m| m.get(&key).copied()) {
            return Ok(r);
        }
        let r = compute()?;
        if let Ok(mut m) = self.map.lock() {
            m.insert(key, r);
        }
        Ok(r)
    }
}

/// Central-difference values `F(a + k h)` for `k = -2..=2`.
struct Stencil {
    h: f64,
    values: [f64; 5],
    status: Status,
}

impl Stencil {
    fn first(&self) -> f64 {
        (self.values[3] - self.values[1]) / (2.0 * self.h)
    }

    fn second(&self) -> f64 {
        let [m2, m1, c, p1, p2] = self.values;
        (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * self.h * self.h)
    }
}

/// Runs checks against one catalog with shared quadrature settings and cache.
#[derive(Debug, Default)]
pub struct Verifier {
    tol: ToleranceConfig,
    cache: QuadCache,
}

impl Verifier {
    pub fn new(tol: ToleranceConfig) -> Self {
        Verifier { tol, cache: QuadCache::default() }
    }

    pub fn tolerance(&self) -> &ToleranceConfig {
        &self.tol
    }

    pub fn cache(&self) -> &QuadCache {
        &self.cache
    }

    /// Quadrature settings for values that get differenced: the step
    /// divides the quadrature error, so these are much tighter.
    pub fn fd_tolerance(&self) -> ToleranceConfig {
        ToleranceConfig {
            rel_tol: self.tol.rel_tol.min(1e-12),
            // integrals that cancel to 0 cannot beat the rounding floor
            // 50 eps int|f|, so the absolute part stays above it
            abs_tol: self.tol.abs_tol.min(1e-13),
            ..self.tol
        }
    }

    fn key(&self, family: &IntegralFamily, partial: Option<&str>, b: &Bindings, tol: &ToleranceConfig) -> CacheKey {
        CacheKey {
            family: family.id.clone(),
            partial: partial.map(str::to_string),
            point: b.iter().map(|(k, v)| (k.to_string(), v.to_bits())).collect(),
            tol: (tol.rel_tol.to_bits(), tol.abs_tol.to_bits()),
        }
    }

    /// Quadrature of the family at `b` (range checks skipped so stencils may
    /// touch a closed range edge).
    pub fn quadrature(&self, family: &IntegralFamily, b: &Bindings) -> Result<QuadratureResult, CatalogError> {
        self.quadrature_with(family, b, &self.tol)
    }

    fn quadrature_with(
        &self,
        family: &IntegralFamily,
        b: &Bindings,
        tol: &ToleranceConfig,
    ) -> Result<QuadratureResult, CatalogError> {
        self.cache.get_or_compute(self.key(family, None, b, tol), || {
            let inst = family.instantiate_unchecked(b)?;
            Ok(integrate_auto(&inst.integrand, inst.lower, inst.upper, &inst.hints, tol))
        })
    }

    /// Quadrature of the partial derivative of the integrand in `param`.
    pub fn partial_quadrature(
        &self,
        family: &IntegralFamily,
        param: &str,
        b: &Bindings,
    ) -> Result<QuadratureResult, CatalogError> {
        let tol = self.fd_tolerance();
        self.cache.get_or_compute(self.key(family, Some(param), b, &tol), || {
            let inst = partial_instance(family, param, b)?;
            Ok(integrate_auto(&inst.integrand, inst.lower, inst.upper, &inst.hints, &tol))
        })
    }

    fn stencil(&self, family: &IntegralFamily, param: &str, b: &Bindings, h: f64) -> Result<Stencil, CatalogError> {
        let centre = b.get(param).unwrap_or(0.0);
        let tol = self.fd_tolerance();
        let mut values = [0.0; 5];
        let mut status = Status::Converged;
        for (i, k) in (-2i32..=2).enumerate() {
            let r = self.quadrature_with(family, &b.clone().with(param, centre + k as f64 * h), &tol)?;
            values[i] = r.value;
            status = worse(status, r.status);
        }
        Ok(Stencil { h, values, status })
    }

    /// Whether the stencil `a +- 2h` stays inside the range and constraints.
    fn stencil_fits(family: &IntegralFamily, param: &str, b: &Bindings, h: f64) -> bool {
        let (Some(spec), Some(a)) = (family.param(param), b.get(param)) else {
            return false;
        };
        spec.range.contains_with_margin(a, 2.0 * h)
            && [-2.0, 2.0].iter().all(|k| {
                let shifted = b.clone().with(param, a + k * h);
                family.constraints.iter().all(|c| c.holds(&shifted).unwrap_or(false))
            })
    }

    pub fn check_closed_form(&self, family: &IntegralFamily, grid: &[Bindings], tol: &CheckTolerance) -> CheckReport {
        let details = grid
            .iter()
            .map(|b| {
                let q = match family.check_bindings(b).and_then(|_| self.quadrature(family, b)) {
                    Ok(q) => q,
                    Err(e) => return PointRecord::failed(b.clone(), e.to_string()),
                };
                match family.closed_form_value(b) {
                    Ok(cf) => PointRecord::compare(b.clone(), q.value, cf, tol, q.status),
                    Err(e) => PointRecord::failed(b.clone(), e.to_string()),
                }
            })
            .collect();
        CheckReport::from_records(&family.id, CheckKind::ClosedForm, *tol, details, Vec::new())
    }

    /// Central difference of the quadrature values against quadrature of the
    /// differentiated integrand. Grid points whose stencil would leave the
    /// parameter range are skipped and listed in the notes.
    pub fn check_derivative(
        &self,
        family: &IntegralFamily,
        param: &str,
        grid: &[Bindings],
        tol: &CheckTolerance,
    ) -> CheckReport {
        let mut notes = vec![format!("d/d{param}")];
        if family.has_moving_bounds() {
            notes.push("bounds depend on the parameters; check_leibniz applies".into());
            return CheckReport::from_records(&family.id, CheckKind::Derivative, *tol, Vec::new(), notes);
        }
        let details = self.fd_records(family, param, grid, tol, &mut notes, |_| Ok((0.0, None)));
        CheckReport::from_records(&family.id, CheckKind::Derivative, *tol, details, notes)
    }

    /// Like [`check_derivative`](Self::check_derivative) plus the boundary
    /// terms `f(psi) psi' - f(phi) phi'` of the moving limits. Each point notes
    /// the boundary contribution and which sign of it fits the difference
    /// quotient.
    pub fn check_leibniz(
        &self,
        family: &IntegralFamily,
        param: &str,
        grid: &[Bindings],
        tol: &CheckTolerance,
    ) -> CheckReport {
        let mut notes = vec![format!("d/d{param}")];
        let boundary = |b: &Bindings| {
            let t = leibniz_boundary_term(family, param, b)?;
            Ok((t, Some(format!("boundary term {t:.10e}"))))
        };
        let details = self.fd_records(family, param, grid, tol, &mut notes, boundary);
        CheckReport::from_records(&family.id, CheckKind::Leibniz, *tol, details, notes)
    }

    fn fd_records(
        &self,
        family: &IntegralFamily,
        param: &str,
        grid: &[Bindings],
        tol: &CheckTolerance,
        notes: &mut Vec<String>,
        boundary: impl Fn(&Bindings) -> Result<(f64, Option<String>), String>,
    ) -> Vec<PointRecord> {
        let mut details = Vec::new();
        for b in grid {
            let Some(a) = b.get(param) else {
                details.push(PointRecord::failed(b.clone(), format!("no binding for `{param}`")));
                continue;
            };
            let h = self.tol.fd_step_first(a);
            if !Self::stencil_fits(family, param, b, h) {
                notes.push(format!("skipped {b}: stencil leaves the parameter range"));
                continue;
            }
            let record = (|| -> Result<PointRecord, String> {
                let st = self.stencil(family, param, b, h).map_err(|e| e.to_string())?;
                let d = self.partial_quadrature(family, param, b).map_err(|e| e.to_string())?;
                let (bterm, bnote) = boundary(b)?;
                let expected = d.value + bterm;
                let rec = PointRecord::compare(b.clone(), st.first(), expected, tol, worse(st.status, d.status));
                Ok(match bnote {
                    Some(n) if bterm != 0.0 => {
                        let flipped = (st.first() - (d.value - bterm)).abs();
                        let fits = if rec.abs_dev <= flipped { "rule sign fits" } else { "opposite sign fits" };
                        rec.with_note(format!("{n}; {fits}"))
                    }
                    Some(n) => rec.with_note(n),
                    None => rec,
                })
            })();
            details.push(record.unwrap_or_else(|e| PointRecord::failed(b.clone(), e)));
        }
        details
    }

    /// Evaluates the residual of `spec` with `F0` from quadrature and `F1`,
    /// `F2` from 3- and 5-point central differences (step `eps^(1/4)`).
    /// `partner` supplies `P0` for coupled systems.
    pub fn check_ode_residual(
        &self,
        family: &IntegralFamily,
        spec: &OdeSpec,
        partner: Option<&IntegralFamily>,
        grid: &[Bindings],
    ) -> CheckReport {
        let tol = CheckTolerance::new(0.0, spec.tolerance);
        let mut notes = vec![format!("residual {} in d/d{}", spec.residual, spec.param)];
        let mut details = Vec::new();
        for b in grid {
            let Some(a) = b.get(&spec.param) else {
                details.push(PointRecord::failed(b.clone(), format!("no binding for `{}`", spec.param)));
                continue;
            };
            let h = self.tol.fd_step_second(a);
            if !Self::stencil_fits(family, &spec.param, b, h) {
                notes.push(format!("skipped {b}: stencil leaves the parameter range"));
                continue;
            }
            let record = (|| -> Result<PointRecord, String> {
                let st = self.stencil(family, &spec.param, b, h).map_err(|e| e.to_string())?;
                let mut env = b.clone();
                env.set("F0", st.values[2]);
                env.set("F1", st.first());
                env.set("F2", st.second());
                let mut status = st.status;
                if let Some(p) = partner {
                    let q = self.quadrature_with(p, b, &self.fd_tolerance()).map_err(|e| e.to_string())?;
                    env.set("P0", q.value);
                    status = worse(status, q.status);
                }
                let residual = spec.residual.eval(&env).map_err(|e| format!("residual: {e}"))?;
                Ok(PointRecord::compare(b.clone(), residual, 0.0, &tol, status))
            })();
            details.push(record.unwrap_or_else(|e| PointRecord::failed(b.clone(), e)));
        }
        CheckReport::from_records(&family.id, CheckKind::OdeResidual, tol, details, notes)
    }

    /// Compares the family's quadrature with Frullani's formula
    /// `(f(0) - f(inf)) ln(q/p)` for integrands `(f(p x) - f(q x))/x`, and
    /// runs an independent exp-sinh evaluation of the same difference.
    pub fn check_frullani(
        &self,
        family: &IntegralFamily,
        spec: &FrullaniSpec,
        grid: &[Bindings],
        tol: &CheckTolerance,
    ) -> CheckReport {
        let details = grid
            .iter()
            .map(|b| {
                (|| -> Result<PointRecord, String> {
                    let p = spec.p.eval(b).map_err(|e| e.to_string())?;
                    let q = spec.q.eval(b).map_err(|e| e.to_string())?;
                    let quad = self.quadrature(family, b).map_err(|e| e.to_string())?;
                    let formula = specfun::frullani(spec.f0, spec.finf, p, q).map_err(|e| e.to_string())?;
                    let f = spec.f.clone();
                    let direct = specfun::frullani_check(
                        &Integrand::new(move |x| f.eval(&Bindings::new().with("x", x))),
                        spec.f0,
                        spec.finf,
                        p,
                        q,
                        &self.tol,
                    )
                    .map_err(|e| e.to_string())?;
                    let rec = PointRecord::compare(
                        b.clone(),
                        quad.value,
                        formula,
                        tol,
                        worse(quad.status, direct.quadrature.status),
                    );
                    let direct_ok = direct.deviation() <= tol.allowed(formula);
                    let rec = rec
                        .with_note(format!("direct (f(px)-f(qx))/x quadrature deviates by {:.3e}", direct.deviation()));
                    Ok(PointRecord { pass: rec.pass && direct_ok, ..rec })
                })()
                .unwrap_or_else(|e| PointRecord::failed(b.clone(), e))
            })
            .collect();
        CheckReport::from_records(&family.id, CheckKind::Frullani, *tol, details, Vec::new())
    }

    /// For `|a| < 1`: the truncated series `-2 sum a^k cos(kx)/k` integrates
    /// to zero term by term over `[0, pi]`, and quadrature of
    /// `ln(1 - 2a cos x + a^2)` is zero within `tol`. For `|a| > 1` the
    /// quadrature is compared with `pi ln a^2`, and the factoring
    /// `ln a^2 + ln(1 - 2 cos x/a + 1/a^2)` is checked as a second route.
    pub fn check_series_oracle_236(&self, alpha_grid: &[f64], terms: usize, tol: &CheckTolerance) -> CheckReport {
        let mut details = Vec::new();
        for &a in alpha_grid {
            let b = Bindings::new().with("a", a).with("b", 1.0);
            let log_poly = move |c: f64| Integrand::from_fn(move |x: f64| (1.0 - 2.0 * c * x.cos() + c * c).ln());
            let quad = |f: &Integrand| integrate_auto(f, 0.0, PI, &Default::default(), &self.tol);
            if a.abs() < 1.0 {
                // int_0^pi cos(kx) dx = sin(k pi)/k
                let series: f64 = (1..=terms)
                    .map(|k| {
                        let k = k as f64;
                        -2.0 * a.powf(k) / k * (k * PI).sin() / k
                    })
                    .sum();
                details.push(
                    PointRecord::compare(b.clone(), series, 0.0, tol, Status::Converged)
                        .with_note(format!("{terms}-term series integrated term by term")),
                );
                let q = quad(&log_poly(a));
                details.push(PointRecord::compare(b, q.value, 0.0, tol, q.status).with_note("quadrature".into()));
            } else if a.abs() > 1.0 {
                let target = PI * (a * a).ln();
                let q = quad(&log_poly(a));
                details.push(
                    PointRecord::compare(b.clone(), q.value, target, tol, q.status).with_note("quadrature".into()),
                );
                let reduced = quad(&log_poly(1.0 / a));
                let factored = PI * (a * a).ln() + reduced.value;
                details.push(
                    PointRecord::compare(b, factored, target, tol, reduced.status)
                        .with_note("factored through 1/a".into()),
                );
            } else {
                details.push(PointRecord::failed(b, "|a| = 1 is the logarithmic singular case; not gridded"));
            }
        }
        CheckReport::from_records("eq_2.36", CheckKind::SeriesOracle, *tol, details, Vec::new())
    }

    pub fn check_identity(&self, catalog: &Catalog, identity: &Identity) -> CheckReport {
        let ctx = IdentityContext { verifier: self, catalog };
        let mut details = Vec::new();
        for b in &identity.grid {
            for (lhs, rhs) in &identity.relations {
                let rec = match (lhs(&ctx, b), rhs(&ctx, b)) {
                    (Ok(l), Ok(r)) => PointRecord::compare(b.clone(), l, r, &identity.tolerance, Status::Converged),
                    (Err(e), _) | (_, Err(e)) => PointRecord::failed(b.clone(), e),
                };
                details.push(rec);
            }
        }
        CheckReport::from_records(
            identity.owner,
            CheckKind::ReductionIdentity,
            identity.tolerance,
            details,
            vec![identity.description.to_string()],
        )
    }
}

/// `f(psi) psi' - f(phi) phi'` for the limits `phi`, `psi` of `family`,
/// with the bound derivatives taken symbolically. A limit that does not move
/// contributes nothing, even where the integrand is singular.
pub fn leibniz_boundary_term(family: &IntegralFamily, param: &str, b: &Bindings) -> Result<f64, String> {
    let inst = family.instantiate_unchecked(b).map_err(|e| e.to_string())?;
    let mut total = 0.0;
    for (limit, at, sign) in [(&family.upper, inst.upper, 1.0), (&family.lower, inst.lower, -1.0)] {
        let Some(e) = limit.expr() else { continue };
        let rate = e.diff(param).simplify().eval(b).map_err(|e| format!("bound derivative: {e}"))?;
        if rate == 0.0 {
            continue;
        }
        let f = inst.integrand.eval(at).map_err(|e| format!("integrand at bound {at}: {e}"))?;
        if !f.is_finite() {
            return Err(format!("integrand is singular at moving bound {at}; boundary term inapplicable"));
        }
        total += sign * f * rate;
    }
    Ok(total)
}

/// Integrand of a family's partial derivative in `param`. Removable
/// singularities move with it: a patch at a fixed point gets the derivative
/// of its value; a patch at a moving point gets the symmetric average of the
/// derivative integrand just beside it.
pub fn partial_instance(family: &IntegralFamily, param: &str, b: &Bindings) -> Result<Instance, CatalogError> {
    let d = family.integrand.diff(param).simplify();
    let raw = family.compile_integrand(&d, b)?;
    let mut integrand = raw.clone();
    let eval_err = |field: &'static str| move |source| CatalogError::Eval { family: family.id.clone(), field, source };
    for p in &family.patches {
        let x0 = p.point.eval(b).map_err(eval_err("patch point"))?;
        let value = if p.point.contains_symbol(param) {
            let r = p.delta.max(1e-4) * x0.abs().max(1.0);
            let side = |x| raw.eval(x).map_err(eval_err("patch value"));
            0.5 * (side(x0 - r)? + side(x0 + r)?)
        } else {
            p.value.diff(param).eval(b).map_err(eval_err("patch value"))?
        };
        integrand = integrand.with_patch(Patch::new(x0, value, p.delta));
    }
    let (lower, upper) = family.bounds_at(b)?;
    Ok(Instance { integrand, lower, upper, hints: family.hints_at(b)? })
}

/// `(f(p x) - f(q x))/x` structure of a family: `f` is an expression in `x`,
/// `p` and `q` expressions in the family parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct FrullaniSpec {
    pub f: Expr,
    pub f0: f64,
    pub finf: f64,
    pub p: Expr,
    pub q: Expr,
}

/// Families with a recognised Frullani structure.
pub fn frullani_spec_for(id: &str) -> Option<FrullaniSpec> {
    let parse = |s: &str| crate::expr::parse(s).expect("builtin Frullani expression");
    match id {
        // (exp(-(a+1)t) - exp(-t))/t
        "eq_2.5" => Some(FrullaniSpec { f: parse("exp(-x)"), f0: 1.0, finf: 0.0, p: parse("a + 1"), q: parse("1") }),
        _ => None,
    }
}

/// Which families a suite covers.
#[derive(Clone, Debug, PartialEq)]
pub enum Selection {
    All,
    Ids(Vec<String>),
}

/// Checks that apply to `family`.
pub fn applicable_checks(family: &IntegralFamily) -> Vec<CheckKind> {
    let mut kinds = vec![CheckKind::ClosedForm];
    if !family.params.is_empty() {
        kinds.push(if family.has_moving_bounds() { CheckKind::Leibniz } else { CheckKind::Derivative });
    }
    if ode_spec_for(&family.id).is_some() {
        kinds.push(CheckKind::OdeResidual);
    }
    if frullani_spec_for(&family.id).is_some() {
        kinds.push(CheckKind::Frullani);
    }
    if family.id == "eq_2.36" {
        kinds.push(CheckKind::SeriesOracle);
    }
    if builtin_identities().iter().any(|i| i.owner == family.id) {
        kinds.push(CheckKind::ReductionIdentity);
    }
    kinds
}

/// Default grid for the series oracle: both branches, away from `|a| = 1`.
pub const SERIES_ORACLE_GRID: [f64; 8] = [-3.0, -1.5, -0.9, -0.5, 0.5, 0.9, 1.5, 3.0];

/// Runs one check kind on `family` with its default grid and tolerance.
pub fn run_check(verifier: &Verifier, catalog: &Catalog, family: &IntegralFamily, kind: CheckKind) -> Vec<CheckReport> {
    let grid = family.grid_points();
    let designated = family.params.first().map(|p| p.name.as_str());
    match kind {
        CheckKind::ClosedForm => vec![verifier.check_closed_form(family, &grid, &CheckTolerance::closed_form(family))],
        CheckKind::Derivative => designated
            .map(|p| verifier.check_derivative(family, p, &grid, &CheckTolerance::derivative()))
            .into_iter()
            .collect(),
        CheckKind::Leibniz => designated
            .map(|p| verifier.check_leibniz(family, p, &grid, &CheckTolerance::derivative()))
            .into_iter()
            .collect(),
        CheckKind::OdeResidual => ode_spec_for(&family.id)
            .map(|spec| {
                let partner = spec.partner.as_deref().and_then(|id| catalog.get(id).ok());
                verifier.check_ode_residual(family, &spec, partner, &grid)
            })
            .into_iter()
            .collect(),
        CheckKind::Frullani => frullani_spec_for(&family.id)
            .map(|spec| verifier.check_frullani(family, &spec, &grid, &CheckTolerance::closed_form(family)))
            .into_iter()
            .collect(),
        CheckKind::SeriesOracle if family.id == "eq_2.36" => {
            vec![verifier.check_series_oracle_236(&SERIES_ORACLE_GRID, 200, &CheckTolerance::new(1e-7, 1e-7))]
        }
        CheckKind::SeriesOracle => Vec::new(),
        CheckKind::ReductionIdentity => builtin_identities()
            .iter()
            .filter(|i| i.owner == family.id)
            .map(|i| verifier.check_identity(catalog, i))
            .collect(),
    }
}

/// Runs the selected checks on the selected families, at most `jobs` at a
/// time (0 = rayon default). Reports come back sorted by family id then
/// check kind.
pub fn run_suite(
    catalog: &Catalog,
    selection: &Selection,
    checks: &[CheckKind],
    tol: &ToleranceConfig,
    jobs: usize,
) -> Result<Vec<CheckReport>, CatalogError> {
    let families: Vec<&IntegralFamily> = match selection {
        Selection::All => catalog.families().iter().collect(),
        Selection::Ids(ids) => ids.iter().map(|id| catalog.get(id)).collect::<Result<_, _>>()?,
    };
    let tasks: Vec<(&IntegralFamily, CheckKind)> = families
        .into_iter()
        .flat_map(|f| applicable_checks(f).into_iter().filter(|k| checks.contains(k)).map(move |k| (f, k)))
        .collect();
    let verifier = Verifier::new(*tol);
    let work = || -> Vec<CheckReport> {
        tasks.par_iter().flat_map_iter(|(f, k)| run_check(&verifier, catalog, f, *k)).collect()
    };
    let mut reports = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    };
    reports.sort_by(|a, b| a.family_id.cmp(&b.family_id).then(a.check_kind.cmp(&b.check_kind)));
    Ok(reports)
}
