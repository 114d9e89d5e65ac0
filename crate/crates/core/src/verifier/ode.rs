use std::collections::BTreeSet;

use crate::expr::{parse, Expr};

/// Symbols a residual may use besides the family parameters: the function
/// value and its first two derivatives in the designated parameter, and the
/// partner family's value for coupled systems.
pub const ODE_SYMBOLS: [&str; 4] = ["F0", "F1", "F2", "P0"];

#[derive(Clone, Debug, PartialEq)]
pub struct OdeSpec {
    /// Parameter the derivatives are taken in.
    pub param: String,
    pub order: u8,
    /// Should vanish; expression over `F0`, `F1`, `F2`, `P0` and parameters.
    pub residual: Expr,
    /// Absolute bound on the residual.
    pub tolerance: f64,
    /// Family whose value at the same point binds `P0`.
    pub partner: Option<String>,
}

impl OdeSpec {
    pub fn new(
        param: &str,
        order: u8,
        residual: &str,
        tolerance: f64,
        partner: Option<&str>,
    ) -> Result<OdeSpec, String> {
        let residual = parse(residual).map_err(|e| e.to_string())?;
        let spec = OdeSpec { param: param.into(), order, residual, tolerance, partner: partner.map(Into::into) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.order == 1 || self.order == 2) {
            return Err(format!("order must be 1 or 2, got {}", self.order));
        }
        let syms: BTreeSet<String> = self.residual.free_symbols();
        if self.order == 1 && syms.contains("F2") {
            return Err("first-order residual references F2".into());
        }
        if syms.contains("P0") && self.partner.is_none() {
            return Err("residual references P0 without a partner family".into());
        }
        Ok(())
    }
}

/// The differential equations satisfied by the parametric integrals of the
/// ODE-based evaluations, keyed by family id.
pub fn builtin_ode_specs() -> Vec<(&'static str, OdeSpec)> {
    let spec = |p, o, r| OdeSpec::new(p, o, r, 1e-4, None).expect("builtin ODE residual");
    let coupled = |r, partner| OdeSpec::new("a", 2, r, 1e-4, Some(partner)).expect("builtin ODE residual");
    vec![
        ("eq_3.2", spec("l", 2, "F2 - a^2*F0")),
        ("laplace_F", spec("s", 2, "F2 + a^2*F0 - 1/s")),
        ("gauss_cos", spec("x", 1, "F1 + 2*x*F0")),
        ("hecke", spec("a", 1, "F1 + F0/sqrt(a)")),
        ("eq_3.7_U", coupled("F2 - 4*P0", "eq_3.7_V")),
        ("eq_3.7_V", coupled("F2 + 4*P0", "eq_3.7_U")),
    ]
}

pub fn ode_spec_for(id: &str) -> Option<OdeSpec> {
    builtin_ode_specs().into_iter().find(|(i, _)| *i == id).map(|(_, s)| s)
}
