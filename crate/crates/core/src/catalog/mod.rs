//! Inventory of parametric integral families with their closed forms.
//!
//! Builtin families live in an embedded text file written in the same block
//! format accepted by [`load_user_families`], so the loader is exercised by
//! every builtin entry.

mod format;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use crate::expr::{Bindings, EvalError, Expr};
use crate::quadrature::{Hints, Integrand, Patch, TrigKind};
use crate::specfun::{self, SpecfunError};

pub use format::{parse_families, LoadError};

/// Symbols bound to `si(arg)` and `ci(arg)` inside a special-function template.
pub const SI_SYMBOL: &str = "SI";
pub const CI_SYMBOL: &str = "CI";
/// Symbol bound to Catalan's constant inside a template.
pub const CATALAN_SYMBOL: &str = "G";

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    Unbounded,
    Open(f64),
    Closed(f64),
}

/// A real interval, possibly unbounded or half-open.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamRange {
    pub lower: Bound,
    pub upper: Bound,
}

impl ParamRange {
    pub const REAL_LINE: ParamRange = ParamRange { lower: Bound::Unbounded, upper: Bound::Unbounded };

    pub fn contains(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        let above = match self.lower {
            Bound::Unbounded => true,
            Bound::Open(a) => x > a,
            Bound::Closed(a) => x >= a,
        };
        let below = match self.upper {
            Bound::Unbounded => true,
            Bound::Open(b) => x < b,
            Bound::Closed(b) => x <= b,
        };
        above && below
    }

    /// True when `[x - margin, x + margin]` lies inside the range.
    pub fn contains_with_margin(&self, x: f64, margin: f64) -> bool {
        self.contains(x - margin) && self.contains(x + margin)
    }
}

impl fmt::Display for ParamRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lower {
            Bound::Unbounded => write!(f, "(-inf")?,
            Bound::Open(a) => write!(f, "({a}")?,
            Bound::Closed(a) => write!(f, "[{a}")?,
        }
        match self.upper {
            Bound::Unbounded => write!(f, ", inf)"),
            Bound::Open(b) => write!(f, ", {b})"),
            Bound::Closed(b) => write!(f, ", {b}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamSpec {
    /// ASCII name used in expressions and on the command line.
    pub name: String,
    /// Conventional mathematical symbol, e.g. `λ` for `l`.
    pub display: Option<String>,
    pub range: ParamRange,
    pub grid: Vec<f64>,
}

impl ParamSpec {
    pub fn display_name(&self) -> &str {
        self.display.as_deref().unwrap_or(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Limit {
    Finite(Expr),
    PosInf,
    NegInf,
}

impl Limit {
    pub fn eval(&self, b: &Bindings) -> Result<f64, EvalError> {
        match self {
            Limit::Finite(e) => e.eval(b),
            Limit::PosInf => Ok(f64::INFINITY),
            Limit::NegInf => Ok(f64::NEG_INFINITY),
        }
    }

    pub fn expr(&self) -> Option<&Expr> {
        match self {
            Limit::Finite(e) => Some(e),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Limit::Finite(_))
    }
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Finite(e) => write!(f, "{e}"),
            Limit::PosInf => write!(f, "inf"),
            Limit::NegInf => write!(f, "-inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    fn holds(self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

/// `lhs op rhs` over the parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    pub lhs: Expr,
    pub op: CmpOp,
    pub rhs: Expr,
}

impl Condition {
    pub fn holds(&self, b: &Bindings) -> Result<bool, EvalError> {
        Ok(self.op.holds(self.lhs.eval(b)?, self.rhs.eval(b)?))
    }

    fn symbols(&self) -> BTreeSet<String> {
        let mut s = self.lhs.free_symbols();
        s.extend(self.rhs.free_symbols());
        s
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op.symbol(), self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClosedForm {
    Expr(Expr),
    /// `template` may use `SI` and `CI`, bound to `si(argument)`, `ci(argument)`.
    SiCi {
        argument: Expr,
        template: Expr,
    },
    /// `template` may use `G`, bound to Catalan's constant.
    Catalan {
        template: Expr,
    },
    /// First branch whose condition holds wins; boundaries go to the branch
    /// listed first among those whose closure contains them.
    Piecewise(Vec<(Condition, Expr)>),
}

impl ClosedForm {
    fn param_symbols(&self) -> BTreeSet<String> {
        match self {
            ClosedForm::Expr(e) => e.free_symbols(),
            ClosedForm::SiCi { argument, template } => {
                let mut s = argument.free_symbols();
                s.extend(template.free_symbols());
                s.remove(SI_SYMBOL);
                s.remove(CI_SYMBOL);
                s
            }
            ClosedForm::Catalan { template } => {
                let mut s = template.free_symbols();
                s.remove(CATALAN_SYMBOL);
                s
            }
            ClosedForm::Piecewise(branches) => {
                let mut s = BTreeSet::new();
                for (c, e) in branches {
                    s.extend(c.symbols());
                    s.extend(e.free_symbols());
                }
                s
            }
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedForm::Expr(e) => write!(f, "{e}"),
            ClosedForm::SiCi { argument, template } => write!(f, "sici({argument}): {template}"),
            ClosedForm::Catalan { template } => write!(f, "catalan: {template}"),
            ClosedForm::Piecewise(branches) => {
                write!(f, "piecewise: ")?;
                for (i, (c, e)) in branches.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{c} => {e}")?;
                }
                Ok(())
            }
        }
    }
}

/// A removable singularity at `point` with limit `value`; both may depend on
/// the parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchSpec {
    pub point: Expr,
    pub value: Expr,
    pub delta: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HintSpec {
    pub singular_lower: bool,
    pub singular_upper: bool,
    pub oscillatory: Option<(Expr, TrigKind)>,
    pub decay: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralFamily {
    pub id: String,
    pub aliases: Vec<String>,
    pub integrand: Expr,
    pub var: String,
    pub lower: Limit,
    pub upper: Limit,
    pub params: Vec<ParamSpec>,
    /// Cross-parameter restrictions such as `a > b`.
    pub constraints: Vec<Condition>,
    pub closed_form: ClosedForm,
    pub patches: Vec<PatchSpec>,
    pub hints: HintSpec,
    pub paper_ref: String,
    pub notes: String,
}

/// A family with every parameter bound: ready for quadrature.
#[derive(Clone, Debug)]
pub struct Instance {
    pub integrand: Integrand,
    pub lower: f64,
    pub upper: f64,
    pub hints: Hints,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("family `{family}`: missing binding for parameter `{param}`")]
    MissingParameter { family: String, param: String },
    #[error("family `{family}` has no parameter `{param}`")]
    UnknownParameter { family: String, param: String },
    #[error("family `{family}`: {param} = {value} is outside {range}")]
    OutOfRange { family: String, param: String, value: f64, range: String },
    #[error("family `{family}`: constraint `{constraint}` violated")]
    ConstraintViolated { family: String, constraint: String },
    #[error("family `{family}`: cannot evaluate {field}: {source}")]
    Eval { family: String, field: &'static str, source: EvalError },
    #[error("family `{family}`: {source}")]
    Special { family: String, source: SpecfunError },
    #[error("family `{family}`: no piecewise branch applies")]
    NoBranch { family: String },
    #[error("duplicate family id `{0}`")]
    DuplicateId(String),
}

impl IntegralFamily {
    pub fn param_names(&self) -> Vec<&str> {
        self.params.iter().map(|p| p.name.as_str()).collect()
    }

    pub fn param(&self, name: &str) -> Option<&ParamSpec> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn matches(&self, id: &str) -> bool {
        self.id == id || self.aliases.iter().any(|a| a == id)
    }

    pub fn has_infinite_domain(&self) -> bool {
        !self.lower.is_finite() || !self.upper.is_finite()
    }

    pub fn is_oscillatory(&self) -> bool {
        self.hints.oscillatory.is_some()
    }

    /// Bound parameters depend on the parameters (moving limits).
    pub fn has_moving_bounds(&self) -> bool {
        [&self.lower, &self.upper].iter().filter_map(|l| l.expr()).any(|e| !e.free_symbols().is_empty())
    }

    fn eval_err(&self, field: &'static str) -> impl Fn(EvalError) -> CatalogError + '_ {
        move |source| CatalogError::Eval { family: self.id.clone(), field, source }
    }

    /// Checks that `b` binds exactly the declared parameters, inside their
    /// ranges, and satisfies the cross-parameter constraints.
    pub fn check_bindings(&self, b: &Bindings) -> Result<(), CatalogError> {
        for (name, _) in b.iter() {
            if self.param(name).is_none() {
                return Err(CatalogError::UnknownParameter { family: self.id.clone(), param: name.into() });
            }
        }
        for p in &self.params {
            let v = b
                .get(&p.name)
                .ok_or_else(|| CatalogError::MissingParameter { family: self.id.clone(), param: p.name.clone() })?;
            if !p.range.contains(v) {
                return Err(CatalogError::OutOfRange {
                    family: self.id.clone(),
                    param: p.name.clone(),
                    value: v,
                    range: p.range.to_string(),
                });
            }
        }
        for c in &self.constraints {
            if !c.holds(b).map_err(self.eval_err("constraint"))? {
                return Err(CatalogError::ConstraintViolated { family: self.id.clone(), constraint: c.to_string() });
            }
        }
        Ok(())
    }

    /// Evaluated integration limits at `b` (unchecked).
    pub fn bounds_at(&self, b: &Bindings) -> Result<(f64, f64), CatalogError> {
        Ok((
            self.lower.eval(b).map_err(self.eval_err("lower bound"))?,
            self.upper.eval(b).map_err(self.eval_err("upper bound"))?,
        ))
    }

    /// Concrete patches for an integrand expression: point and value are
    /// evaluated at `b`.
    pub fn patches_at(&self, b: &Bindings) -> Result<Vec<Patch>, CatalogError> {
        self.patches
            .iter()
            .map(|p| {
                Ok(Patch::new(
                    p.point.eval(b).map_err(self.eval_err("patch point"))?,
                    p.value.eval(b).map_err(self.eval_err("patch value"))?,
                    p.delta,
                ))
            })
            .collect()
    }

    pub fn hints_at(&self, b: &Bindings) -> Result<Hints, CatalogError> {
        let oscillatory = match &self.hints.oscillatory {
            Some((omega, kind)) => Some((omega.eval(b).map_err(self.eval_err("oscillation frequency"))?, *kind)),
            None => None,
        };
        Ok(Hints {
            singular_lower: self.hints.singular_lower,
            singular_upper: self.hints.singular_upper,
            oscillatory,
            decay: self.hints.decay,
        })
    }

    /// Compiles `expr` (an integrand over `var` and the parameters) with the
    /// parameters fixed at `b`.
    pub fn compile_integrand(&self, expr: &Expr, b: &Bindings) -> Result<Integrand, CatalogError> {
        let bound = expr.substitute(b).simplify();
        let compiled = bound.compile(&[self.var.as_str()]).map_err(self.eval_err("integrand"))?;
        Ok(Integrand::from_compiled(compiled))
    }

    pub fn instantiate(&self, b: &Bindings) -> Result<Instance, CatalogError> {
        self.check_bindings(b)?;
        self.instantiate_unchecked(b)
    }

    /// Like [`instantiate`](Self::instantiate) without range checks; finite
    /// difference stencils may step slightly past a closed range edge.
    pub fn instantiate_unchecked(&self, b: &Bindings) -> Result<Instance, CatalogError> {
        let mut integrand = self.compile_integrand(&self.integrand, b)?;
        for p in self.patches_at(b)? {
            integrand = integrand.with_patch(p);
        }
        let (lower, upper) = self.bounds_at(b)?;
        Ok(Instance { integrand, lower, upper, hints: self.hints_at(b)? })
    }

    pub fn closed_form_value(&self, b: &Bindings) -> Result<f64, CatalogError> {
        self.check_bindings(b)?;
        self.closed_form_unchecked(b)
    }

    pub fn closed_form_unchecked(&self, b: &Bindings) -> Result<f64, CatalogError> {
        let err = self.eval_err("closed form");
        match &self.closed_form {
            ClosedForm::Expr(e) => e.eval(b).map_err(err),
            ClosedForm::SiCi { argument, template } => {
                let x = argument.eval(b).map_err(&err)?;
                let special = |source| CatalogError::Special { family: self.id.clone(), source };
                let mut env = b.clone();
                env.set(SI_SYMBOL, specfun::si(x).map_err(special)?);
                env.set(CI_SYMBOL, specfun::ci(x).map_err(special)?);
                template.eval(&env).map_err(err)
            }
            ClosedForm::Catalan { template } => {
                let mut env = b.clone();
                env.set(CATALAN_SYMBOL, specfun::catalan());
                template.eval(&env).map_err(err)
            }
            ClosedForm::Piecewise(branches) => {
                for (cond, value) in branches {
                    if cond.holds(b).map_err(&err)? {
                        return value.eval(b).map_err(err);
                    }
                }
                Err(CatalogError::NoBranch { family: self.id.clone() })
            }
        }
    }

    /// Cartesian product of the parameter grids, in declaration order, with
    /// points violating a constraint dropped.
    pub fn grid_points(&self) -> Vec<Bindings> {
        let mut points = vec![Bindings::new()];
        for p in &self.params {
            points = points.into_iter().flat_map(|b| p.grid.iter().map(move |&v| b.clone().with(&p.name, v))).collect();
        }
        points.into_iter().filter(|b| self.constraints.iter().all(|c| c.holds(b).unwrap_or(false))).collect()
    }

    /// Enforces the structural invariants: symbol sets, grids inside ranges,
    /// and instantiability at every grid point.
    pub fn validate(&self) -> Result<(), (String, String)> {
        let fail = |field: &str, msg: String| Err((field.to_string(), msg));
        let params: BTreeSet<String> = self.params.iter().map(|p| p.name.clone()).collect();
        if params.len() != self.params.len() {
            return fail("param", "parameter declared twice".into());
        }
        if params.contains(&self.var) {
            return fail("var", format!("`{}` is both variable and parameter", self.var));
        }
        let undeclared =
            |syms: BTreeSet<String>, allowed: &BTreeSet<String>| syms.into_iter().find(|s| !allowed.contains(s));
        let mut with_var = params.clone();
        with_var.insert(self.var.clone());
        if let Some(s) = undeclared(self.integrand.free_symbols(), &with_var) {
            return fail("integrand", format!("undeclared symbol `{s}`"));
        }
        if let Some(s) = undeclared(self.closed_form.param_symbols(), &params) {
            return fail("closed_form", format!("undeclared symbol `{s}`"));
        }
        for (field, limit) in [("lower", &self.lower), ("upper", &self.upper)] {
            if let Some(s) = limit.expr().and_then(|e| undeclared(e.free_symbols(), &params)) {
                return fail(field, format!("undeclared symbol `{s}`"));
            }
        }
        for p in &self.patches {
            let mut syms = p.point.free_symbols();
            syms.extend(p.value.free_symbols());
            if let Some(s) = undeclared(syms, &params) {
                return fail("patch", format!("undeclared symbol `{s}`"));
            }
            if !(p.delta > 0.0 && p.delta.is_finite()) {
                return fail("patch", format!("radius {} must be positive", p.delta));
            }
        }
        if let Some((omega, _)) = &self.hints.oscillatory {
            if let Some(s) = undeclared(omega.free_symbols(), &params) {
                return fail("hint", format!("undeclared symbol `{s}`"));
            }
        }
        for c in &self.constraints {
            if let Some(s) = undeclared(c.symbols(), &params) {
                return fail("constraint", format!("undeclared symbol `{s}`"));
            }
        }
        for p in &self.params {
            if p.grid.is_empty() {
                return fail("param", format!("`{}` has an empty grid", p.name));
            }
            if let Some(v) = p.grid.iter().find(|&&v| !p.range.contains(v)) {
                return fail("param", format!("grid value {v} of `{}` is outside {}", p.name, p.range));
            }
        }
        let points = self.grid_points();
        if points.is_empty() {
            return fail("constraint", "no grid point satisfies the constraints".into());
        }
        for b in &points {
            if let Err(e) = self.instantiate(b).and_then(|_| self.closed_form_value(b)) {
                return fail("grid", format!("at {b}: {e}"));
            }
        }
        Ok(())
    }
}

/// An immutable set of families with unique ids and aliases.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    families: Vec<IntegralFamily>,
}

impl Catalog {
    pub fn new(families: Vec<IntegralFamily>) -> Result<Catalog, CatalogError> {
        let mut c = Catalog::default();
        c.extend(families)?;
        Ok(c)
    }

    pub fn builtin() -> Catalog {
        Catalog { families: builtin_families().to_vec() }
    }

    /// Builtins plus the families in `path`.
    pub fn with_user_file(path: &Path) -> Result<Catalog, LoadError> {
        let mut c = Catalog::builtin();
        let user = load_user_families(path)?;
        c.extend(user).map_err(|e| LoadError::Invariant {
            family: match &e {
                CatalogError::DuplicateId(id) => id.clone(),
                _ => String::new(),
            },
            field: "id".into(),
            message: e.to_string(),
        })?;
        Ok(c)
    }

    pub fn extend(&mut self, families: Vec<IntegralFamily>) -> Result<(), CatalogError> {
        for f in families {
            for name in std::iter::once(&f.id).chain(&f.aliases) {
                if self.families.iter().any(|g| g.matches(name)) {
                    return Err(CatalogError::DuplicateId(name.clone()));
                }
            }
            self.families.push(f);
        }
        Ok(())
    }

    pub fn families(&self) -> &[IntegralFamily] {
        &self.families
    }

    pub fn len(&self) -> usize {
        self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.families.is_empty()
    }

    /// Looks up a family by id or alias.
    pub fn get(&self, id: &str) -> Result<&IntegralFamily, CatalogError> {
        self.families.iter().find(|f| f.matches(id)).ok_or_else(|| CatalogError::UnknownFamily(id.to_string()))
    }

    pub fn instantiate(&self, id: &str, b: &Bindings) -> Result<Instance, CatalogError> {
        self.get(id)?.instantiate(b)
    }

    pub fn closed_form_value(&self, id: &str, b: &Bindings) -> Result<f64, CatalogError> {
        self.get(id)?.closed_form_value(b)
    }
}

const BUILTIN_SOURCE: &str = include_str!("builtin.fam");

/// The builtin families, parsed once.
pub fn builtin_families() -> &'static [IntegralFamily] {
    static CELL: OnceLock<Vec<IntegralFamily>> = OnceLock::new();
    CELL.get_or_init(|| parse_families(BUILTIN_SOURCE).expect("builtin catalog is well formed"))
}

/// Reads a family file. An empty file yields an empty list.
pub fn load_user_families(path: &Path) -> Result<Vec<IntegralFamily>, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LoadError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_families(&text)
}

#[cfg(test)]
mod tests;
