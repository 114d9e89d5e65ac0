//! Plain-text family files.
//!
//! One family per block, blocks separated by blank lines, `#` starts a
//! comment. Recognised lines:
//!
//! ```text
//! id=NAME                      alias=NAME (repeatable)
//! integrand=EXPR               var=SYMBOL
//! lower=EXPR|-inf|inf          upper=EXPR|-inf|inf
//! param NAME in (a,b) grid v1,v2,... [as SYMBOL]    (brackets may be [ ] )
//! constraint=EXPR OP EXPR      (OP one of < <= > >=)
//! closed_form=EXPR
//! closed_form=piecewise: COND => EXPR; COND => EXPR
//! closed_form=sici(EXPR): EXPR using SI and CI
//! closed_form=catalan: EXPR using G
//! patch X0 -> V0 [delta D]
//! hint=singular_lower|singular_upper|decay|oscillatory:sin:EXPR|oscillatory:cos:EXPR
//! ref=TEXT                     notes=TEXT (repeatable, joined)
//! ```

use crate::expr::{parse, Bindings, Expr};
use crate::quadrature::TrigKind;

use super::{Bound, ClosedForm, CmpOp, Condition, HintSpec, IntegralFamily, Limit, ParamRange, ParamSpec, PatchSpec};

const DEFAULT_PATCH_DELTA: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("family `{family}`, field `{field}`: {message}")]
    Invariant { family: String, field: String, message: String },
}

type LineResult<T> = Result<T, String>;

pub fn parse_families(text: &str) -> Result<Vec<IntegralFamily>, LoadError> {
    let mut families = Vec::new();
    let mut block: Vec<(usize, &str)> = Vec::new();
    let lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    for (no, raw) in lines.chain(std::iter::once((0, ""))) {
        let is_comment = raw.trim_start().starts_with('#');
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            if !is_comment && !block.is_empty() {
                families.push(parse_block(&block)?);
                block.clear();
            }
            continue;
        }
        block.push((no, line));
    }
    Ok(families)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

#[derive(Default)]
struct Draft {
    id: Option<String>,
    aliases: Vec<String>,
    integrand: Option<Expr>,
    var: Option<String>,
    lower: Option<Limit>,
    upper: Option<Limit>,
    params: Vec<ParamSpec>,
    constraints: Vec<Condition>,
    closed_form: Option<ClosedForm>,
    patches: Vec<PatchSpec>,
    hints: HintSpec,
    paper_ref: String,
    notes: Vec<String>,
}

fn parse_block(lines: &[(usize, &str)]) -> Result<IntegralFamily, LoadError> {
    let mut d = Draft::default();
    for &(no, line) in lines {
        parse_line(&mut d, line).map_err(|message| LoadError::Syntax { line: no, message })?;
    }
    let first = lines[0].0;
    let missing = |key: &str| LoadError::Syntax { line: first, message: format!("block is missing `{key}=`") };
    let id = d.id.ok_or_else(|| missing("id"))?;
    let family = IntegralFamily {
        integrand: d.integrand.ok_or_else(|| missing("integrand"))?,
        var: d.var.ok_or_else(|| missing("var"))?,
        lower: d.lower.ok_or_else(|| missing("lower"))?,
        upper: d.upper.ok_or_else(|| missing("upper"))?,
        closed_form: d.closed_form.ok_or_else(|| missing("closed_form"))?,
        id,
        aliases: d.aliases,
        params: d.params,
        constraints: d.constraints,
        patches: d.patches,
        hints: d.hints,
        paper_ref: d.paper_ref,
        notes: d.notes.join(" "),
    };
    family.validate().map_err(|(field, message)| LoadError::Invariant { family: family.id.clone(), field, message })?;
    Ok(family)
}

fn parse_line(d: &mut Draft, line: &str) -> LineResult<()> {
    if let Some(rest) = line.strip_prefix("param ") {
        d.params.push(parse_param(rest)?);
        return Ok(());
    }
    if let Some(rest) = line.strip_prefix("patch ") {
        d.patches.push(parse_patch(rest)?);
        return Ok(());
    }
    let (key, value) = line.split_once('=').ok_or_else(|| format!("expected `key=value`, got `{line}`"))?;
    let key = key.trim();
    let value = value.trim();
    let set_once = |slot: &mut Option<_>, v| {
        if slot.is_some() {
            return Err(format!("`{key}` given twice"));
        }
        *slot = Some(v);
        Ok(())
    };
    match key {
        "id" => set_once(&mut d.id, value.to_string())?,
        "alias" => d.aliases.push(value.to_string()),
        "var" => {
            if !is_identifier(value) {
                return Err(format!("`{value}` is not a valid variable name"));
            }
            set_once(&mut d.var, value.to_string())?
        }
        "integrand" => {
            let e = expr(value, key)?;
            if d.integrand.is_some() {
                return Err("`integrand` given twice".into());
            }
            d.integrand = Some(e);
        }
        "lower" | "upper" => {
            let limit = parse_limit(value)?;
            let slot = if key == "lower" { &mut d.lower } else { &mut d.upper };
            if slot.is_some() {
                return Err(format!("`{key}` given twice"));
            }
            *slot = Some(limit);
        }
        "closed_form" => {
            let cf = parse_closed_form(value)?;
            if d.closed_form.is_some() {
                return Err("`closed_form` given twice".into());
            }
            d.closed_form = Some(cf);
        }
        "constraint" => d.constraints.push(parse_condition(value)?),
        "hint" => parse_hint(&mut d.hints, value)?,
        "ref" => d.paper_ref = value.to_string(),
        "notes" => d.notes.push(value.to_string()),
        _ => return Err(format!("unknown key `{key}`")),
    }
    Ok(())
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn expr(text: &str, what: &str) -> LineResult<Expr> {
    parse(text.trim()).map_err(|e| format!("{what}: {e}"))
}

fn constant(text: &str, what: &str) -> LineResult<f64> {
    let t = text.trim();
    match t {
        "inf" | "+inf" => return Ok(f64::INFINITY),
        "-inf" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    expr(t, what)?.eval(&Bindings::new()).map_err(|e| format!("{what}: {e}"))
}

fn parse_limit(text: &str) -> LineResult<Limit> {
    Ok(match text {
        "inf" | "+inf" => Limit::PosInf,
        "-inf" => Limit::NegInf,
        _ => Limit::Finite(expr(text, "bound")?),
    })
}

/// `NAME in (a,b) grid v1,v2 [as SYMBOL]`
fn parse_param(text: &str) -> LineResult<ParamSpec> {
    let (name, rest) = text.trim().split_once(" in ").ok_or("expected `param NAME in RANGE grid VALUES`")?;
    let name = name.trim();
    if !is_identifier(name) {
        return Err(format!("`{name}` is not a valid parameter name"));
    }
    let (range, rest) = rest.split_once(" grid ").ok_or("expected `grid` after the range")?;
    let range = parse_range(range.trim())?;
    let (values, display) = match rest.split_once(" as ") {
        Some((v, s)) => (v, Some(s.trim().to_string())),
        None => (rest, None),
    };
    let grid = values.split(',').map(|v| constant(v, "grid value")).collect::<LineResult<Vec<f64>>>()?;
    Ok(ParamSpec { name: name.to_string(), display, range, grid })
}

fn parse_range(text: &str) -> LineResult<ParamRange> {
    let open = text.chars().next().ok_or("empty range")?;
    let close = text.chars().last().ok_or("empty range")?;
    if !matches!(open, '(' | '[') || !matches!(close, ')' | ']') || text.len() < 2 {
        return Err(format!("malformed range `{text}`"));
    }
    let inner = &text[1..text.len() - 1];
    let (lo, hi) = inner.split_once(',').ok_or_else(|| format!("malformed range `{text}`"))?;
    let lo = constant(lo, "range")?;
    let hi = constant(hi, "range")?;
    if lo > hi {
        return Err(format!("empty range `{text}`"));
    }
    let lower = match (open, lo.is_finite()) {
        (_, false) => Bound::Unbounded,
        ('[', true) => Bound::Closed(lo),
        _ => Bound::Open(lo),
    };
    let upper = match (close, hi.is_finite()) {
        (_, false) => Bound::Unbounded,
        (']', true) => Bound::Closed(hi),
        _ => Bound::Open(hi),
    };
    Ok(ParamRange { lower, upper })
}

/// `X0 -> V0 [delta D]`
fn parse_patch(text: &str) -> LineResult<PatchSpec> {
    let (point, rest) = text.split_once("->").ok_or("expected `patch X0 -> V0 [delta D]`")?;
    let (value, delta) = match rest.split_once(" delta ") {
        Some((v, d)) => (v, constant(d, "patch radius")?),
        None => (rest, DEFAULT_PATCH_DELTA),
    };
    Ok(PatchSpec { point: expr(point, "patch point")?, value: expr(value, "patch value")?, delta })
}

fn parse_condition(text: &str) -> LineResult<Condition> {
    for (tok, op) in [("<=", CmpOp::Le), (">=", CmpOp::Ge), ("<", CmpOp::Lt), (">", CmpOp::Gt)] {
        if let Some((l, r)) = text.split_once(tok) {
            return Ok(Condition { lhs: expr(l, "condition")?, op, rhs: expr(r, "condition")? });
        }
    }
    Err(format!("condition `{text}` needs one of < <= > >="))
}

fn parse_closed_form(text: &str) -> LineResult<ClosedForm> {
    if let Some(rest) = text.strip_prefix("piecewise:") {
        let branches = rest
            .split(';')
            .map(|branch| {
                let (cond, value) =
                    branch.split_once("=>").ok_or_else(|| format!("branch `{}` needs `=>`", branch.trim()))?;
                Ok((parse_condition(cond)?, expr(value, "branch value")?))
            })
            .collect::<LineResult<Vec<_>>>()?;
        return Ok(ClosedForm::Piecewise(branches));
    }
    if let Some(rest) = text.strip_prefix("catalan:") {
        return Ok(ClosedForm::Catalan { template: expr(rest, "closed form")? });
    }
    if let Some(rest) = text.strip_prefix("sici(") {
        let close = matching_paren(rest).ok_or("unbalanced parenthesis in `sici(...)`")?;
        let argument = expr(&rest[..close], "sici argument")?;
        let template = rest[close + 1..].trim_start().strip_prefix(':').ok_or("expected `:` after `sici(...)`")?;
        return Ok(ClosedForm::SiCi { argument, template: expr(template, "closed form")? });
    }
    Ok(ClosedForm::Expr(expr(text, "closed form")?))
}

/// Index of the `)` closing an already-consumed `(`.
fn matching_paren(s: &str) -> Option<usize> {
    let mut depth = 1usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

fn parse_hint(h: &mut HintSpec, text: &str) -> LineResult<()> {
    match text {
        "singular_lower" => h.singular_lower = true,
        "singular_upper" => h.singular_upper = true,
        "decay" => h.decay = true,
        _ => {
            let rest = text.strip_prefix("oscillatory:").ok_or_else(|| format!("unknown hint `{text}`"))?;
            let (kind, omega) = rest.split_once(':').ok_or("expected `oscillatory:sin|cos:OMEGA`")?;
            let kind = match kind.trim() {
                "sin" => TrigKind::Sin,
                "cos" => TrigKind::Cos,
                other => return Err(format!("unknown oscillation kind `{other}`")),
            };
            if h.oscillatory.is_some() {
                return Err("oscillatory hint given twice".into());
            }
            h.oscillatory = Some((expr(omega, "oscillation frequency")?, kind));
        }
    }
    Ok(())
}
