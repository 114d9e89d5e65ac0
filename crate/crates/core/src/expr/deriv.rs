//! Symbolic differentiation and the local rewrite pass that tidies its output.

use super::{BinOp, Expr, Func};

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Const(c) if *c == v)
}

fn has_no_symbols(e: &Expr) -> bool {
    match e {
        Expr::Const(_) | Expr::Pi => true,
        Expr::Sym(_) => false,
        Expr::Neg(a) | Expr::Apply(_, a) => has_no_symbols(a),
        Expr::Bin(_, l, r) => has_no_symbols(l) && has_no_symbols(r),
    }
}

impl Expr {
    /// Derivative with respect to `s`, passed through [`Expr::simplify`].
    pub fn diff(&self, s: &str) -> Expr {
        self.diff_raw(s).simplify()
    }

    fn diff_raw(&self, s: &str) -> Expr {
        if !self.contains_symbol(s) {
            return Expr::num(0.0);
        }
        match self {
            Expr::Const(_) | Expr::Pi => Expr::num(0.0),
            Expr::Sym(name) => Expr::num(if name == s { 1.0 } else { 0.0 }),
            Expr::Neg(e) => Expr::neg(e.diff_raw(s)),
            Expr::Bin(op, u, v) => {
                let (u, v) = (u.as_ref().clone(), v.as_ref().clone());
                let du = u.diff_raw(s);
                let dv = v.diff_raw(s);
                match op {
                    BinOp::Add => Expr::add(du, dv),
                    BinOp::Sub => Expr::sub(du, dv),
                    BinOp::Mul => Expr::add(Expr::mul(du, v), Expr::mul(u, dv)),
                    BinOp::Div => {
                        Expr::div(Expr::sub(Expr::mul(du, v.clone()), Expr::mul(u, dv)), Expr::pow(v, Expr::num(2.0)))
                    }
                    BinOp::Pow => {
                        if !v.contains_symbol(s) {
                            // v * u^(v-1) * u'
                            Expr::mul(Expr::mul(v.clone(), Expr::pow(u, Expr::sub(v, Expr::num(1.0)))), du)
                        } else if !u.contains_symbol(s) {
                            // u^v * ln(u) * v'
                            Expr::mul(Expr::mul(Expr::pow(u.clone(), v), Expr::apply(Func::Ln, u)), dv)
                        } else {
                            // u^v * (v' ln u + v u'/u)
                            Expr::mul(
                                Expr::pow(u.clone(), v.clone()),
                                Expr::add(
                                    Expr::mul(dv, Expr::apply(Func::Ln, u.clone())),
                                    Expr::div(Expr::mul(v, du), u),
                                ),
                            )
                        }
                    }
                }
            }
            Expr::Apply(f, inner) => {
                let u = inner.as_ref().clone();
                let du = u.diff_raw(s);
                let outer = match f {
                    Func::Sin => Expr::apply(Func::Cos, u),
                    Func::Cos => Expr::neg(Expr::apply(Func::Sin, u)),
                    Func::Tan => Expr::div(Expr::num(1.0), Expr::pow(Expr::apply(Func::Cos, u), Expr::num(2.0))),
                    Func::Atan => Expr::div(Expr::num(1.0), Expr::add(Expr::num(1.0), Expr::pow(u, Expr::num(2.0)))),
                    Func::Asin => Expr::div(
                        Expr::num(1.0),
                        Expr::apply(Func::Sqrt, Expr::sub(Expr::num(1.0), Expr::pow(u, Expr::num(2.0)))),
                    ),
                    Func::Ln => Expr::div(Expr::num(1.0), u),
                    Func::Exp => Expr::apply(Func::Exp, u),
                    Func::Sqrt => Expr::div(Expr::num(1.0), Expr::mul(Expr::num(2.0), Expr::apply(Func::Sqrt, u))),
                    Func::Sinh => Expr::apply(Func::Cosh, u),
                    Func::Cosh => Expr::apply(Func::Sinh, u),
                    // kink at 0: sign(0) = 0
                    Func::Abs => Expr::apply(Func::Sign, u),
                    Func::Sign => Expr::num(0.0),
                };
                Expr::mul(outer, du)
            }
        }
    }

    /// Safe local rewrites only: additive and multiplicative identities,
    /// `e^1`, `e^0`, double negation and folding of symbol-free subtrees.
    /// Idempotent and value-preserving wherever the input evaluates.
    pub fn simplify(&self) -> Expr {
        let out = match self {
            Expr::Const(_) | Expr::Pi | Expr::Sym(_) => return self.clone(),
            Expr::Neg(e) => match e.simplify() {
                Expr::Neg(inner) => *inner,
                Expr::Const(c) => Expr::Const(-c),
                other => Expr::neg(other),
            },
            Expr::Apply(f, e) => Expr::apply(*f, e.simplify()),
            Expr::Bin(op, l, r) => {
                let (l, r) = (l.simplify(), r.simplify());
                match op {
                    BinOp::Add if is_const(&l, 0.0) => r,
                    BinOp::Add if is_const(&r, 0.0) => l,
                    BinOp::Sub if is_const(&r, 0.0) => l,
                    BinOp::Sub if is_const(&l, 0.0) => match r {
                        Expr::Const(c) => Expr::Const(-c),
                        Expr::Neg(inner) => *inner,
                        other => Expr::neg(other),
                    },
                    BinOp::Mul if is_const(&l, 0.0) || is_const(&r, 0.0) => Expr::num(0.0),
                    BinOp::Mul if is_const(&l, 1.0) => r,
                    BinOp::Mul if is_const(&r, 1.0) => l,
                    BinOp::Div if is_const(&r, 1.0) => l,
                    BinOp::Pow if is_const(&r, 1.0) => l,
                    BinOp::Pow if is_const(&r, 0.0) => Expr::num(1.0),
                    _ => Expr::bin(*op, l, r),
                }
            }
        };
        fold(out)
    }
}

fn fold(e: Expr) -> Expr {
    if matches!(e, Expr::Const(_) | Expr::Pi) || !has_no_symbols(&e) {
        return e;
    }
    match e.eval(&Default::default()) {
        Ok(v) if v.is_finite() => Expr::Const(v),
        _ => e,
    }
}
