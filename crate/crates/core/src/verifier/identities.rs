use std::f64::consts::{LN_2, PI};

use crate::catalog::Catalog;
use crate::expr::Bindings;

use super::{CheckTolerance, Verifier};

/// Evaluation context handed to identity sides.
pub struct IdentityContext<'a> {
    pub verifier: &'a Verifier,
    pub catalog: &'a Catalog,
}

impl IdentityContext<'_> {
    /// Quadrature of family `id` at `b`; non-convergence is an error.
    pub fn q(&self, id: &str, b: &Bindings) -> Result<f64, String> {
        let family = self.catalog.get(id).map_err(|e| e.to_string())?;
        family.check_bindings(b).map_err(|e| e.to_string())?;
        let r = self.verifier.quadrature(family, b).map_err(|e| e.to_string())?;
        if r.is_converged() {
            Ok(r.value)
        } else {
            Err(format!("{id} at {b}: quadrature status {}", r.status))
        }
    }

    /// Quadrature of `id` with bindings picked from `b` and renamed:
    /// each pair is (family parameter, name in `b`).
    pub fn q_as(&self, id: &str, b: &Bindings, names: &[(&str, &str)]) -> Result<f64, String> {
        let mut mapped = Bindings::new();
        for (to, from) in names {
            let v = b.get(from).ok_or_else(|| format!("identity grid lacks `{from}`"))?;
            mapped.set(to, v);
        }
        self.q(id, &mapped)
    }

    pub fn closed_form(&self, id: &str, b: &Bindings) -> Result<f64, String> {
        self.catalog.closed_form_value(id, b).map_err(|e| e.to_string())
    }
}

pub type Side = fn(&IdentityContext, &Bindings) -> Result<f64, String>;

/// A relation between integrals of different families (or one family at
/// different points), checked side against side over `grid`.
pub struct Identity {
    /// Family the report is filed under.
    pub owner: &'static str,
    pub description: &'static str,
    pub grid: Vec<Bindings>,
    pub relations: Vec<(Side, Side)>,
    pub tolerance: CheckTolerance,
}

fn grid1(name: &str, values: &[f64]) -> Vec<Bindings> {
    values.iter().map(|&v| Bindings::new().with(name, v)).collect()
}

fn grid2(names: (&str, &str), values: &[(f64, f64)]) -> Vec<Bindings> {
    values.iter().map(|&(x, y)| Bindings::new().with(names.0, x).with(names.1, y)).collect()
}

fn x(b: &Bindings, name: &str) -> f64 {
    b.get(name).unwrap_or(f64::NAN)
}

pub fn builtin_identities() -> Vec<Identity> {
    let tol = CheckTolerance::identity();
    vec![
        Identity {
            owner: "eq_2.4",
            description: "int (x^a - x^b)/ln x = J(a) - J(b) with J(a) = int (x^a - 1)/ln x",
            grid: grid2(("a", "b"), &[(0.5, 0.0), (0.5, 1.0), (2.0, 0.0), (2.0, 1.0)]),
            relations: vec![(
                |c, b| c.q("eq_2.4", b),
                |c, b| Ok(c.q_as("eq_2.2", b, &[("a", "a")])? - c.q_as("eq_2.2", b, &[("a", "b")])?),
            )],
            tolerance: tol,
        },
        Identity {
            owner: "eq_2.19",
            description:
                "int (1 - e^{-lx}) cos(bx)/x equals int e^{-bx}(1 - cos lx)/x (damping and oscillation swap roles)",
            grid: grid2(("l", "b"), &[(0.5, 0.5), (1.0, 1.0), (2.0, 0.5), (0.5, 2.0)]),
            relations: vec![(|c, b| c.q("eq_2.19", b), |c, b| c.q("eq_2.18", b))],
            tolerance: CheckTolerance::new(1e-7, 1e-10),
        },
        Identity {
            owner: "GR_3.951.3",
            description: "int (e^{-lx} - e^{-mx}) cos(bx)/x is a difference of two (1 - e^{-lx}) cos(bx)/x integrals",
            grid: vec![
                Bindings::new().with("l", 0.5).with("m", 2.0).with("b", 1.0),
                Bindings::new().with("l", 1.0).with("m", 2.0).with("b", 0.5),
            ],
            relations: vec![(
                |c, b| c.q("GR_3.951.3", b),
                |c, b| {
                    Ok(c.q_as("eq_2.19", b, &[("l", "m"), ("b", "b")])?
                        - c.q_as("eq_2.19", b, &[("l", "l"), ("b", "b")])?)
                },
            )],
            tolerance: CheckTolerance::new(1e-7, 1e-10),
        },
        Identity {
            owner: "eq_2.17",
            description: "symmetry in (l, m) of quadrature and closed form",
            grid: grid2(("l", "m"), &[(1.0, 2.0), (2.0, 1.0), (0.5, 3.0)]),
            relations: vec![
                (|c, b| c.q("eq_2.17", b), |c, b| c.q_as("eq_2.17", b, &[("l", "m"), ("m", "l")])),
                (
                    |c, b| c.closed_form("eq_2.17", b),
                    |c, b| c.closed_form("eq_2.17", &Bindings::new().with("l", x(b, "m")).with("m", x(b, "l"))),
                ),
            ],
            tolerance: CheckTolerance::new(0.0, 1e-9),
        },
        Identity {
            owner: "eq_2.10",
            description: "int ln(1 + l^2 x^2)/(1 + x^2) = 2 int atan(lx)/(x(1 + x^2)) = pi ln(1 + l)",
            grid: grid1("l", &[0.5, 1.0, 2.0]),
            relations: vec![
                (|c, b| c.q("eq_2.10", b), |c, b| Ok(2.0 * c.q("eq_2.12", b)?)),
                (|c, b| Ok(2.0 * c.q("eq_2.12", b)?), |_, b| Ok(PI * (1.0 + x(b, "l")).ln())),
            ],
            tolerance: tol,
        },
        Identity {
            owner: "GR_4.291.8",
            description: "integration by parts: int_0^1 ln(1+x)/(1+x^2) + int_0^1 atan x/(1+x) = (pi/4) ln 2",
            grid: vec![Bindings::new()],
            relations: vec![(
                |c, b| Ok(c.q("GR_4.291.8", b)? + c.q("eq_1.9_by_parts", b)?),
                |_, _| Ok(PI / 4.0 * LN_2),
            )],
            tolerance: tol,
        },
        Identity {
            owner: "eq_4.3",
            description: "int_0^1 atan x/sqrt(1-x^2) + int_1^inf atan t/(t sqrt(t^2-1)) = pi^2/4",
            grid: vec![Bindings::new()],
            relations: vec![(|c, b| Ok(c.q("eq_2.9", b)? + c.q("eq_4.3", b)?), |_, _| Ok(PI * PI / 4.0))],
            tolerance: tol,
        },
    ]
}
