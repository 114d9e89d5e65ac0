use parmint::quadrature::{integrate_exp_sinh, Integrand, ToleranceConfig};
use parmint::specfun::{catalan, catalan_value, ci, frullani_check, si};

/// Euler-Mascheroni constant from H_n - ln n with the asymptotic correction.
fn euler_gamma() -> f64 {
    let n = 1000.0f64;
    let h: f64 = (1..=1000).rev().map(|k| 1.0 / k as f64).sum();
    h - n.ln() - 1.0 / (2.0 * n) + 1.0 / (12.0 * n * n) - 1.0 / (120.0 * n.powi(4))
}

fn ci_series(x: f64) -> f64 {
    let mut sum = euler_gamma() + x.ln();
    let mut fact = 1.0;
    for k in 1..30 {
        let m = 2 * k;
        fact *= ((m - 1) * m) as f64;
        let term = x.powi(m) / (m as f64 * fact);
        sum += if k % 2 == 1 { -term } else { term };
    }
    sum
}

fn si_series(x: f64) -> f64 {
    // Si(x) - pi/2
    let mut sum = 0.0;
    let mut fact = 1.0;
    for k in 0..30 {
        let m = 2 * k + 1;
        if k > 0 {
            fact *= ((m - 1) * m) as f64;
        }
        let term = x.powi(m) / (m as f64 * fact);
        sum += if k % 2 == 0 { term } else { -term };
    }
    sum - std::f64::consts::FRAC_PI_2
}

#[test]
fn euler_gamma_oracle_is_sane() {
    assert!((euler_gamma() - 0.5772156649015329).abs() < 1e-14);
}

#[test]
fn ci_matches_power_series() {
    for x in [0.1, 0.5, 1.0, 2.0, 4.0] {
        let v = ci(x).unwrap();
        assert!((v - ci_series(x)).abs() <= 1e-8, "ci({x}) = {v} vs {}", ci_series(x));
    }
}

#[test]
fn si_matches_power_series() {
    for x in [0.1, 1.0, 3.0, 6.0] {
        let v = si(x).unwrap();
        assert!((v - si_series(x)).abs() <= 1e-9, "si({x}) = {v}");
    }
}

#[test]
fn large_arguments() {
    for x in [50.0, 100.0, 500.0] {
        assert!(si(x).unwrap().abs() < 1.1 / x);
        assert!(ci(x).unwrap().abs() < 1.1 / x);
    }
}

#[test]
fn catalan_constant() {
    let g = catalan_value();
    assert!((g.value - 0.915_965_594_177_219).abs() < 1e-13);
    assert!(g.error_bound < 1e-12);
}

#[test]
fn catalan_from_hyperbolic_integral() {
    // int_0^inf t / cosh t dt = 2G
    let f = Integrand::from_fn(|t: f64| t / t.cosh());
    let r = integrate_exp_sinh(&f, 0.0, &ToleranceConfig::default());
    assert!((r.value - 2.0 * catalan()).abs() < 1e-10, "{r:?}");
}

#[test]
fn frullani_grid() {
    let tol = ToleranceConfig::default();
    let grid = [0.5, 1.0, 2.0, 5.0];
    let exp = Integrand::from_fn(|x: f64| (-x).exp());
    let rational = Integrand::from_fn(|x: f64| 1.0 / (1.0 + x));
    for f in [&exp, &rational] {
        for &a in &grid {
            for &b in &grid {
                let c = frullani_check(f, 1.0, 0.0, a, b, &tol).unwrap();
                assert!(c.deviation() <= 1e-8, "a={a} b={b}: {c:?}");
            }
        }
    }
}
