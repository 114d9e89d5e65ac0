use super::{Integrand, QuadratureResult, Status, ToleranceConfig};
use crate::expr::EvalError;

// 15-point Kronrod abscissae on [-1, 1] (non-negative half, center last).
const XGK: [f64; 8] = [
    f64::from_bits(0x3fefba009d4d09b1),
    f64::from_bits(0x3fee5f178e7c6229),
    f64::from_bits(0x3febacf827b9bb3e),
    f64::from_bits(0x3fe7ba9f9be3a1d6),
    f64::from_bits(0x3fe2c13a049dfa24),
    f64::from_bits(0x3fd9f95df119fd62),
    f64::from_bits(0x3fca98b2892e0c77),
    0.0,
];

const WGK: [f64; 8] = [
    f64::from_bits(0x3f977c5b67d57470),
    f64::from_bits(0x3fb026cdaa7b61c4),
    f64::from_bits(0x3fbad384a34814c6),
    f64::from_bits(0x3fc200ed0f46e8c1),
    f64::from_bits(0x3fc5a1f266e47d5c),
    f64::from_bits(0x3fc85d6861c80eb1),
    f64::from_bits(0x3fca2adbcbec9cd8),
    f64::from_bits(0x3fcad04f9087090f),
];

// Embedded 7-point Gauss weights: odd Kronrod nodes, then the center.
const WG: [f64; 4] = [
    f64::from_bits(0x3fc092f69f826d57),
    f64::from_bits(0x3fd1e6b1713d8644),
    f64::from_bits(0x3fd86fe74ee32b3d),
    f64::from_bits(0x3fdabfd7e03c2fa6),
];

const MAX_SEGMENTS: usize = 4000;

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

/// One Gauss-Kronrod 7/15 panel with the QUADPACK error heuristic.
fn gk15(f: &Integrand, a: f64, b: f64) -> Result<(f64, f64), EvalError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f.eval(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f.eval(center - dx)?;
        let f2 = f.eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((result, err))
}

/// Globally adaptive Gauss-Kronrod quadrature on a finite interval.
///
/// The segment with the largest error estimate is bisected until the total
/// estimate meets `tol.target(value)`. A segment deeper than `tol.max_depth`
/// bisections stops refinement with [`Status::MaxDepthReached`]; a fault at an
/// unpatched node stops it with [`Status::EvaluationFault`].
pub fn integrate_finite(f: &Integrand, a: f64, b: f64, tol: &ToleranceConfig) -> QuadratureResult {
    if a == b {
        return QuadratureResult { value: 0.0, error_estimate: 0.0, evaluations: 0, status: Status::Converged };
    }
    if a > b {
        let r = integrate_finite(f, b, a, tol);
        return QuadratureResult { value: -r.value, ..r };
    }
    let mut evaluations = 15;
    let fault = |value: f64, evaluations| QuadratureResult {
        value,
        error_estimate: f64::INFINITY,
        evaluations,
        status: Status::EvaluationFault,
    };
    let (value, error) = match gk15(f, a, b) {
        Ok(r) => r,
        Err(_) => return fault(f64::NAN, evaluations),
    };
    let mut segments = vec![Segment { a, b, value, error, depth: 0 }];
    let mut status = Status::Converged;
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let total_err: f64 = segments.iter().map(|s| s.error).sum();
        if total_err <= tol.target(total) {
            break;
        }
        let (idx, worst) =
            segments
                .iter()
                .enumerate()
                .fold((0, segments[0]), |acc, (i, s)| if s.error > acc.1.error { (i, *s) } else { acc });
        let mid = 0.5 * (worst.a + worst.b);
        if worst.depth >= tol.max_depth || segments.len() >= MAX_SEGMENTS || mid <= worst.a || mid >= worst.b {
            status = Status::MaxDepthReached;
            break;
        }
        evaluations += 30;
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        let ((lv, le), (rv, re)) = match (left, right) {
            (Ok(l), Ok(r)) => (l, r),
            _ => return fault(total, evaluations),
        };
        let depth = worst.depth + 1;
        segments[idx] = Segment { a: worst.a, b: mid, value: lv, error: le, depth };
        segments.push(Segment { a: mid, b: worst.b, value: rv, error: re, depth });
    }
    // fixed summation order: left to right
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    QuadratureResult {
        value: segments.iter().map(|s| s.value).sum(),
        error_estimate: segments.iter().map(|s| s.error).sum(),
        evaluations,
        status,
    }
}
