//! Adaptive composite Gauss-Legendre quadrature on an interval.

use once_cell::sync::Lazy;
use thiserror::Error;

const ORDER: usize = 15;
const MAX_DEPTH: u32 = 52;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("tolerance {0} must be positive and finite")]
    InvalidTolerance(f64),
    #[error("integrand returned a non-finite value at {0}")]
    NonFinite(f64),
    #[error("subdivision budget exhausted with error estimate {estimate:e} above tolerance {tolerance:e}")]
    BudgetExhausted { estimate: f64, tolerance: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

/// Nodes and weights on `[-1, 1]`, from Newton iteration on `P_15`.
static RULE: Lazy<([f64; ORDER], [f64; ORDER])> = Lazy::new(|| {
    let n = ORDER;
    let mut nodes = [0.0; ORDER];
    let mut weights = [0.0; ORDER];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
});

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<f64, QuadratureError> {
    let (nodes, weights) = &*RULE;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        let t = mid + half * x;
        let v = f(t);
        if !v.is_finite() {
            return Err(QuadratureError::NonFinite(t));
        }
        sum += w * v;
    }
    Ok(sum * half)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Each panel is compared against the sum of its two halves; a panel is
/// accepted once the difference is within its share of `tol` (proportional
/// to its width). Panels are processed left to right, so the result is
/// deterministic.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Integral, QuadratureError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(QuadratureError::InvalidTolerance(tol));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        });
    }
    let width = b - a;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut panels = 0;
    let mut exhausted = false;
    let mut stack = vec![(a, b, panel(&f, a, b)?, 0u32)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel(&f, lo, mid)?;
        let right = panel(&f, mid, hi)?;
        let refined = left + right;
        let diff = (whole - refined).abs();
        let share = tol * ((hi - lo) / width).abs();
        let roundoff = 16.0 * f64::EPSILON * (left.abs() + right.abs());
        if diff <= share || diff <= roundoff || depth >= MAX_DEPTH {
            exhausted |= depth >= MAX_DEPTH && diff > share && diff > roundoff;
            value += refined;
            error += diff;
            panels += 1;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    if exhausted && error > tol {
        return Err(QuadratureError::BudgetExhausted {
            estimate: error,
            tolerance: tol,
        });
    }
    Ok(Integral {
        value,
        error_estimate: error,
        panels,
    })
}
