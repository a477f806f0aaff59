//! Scalar bound functions for edge cosh-lengths along the flow, the embedded
//! row table of per-valence constants, and grid-based checks of the
//! inequalities those constants rely on.
//!
//! Conventions: `c9 = cos(2 pi / 9)`, `c10 = cos(2 pi / 10)`. Valence-indexed
//! quantities are only defined for `n >= 9`.

mod dd;
mod hfun;
mod report;
mod suite;
mod table;

use std::f64::consts::PI;

use once_cell::sync::Lazy;
use serde::Serialize;
use thiserror::Error;

pub use hfun::{h, h1, h2, h3, h4, phi_dd, HKind, B_FIXED, D18, DELTA17, DELTA9};
pub use report::{CheckResult, VerificationReport};
pub use suite::{
    grid_monotonicity_suite, verify_constants, verify_rows, verify_table1, GridOptions,
};
pub use table::{table1_checksum, Table1Row, TABLE1, TABLE1_SHA256};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("valence {0} is below 9")]
    ValenceBelowNine(usize),
    #[error("{name} = {value} is outside {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("fixed-point iteration did not converge within {0} iterations")]
    NotConverged(usize),
    #[error("fixed point {value} fails its check: {reason}")]
    FixedPointCheck { value: f64, reason: String },
}

fn out_of(name: &'static str, value: f64, domain: &'static str) -> BoundsError {
    BoundsError::OutOfDomain {
        name,
        value,
        domain,
    }
}

pub fn cos_2pi_over(n: usize) -> f64 {
    (2.0 * PI / n as f64).cos()
}

pub fn c9() -> f64 {
    cos_2pi_over(9)
}

pub fn c10() -> f64 {
    cos_2pi_over(10)
}

/// `b(y) = 16 / (y + 1) - 7`; `b(cos(2 pi / n)) = b_n` for `n >= 10`.
pub fn b_of_y(y: f64) -> f64 {
    16.0 / (y + 1.0) - 7.0
}

/// Upper bound `b_n` on cosh-lengths of valence-`n` edges.
pub fn b_n(n: usize) -> Result<f64, BoundsError> {
    match n {
        0..=8 => Err(BoundsError::ValenceBelowNine(n)),
        9 => Ok(2.0),
        _ => Ok(16.0 / (1.0 + cos_2pi_over(n)) - 7.0),
    }
}

pub fn f_xi(xi: f64, delta: f64) -> f64 {
    let s = (1.0 + xi) * (1.0 + xi);
    (-2.0 * delta * delta + 2.0 * delta * (s - 2.0) + 4.0 * s)
        / (delta * delta + 10.0 * delta + 4.0 * s)
}

/// The quadratic whose positive root is `eta_xi(y)`.
pub fn eta_quadratic(xi: f64, y: f64, delta: f64) -> f64 {
    let s = (1.0 + xi) * (1.0 + xi);
    (2.0 + y) * delta * delta + 2.0 * (2.0 + 5.0 * y - s) * delta - 4.0 * (1.0 - y) * s
}

pub(crate) fn eta_unchecked(xi: f64, y: f64) -> f64 {
    let s = (1.0 + xi) * (1.0 + xi);
    let lin = 2.0 + 5.0 * y - s;
    (-lin + (lin * lin + 4.0 * (2.0 + y) * (1.0 - y) * s).sqrt()) / (2.0 + y)
}

/// Positive solution `delta` of `f_xi(delta) = y`.
///
/// Accepts `y = 1`, where the root is 0.
pub fn eta(xi: f64, y: f64) -> Result<f64, BoundsError> {
    if !(xi.is_finite() && xi >= 0.0) {
        return Err(out_of("xi", xi, "[0, inf)"));
    }
    if !(y > 0.0 && y <= 1.0) {
        return Err(out_of("y", y, "(0, 1]"));
    }
    Ok(eta_unchecked(xi, y))
}

/// `b(y)` above `c10`, and on `[c9, c10]` the affine image of `b(y)` that
/// takes the value 2 at `c9` and meets `b` continuously at `c10`.
pub(crate) fn beta_unchecked(y: f64) -> f64 {
    let c10 = c10();
    if y >= c10 {
        return b_of_y(y);
    }
    let b9 = b_of_y(c9());
    let b10 = b_of_y(c10);
    ((2.0 - b10) * b_of_y(y) - (2.0 - b9) * b10) / (b9 - b10)
}

pub fn beta(y: f64) -> Result<f64, BoundsError> {
    if !(y >= c9() && y <= 1.0) {
        return Err(out_of("y", y, "[cos(2pi/9), 1]"));
    }
    Ok(beta_unchecked(y))
}

/// The rational function `G` of `delta`, four `eta`s and four `beta`s, with
/// index order `(2, 3, 5, 6)`.
pub fn g_function(delta: f64, eta: [f64; 4], beta: [f64; 4]) -> f64 {
    let [e2, e3, e5, e6] = eta;
    let [b2, b3, b5, b6] = beta;
    let p = 2.0 + e2 + e6;
    let q = 2.0 + e3 + e5;
    let num = 1.0
        + (delta * ((1.0 + e2) * (1.0 + e5) + (1.0 + e3) * (1.0 + e6))
            - 2.0 * delta * (delta + 2.0))
            / (p * q);
    let d1 = (1.0 + (delta * delta + 2.0 * (1.0 + b2 * b6) * delta) / (p * p)).sqrt();
    let d2 = (1.0 + (delta * delta + 2.0 * (1.0 + b3 * b5) * delta) / (q * q)).sqrt();
    num / (d1 * d2)
}

pub(crate) fn psi_unchecked(xi: f64, delta: f64, y: [f64; 4]) -> f64 {
    g_function(
        delta,
        y.map(|v| eta_unchecked(xi, v)),
        y.map(beta_unchecked),
    )
}

/// `psi_xi(delta, y2, y3, y5, y6) = G(delta, eta_xi(y_i), beta(y_i))`.
pub fn psi(xi: f64, delta: f64, y2: f64, y3: f64, y5: f64, y6: f64) -> Result<f64, BoundsError> {
    if !(0.0..=0.13).contains(&xi) {
        return Err(out_of("xi", xi, "[0, 0.13]"));
    }
    if !(0.0..=0.13).contains(&delta) {
        return Err(out_of("delta", delta, "[0, 0.13]"));
    }
    let c9 = c9();
    for y in [y2, y3, y5, y6] {
        if !(y >= c9 && y < 1.0) {
            return Err(out_of("y", y, "[cos(2pi/9), 1)"));
        }
    }
    Ok(psi_unchecked(xi, delta, [y2, y3, y5, y6]))
}

/// Cubic satisfied by the limit of the `xi` iteration: `eta_quadratic` at
/// `delta = xi`, `y = c9`.
pub fn xi_cubic(xi: f64) -> f64 {
    let c = c9();
    -2.0 * xi.powi(3) + (5.0 * c - 6.0) * xi * xi + (18.0 * c - 6.0) * xi + 4.0 * c - 4.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiIteration {
    pub value: f64,
    /// `xi_1 = 0, xi_2, ...` up to and including `value`.
    pub iterates: Vec<f64>,
}

pub const XI_MAX_ITERATIONS: usize = 1_000_000;

/// Iterates `xi_{k+1} = eta_{xi_k}(c9)` from `xi_1 = 0` until successive
/// iterates differ by at most `tolerance`.
pub fn xi_iteration(tolerance: f64) -> Result<XiIteration, BoundsError> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(out_of("tolerance", tolerance, "(0, inf)"));
    }
    let c = c9();
    let mut iterates = vec![0.0];
    let mut xi = 0.0;
    for _ in 0..XI_MAX_ITERATIONS {
        let next = eta_unchecked(xi, c);
        iterates.push(next);
        if (next - xi).abs() <= tolerance {
            let residual = xi_cubic(next).abs();
            if residual > 10.0 * tolerance {
                return Err(BoundsError::FixedPointCheck {
                    value: next,
                    reason: format!("cubic residual {residual:e}"),
                });
            }
            if !(0.125..=0.13).contains(&next) {
                return Err(BoundsError::FixedPointCheck {
                    value: next,
                    reason: "outside [0.125, 0.13]".to_owned(),
                });
            }
            return Ok(XiIteration {
                value: next,
                iterates,
            });
        }
        xi = next;
    }
    Err(BoundsError::NotConverged(XI_MAX_ITERATIONS))
}

static XI_INFINITY: Lazy<f64> =
    Lazy::new(|| xi_iteration(1e-15).expect("xi iteration converges").value);

/// The limit of the `xi` iteration, computed once.
pub fn xi_infinity() -> f64 {
    *XI_INFINITY
}

/// Lower-bound parameter `mu_n = eta_{xi_inf}(cos(2 pi / n))`, with
/// `mu_9 = xi_inf`.
pub fn mu_n(n: usize) -> Result<f64, BoundsError> {
    match n {
        0..=8 => Err(BoundsError::ValenceBelowNine(n)),
        9 => Ok(xi_infinity()),
        _ => Ok(eta_unchecked(xi_infinity(), cos_2pi_over(n))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValenceBounds {
    pub n: usize,
    pub b: f64,
    pub mu: f64,
}

/// Per-valence constants for `9..=n_max` plus the embedded row table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsTable {
    pub xi_infinity: f64,
    pub valences: Vec<ValenceBounds>,
    pub table1: Vec<Table1Row>,
}

impl BoundsTable {
    pub fn new(n_max: usize) -> Result<Self, BoundsError> {
        if n_max < 9 {
            return Err(BoundsError::ValenceBelowNine(n_max));
        }
        let valences = (9..=n_max)
            .map(|n| {
                Ok(ValenceBounds {
                    n,
                    b: b_n(n)?,
                    mu: mu_n(n)?,
                })
            })
            .collect::<Result<_, BoundsError>>()?;
        Ok(Self {
            xi_infinity: xi_infinity(),
            valences,
            table1: TABLE1.to_vec(),
        })
    }

    /// The row whose valence range contains `n`.
    pub fn row_for(&self, n: usize) -> Option<&Table1Row> {
        self.table1.iter().find(|r| r.contains(n))
    }
}
