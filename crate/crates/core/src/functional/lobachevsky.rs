//! Lobachevsky and Clausen functions.
//!
//! `Cl2` is evaluated on `[-pi, pi]` through its Bernoulli expansion
//!
//! ```text
//! Cl2(t) = t - t ln|t| + sum_{k>=1} zeta(2k) t^(2k+1) / (k (2k+1) (2 pi)^(2k))
//! ```
//!
//! whose terms shrink at least like `4^-k` there, so about 30 terms reach
//! double precision. `Lambda(t) = Cl2(2t) / 2`.

use std::f64::consts::PI;

use once_cell::sync::Lazy;

const TERMS: usize = 40;

/// `zeta(2k) / (k (2k+1) (2 pi)^(2k))` for `k = 1..=TERMS`.
static COEFFS: Lazy<[f64; TERMS]> = Lazy::new(|| {
    let two_pi_sq = (2.0 * PI) * (2.0 * PI);
    let mut out = [0.0; TERMS];
    let mut scale = 1.0;
    for (i, slot) in out.iter_mut().enumerate() {
        let k = (i + 1) as f64;
        scale *= two_pi_sq;
        *slot = zeta_even(i + 1) / (k * (2.0 * k + 1.0) * scale);
    }
    out
});

/// `zeta(2k)` for `k >= 1`.
fn zeta_even(k: usize) -> f64 {
    match k {
        1 => PI * PI / 6.0,
        2 => PI.powi(4) / 90.0,
        _ => {
            let s = 2 * k as i32;
            let n_max = 2000usize;
            // Summed from the small end to keep the rounding error down.
            let head: f64 = (1..=n_max).rev().map(|n| (n as f64).powi(-s)).sum();
            let n = n_max as f64;
            // Euler-Maclaurin tail: integral plus half the first omitted term.
            let tail = n.powi(1 - s) / (s - 1) as f64 - 0.5 * n.powi(-s);
            head + tail
        }
    }
}

/// Clausen function `Cl2(t) = sum sin(n t) / n^2`.
pub fn clausen2(theta: f64) -> f64 {
    if !theta.is_finite() {
        return f64::NAN;
    }
    let two_pi = 2.0 * PI;
    let t = theta - two_pi * (theta / two_pi).round();
    if t == 0.0 {
        return 0.0;
    }
    let t2 = t * t;
    let mut power = t;
    let mut series = 0.0;
    for c in COEFFS.iter() {
        power *= t2;
        let term = c * power;
        series += term;
        if term.abs() < 1e-18 * series.abs().max(1e-300) {
            break;
        }
    }
    t - t * t.abs().ln() + series
}

/// Lobachevsky function `Lambda(t) = -int_0^t ln|2 sin s| ds`.
///
/// Odd and `pi`-periodic; the argument is reduced to `(-pi/2, pi/2]`.
pub fn lobachevsky(theta: f64) -> f64 {
    if !theta.is_finite() {
        return f64::NAN;
    }
    let t = theta - PI * (theta / PI).round();
    0.5 * clausen2(2.0 * t)
}
