//! Angle-sum lower bounds `h1..h4` around an edge whose cosh-length sits at
//! the running maximum.

use crate::tetra::phi_formula;

use super::{out_of, BoundsError};

/// Fixed upper cosh-length bound used once the first bootstrap round is done.
pub const B_FIXED: f64 = 1.98;
pub const D18: f64 = 1.9454;
pub const DELTA17: f64 = 0.0314;
pub const DELTA9: f64 = 0.125;

#[inline]
fn phi(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> f64 {
    phi_formula([a, b, c, d, e, f])
}

#[inline]
fn acos_max(p: f64, q: f64) -> f64 {
    p.max(q).clamp(-1.0, 1.0).acos()
}

/// Four-way max bounding `cos(alpha(e1))` when `x_{e1} = x`.
pub fn phi_dd(x: f64, d: f64, delta: f64, c: f64) -> f64 {
    phi(x, d, d, 1.0, 2.0, 2.0)
        .max(phi(x, d, 2.0, 1.0, 2.0, d))
        .max(phi(x, c, c, 1.0 + delta, 2.0, 2.0))
        .max(phi(x, c, 2.0, 1.0 + delta, 2.0, c))
}

pub(crate) fn h1_raw(x: f64, gamma: f64, b: f64) -> f64 {
    acos_max(phi(x, gamma, x, x, 2.0, 2.0), phi(x, gamma, 2.0, x, 2.0, x))
        + acos_max(
            phi(x, gamma, x, 1.0, 2.0, 2.0),
            phi(x, gamma, 2.0, 1.0, 2.0, x),
        )
        + 7.0 * acos_max(phi(x, b, b, 1.0, 2.0, 2.0), phi(x, b, 2.0, 1.0, 2.0, b))
}

pub(crate) fn h2_raw(x: f64, d: f64, delta: f64) -> f64 {
    acos_max(phi(x, x, x, x, 2.0, 2.0), phi(x, x, 2.0, x, 2.0, x))
        + 8.0 * phi_dd(x, d, delta, x).clamp(-1.0, 1.0).acos()
}

fn tail_seven(x: f64) -> f64 {
    7.0 * phi_dd(x, D18, DELTA17, B_FIXED).clamp(-1.0, 1.0).acos()
}

pub(crate) fn h3_raw(x: f64, gamma: f64) -> f64 {
    acos_max(phi(x, gamma, x, x, 2.0, 2.0), phi(x, gamma, 2.0, x, 2.0, x))
        + acos_max(
            phi(x, gamma, x, 1.0, 2.0, 2.0),
            phi(x, gamma, 2.0, 1.0, 2.0, x),
        )
        + tail_seven(x)
}

pub(crate) fn h4_raw(x: f64, gamma: f64, d: f64) -> f64 {
    let s = 1.0 + DELTA9;
    acos_max(phi(x, gamma, d, s, 2.0, x), phi(x, gamma, x, s, 2.0, d))
        + acos_max(
            phi(x, gamma, d, 1.0, 2.0, 2.0),
            phi(x, gamma, 2.0, 1.0, 2.0, d),
        )
        + tail_seven(x)
}

fn unit_interval(name: &'static str, v: f64) -> Result<(), BoundsError> {
    if (1.0..=2.0).contains(&v) {
        Ok(())
    } else {
        Err(out_of(name, v, "[1, 2]"))
    }
}

fn small_delta(v: f64) -> Result<(), BoundsError> {
    if (0.0..=0.13).contains(&v) {
        Ok(())
    } else {
        Err(out_of("delta", v, "[0, 0.13]"))
    }
}

pub fn h1(x: f64, gamma: f64, b: f64) -> Result<f64, BoundsError> {
    unit_interval("x", x)?;
    unit_interval("gamma", gamma)?;
    unit_interval("b", b)?;
    Ok(h1_raw(x, gamma, b))
}

pub fn h2(x: f64, d: f64, delta: f64) -> Result<f64, BoundsError> {
    unit_interval("x", x)?;
    unit_interval("d", d)?;
    small_delta(delta)?;
    Ok(h2_raw(x, d, delta))
}

pub fn h3(x: f64, gamma: f64) -> Result<f64, BoundsError> {
    unit_interval("x", x)?;
    unit_interval("gamma", gamma)?;
    Ok(h3_raw(x, gamma))
}

pub fn h4(x: f64, gamma: f64, d: f64) -> Result<f64, BoundsError> {
    unit_interval("x", x)?;
    unit_interval("gamma", gamma)?;
    unit_interval("d", d)?;
    Ok(h4_raw(x, gamma, d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HKind {
    H1,
    H2,
    H3,
    H4,
}

impl HKind {
    pub fn arity(self) -> usize {
        match self {
            HKind::H3 => 2,
            _ => 3,
        }
    }
}

/// Dispatches to `h1..h4`; `args` must have the kind's arity.
pub fn h(kind: HKind, args: &[f64]) -> Result<f64, BoundsError> {
    if args.len() != kind.arity() {
        return Err(out_of(
            "argument count",
            args.len() as f64,
            "the kind's arity",
        ));
    }
    match kind {
        HKind::H1 => h1(args[0], args[1], args[2]),
        HKind::H2 => h2(args[0], args[1], args[2]),
        HKind::H3 => h3(args[0], args[1]),
        HKind::H4 => h4(args[0], args[1], args[2]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bootstrap_constants_clear_two_pi() {
        assert!(h1(1.9526, 1.2488, 2.0).unwrap() - 2.0 * PI > 2e-4);
        assert!(h2(1.9810, 1.9526, 0.0314).unwrap() - 2.0 * PI > 4e-4);
        assert!(h1(1.9458, 1.2488, 1.9810).unwrap() - 2.0 * PI > 3e-4);
        assert!(h2(1.98, 1.9458, 0.0314).unwrap() - 2.0 * PI > 6e-3);
    }

    #[test]
    fn dispatch_and_domain() {
        assert_eq!(h(HKind::H3, &[1.932, 1.23]), h3(1.932, 1.23));
        assert!(h(HKind::H3, &[1.9, 1.2, 1.0]).is_err());
        assert!(h1(2.1, 1.2, 1.9).is_err());
        assert!(h2(1.9, 1.9, 0.2).is_err());
    }

    #[test]
    fn increasing_in_first_argument() {
        let xs: Vec<f64> = (0..=20).map(|i| 1.9 + 0.005 * i as f64).collect();
        for w in xs.windows(2) {
            assert!(h1_raw(w[1], 1.3, 1.98) > h1_raw(w[0], 1.3, 1.98));
            assert!(h2_raw(w[1], 1.95, 0.03) > h2_raw(w[0], 1.95, 0.03));
            assert!(h3_raw(w[1], 1.3) > h3_raw(w[0], 1.3));
            assert!(h4_raw(w[1], 1.3, 1.95) > h4_raw(w[0], 1.3, 1.95));
        }
    }
}
