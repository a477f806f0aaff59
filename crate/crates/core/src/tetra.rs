//! Dihedral angles of a single generalized hyper-ideal tetrahedron.
//!
//! Lengths are indexed in the local edge order `(12, 13, 14, 23, 24, 34)`.
//! Angles are computed from cosh-lengths through `phi` and clamped into
//! `[-1, 1]` before `acos`, which extends them continuously to every length
//! vector in `R^6`.

use once_cell::sync::Lazy;
use thiserror::Error;

use crate::triangulation::{orientation_at, EdgeOrientation, LocalEdge};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("edge {index} has non-finite value {value}")]
    NonFinite { index: usize, value: f64 },
    #[error("edge {index} has non-positive length {value}")]
    NonPositiveLength { index: usize, value: f64 },
    #[error("cosh-length {value} of edge {index} is below 1")]
    CoshBelowOne { index: usize, value: f64 },
}

/// Six edge lengths. Negative entries are allowed and act as zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeLengths6(pub [f64; 6]);

impl EdgeLengths6 {
    pub fn uniform(l: f64) -> Self {
        Self([l; 6])
    }

    /// Componentwise `max(l, 0)`.
    pub fn positive_part(&self) -> [f64; 6] {
        self.0.map(|l| l.max(0.0))
    }

    pub fn cosh(&self) -> CoshLengths6 {
        CoshLengths6(self.positive_part().map(f64::cosh))
    }

    fn check_finite(&self) -> Result<(), GeometryError> {
        match self.0.iter().position(|l| !l.is_finite()) {
            Some(index) => Err(GeometryError::NonFinite {
                index,
                value: self.0[index],
            }),
            None => Ok(()),
        }
    }
}

/// Cosh-lengths `x_i = cosh(l_i^+)`, each at least 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoshLengths6(pub [f64; 6]);

impl CoshLengths6 {
    pub fn new(x: [f64; 6]) -> Result<Self, GeometryError> {
        for (index, &value) in x.iter().enumerate() {
            if !value.is_finite() {
                return Err(GeometryError::NonFinite { index, value });
            }
            if value < 1.0 {
                return Err(GeometryError::CoshBelowOne { index, value });
            }
        }
        Ok(Self(x))
    }
}

/// Extended dihedral angles with the pre-clamp cosines they came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleSet {
    pub alpha: [f64; 6],
    pub phi: [f64; 6],
}

impl AngleSet {
    /// Sum of the three angles at the edges meeting local vertex `v`.
    pub fn vertex_sum(&self, v: usize) -> f64 {
        LocalEdge::ALL
            .iter()
            .filter(|e| {
                let (a, b) = e.vertices();
                a == v || b == v
            })
            .map(|e| self.alpha[e.index()])
            .sum()
    }
}

/// The `phi` expression on already-ordered cosh-lengths `(x1, ..., x6)`.
///
/// No domain checks; callers in hot loops are expected to pass values >= 1.
#[inline]
pub fn phi_formula(x: [f64; 6]) -> f64 {
    let [x1, x2, x3, x4, x5, x6] = x;
    let num = x2 * x3 + x5 * x6 + x1 * x2 * x5 + x1 * x3 * x6 - x1 * x1 * x4 + x4;
    let d1 = (2.0 * x1 * x2 * x6 + x1 * x1 + x2 * x2 + x6 * x6 - 1.0).sqrt();
    let d2 = (2.0 * x1 * x3 * x5 + x1 * x1 + x3 * x3 + x5 * x5 - 1.0).sqrt();
    num / (d1 * d2)
}

/// `phi` for the edge `orientation.get(0)`, reading `x` through `orientation`.
pub fn phi(x: &CoshLengths6, orientation: &EdgeOrientation) -> Result<f64, GeometryError> {
    let x = CoshLengths6::new(x.0)?;
    Ok(phi_formula(orientation.permute(&x.0)))
}

static ORIENTATION_TABLE: Lazy<[[usize; 6]; 6]> =
    Lazy::new(|| LocalEdge::ALL.map(|e| orientation_at(e).edges().map(LocalEdge::index)));

/// Pre-clamp `phi` value at every local edge, without domain checks.
pub fn phi_all(x: &[f64; 6]) -> [f64; 6] {
    let table = &*ORIENTATION_TABLE;
    std::array::from_fn(|e| phi_formula(table[e].map(|k| x[k])))
}

fn clamped_acos(p: f64) -> f64 {
    p.clamp(-1.0, 1.0).acos()
}

/// Extended dihedral angles, without the finiteness check.
pub fn angles_unchecked(l: &[f64; 6]) -> [f64; 6] {
    let x = l.map(|v| v.max(0.0).cosh());
    phi_all(&x).map(clamped_acos)
}

pub fn dihedral_angles(l: &EdgeLengths6) -> Result<AngleSet, GeometryError> {
    l.check_finite()?;
    let phi = phi_all(&l.cosh().0);
    Ok(AngleSet {
        alpha: phi.map(clamped_acos),
        phi,
    })
}

/// Lengths at or below this value always give a hyper-ideal tetrahedron.
pub fn shortcut_bound() -> f64 {
    3.0f64.acosh()
}

/// True iff every pre-clamp `phi` lies strictly inside `(-1, 1)`.
pub fn is_hyperideal(l: &EdgeLengths6) -> Result<bool, GeometryError> {
    l.check_finite()?;
    if let Some(index) = l.0.iter().position(|&v| v <= 0.0) {
        return Err(GeometryError::NonPositiveLength {
            index,
            value: l.0[index],
        });
    }
    if l.0.iter().all(|&v| v <= shortcut_bound()) {
        return Ok(true);
    }
    Ok(phi_inside_open_interval(l))
}

/// The full `phi` check with no shortcut.
pub fn phi_inside_open_interval(l: &EdgeLengths6) -> bool {
    phi_all(&l.cosh().0).iter().all(|&p| p > -1.0 && p < 1.0)
}
