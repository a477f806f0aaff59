//! Co-volume, the `H` functional and volume recovery.
//!
//! The co-volume of a tetrahedron is the line integral of the closed 1-form
//! `sum_i alpha_i dl_i` from the origin, plus the constant `16 Lambda(pi/4)`.
//! Its gradient is the vector of extended dihedral angles.

mod lobachevsky;
mod quadrature;

use std::f64::consts::PI;

use thiserror::Error;

use crate::metric::{Metric, MetricError};
use crate::tetra::{angles_unchecked, is_hyperideal, EdgeLengths6, GeometryError};
use crate::triangulation::Triangulation;

pub use lobachevsky::{clausen2, lobachevsky};
pub use quadrature::{integrate, Integral, QuadratureError};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionalError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("co-volume quadrature failed: {0}")]
    Quadrature(#[from] QuadratureError),
    #[error("lengths do not describe a hyper-ideal tetrahedron")]
    NotHyperideal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovolumeResult {
    pub value: f64,
    pub quadrature_error_estimate: f64,
}

/// `cov(0, ..., 0) = 16 Lambda(pi/4)`.
pub fn covolume_at_origin() -> f64 {
    16.0 * lobachevsky(PI / 4.0)
}

fn check_finite(l: &[f64; 6]) -> Result<(), GeometryError> {
    match l.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(GeometryError::NonFinite {
            index,
            value: l[index],
        }),
        None => Ok(()),
    }
}

/// Integral of `sum alpha_i dl_i` along the straight segment `from -> to`.
pub fn one_form_integral(
    from: &EdgeLengths6,
    to: &EdgeLengths6,
    tolerance: f64,
) -> Result<Integral, FunctionalError> {
    check_finite(&from.0)?;
    check_finite(&to.0)?;
    let d: [f64; 6] = std::array::from_fn(|i| to.0[i] - from.0[i]);
    let integrand = |t: f64| {
        let p: [f64; 6] = std::array::from_fn(|i| from.0[i] + t * d[i]);
        let a = angles_unchecked(&p);
        (0..6).map(|i| a[i] * d[i]).sum::<f64>()
    };
    Ok(integrate(integrand, 0.0, 1.0, tolerance)?)
}

/// Co-volume of one tetrahedron to absolute tolerance `tolerance`.
pub fn covolume_tet(l: &EdgeLengths6, tolerance: f64) -> Result<CovolumeResult, FunctionalError> {
    let r = one_form_integral(&EdgeLengths6([0.0; 6]), l, tolerance)?;
    Ok(CovolumeResult {
        value: covolume_at_origin() + r.value,
        quadrature_error_estimate: r.error_estimate,
    })
}

/// `H(l) = sum_tets cov(l|tet) - 2 pi sum_e l_e`.
///
/// Each tetrahedron gets `tolerance / tet_count`, so the summed quadrature
/// error stays within `tolerance`. Terms are summed in tetrahedron order.
pub fn total_h(
    tri: &Triangulation,
    metric: &Metric,
    tolerance: f64,
) -> Result<f64, FunctionalError> {
    metric.check_size(tri.edge_class_count())?;
    let per_tet = tolerance / tri.tet_count() as f64;
    let mut cov = 0.0;
    for t in 0..tri.tet_count() {
        let l = EdgeLengths6(tri.pull_back(t, metric.lengths()));
        cov += covolume_tet(&l, per_tet)?.value;
    }
    Ok(cov - 2.0 * PI * metric.lengths().iter().sum::<f64>())
}

/// Hyperbolic volume `(cov - sum alpha_i l_i) / 2` of a hyper-ideal tetrahedron.
pub fn volume_tet(l: &EdgeLengths6, tolerance: f64) -> Result<f64, FunctionalError> {
    if !is_hyperideal(l)? {
        return Err(FunctionalError::NotHyperideal);
    }
    let cov = covolume_tet(l, tolerance)?.value;
    let a = angles_unchecked(&l.0);
    let pairing: f64 = (0..6).map(|i| a[i] * l.0[i]).sum();
    Ok(0.5 * (cov - pairing))
}
