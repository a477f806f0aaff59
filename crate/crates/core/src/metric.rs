//! Per-edge-class length vectors.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("metric has no entries")]
    Empty,
    #[error("length {value} of edge class {index} is not a positive finite number")]
    InvalidLength { index: usize, value: f64 },
    #[error("metric has {got} entries but the triangulation has {expected} edge classes")]
    SizeMismatch { expected: usize, got: usize },
}

/// Positive finite length per edge class.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    lengths: Vec<f64>,
}

impl Metric {
    pub fn new(lengths: Vec<f64>) -> Result<Self, MetricError> {
        if lengths.is_empty() {
            return Err(MetricError::Empty);
        }
        if let Some(index) = lengths.iter().position(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(MetricError::InvalidLength {
                index,
                value: lengths[index],
            });
        }
        Ok(Self { lengths })
    }

    pub fn uniform(classes: usize, length: f64) -> Result<Self, MetricError> {
        Self::new(vec![length; classes])
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn cosh_lengths(&self) -> Vec<f64> {
        self.lengths.iter().map(|l| l.cosh()).collect()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.lengths
    }

    pub(crate) fn check_size(&self, expected: usize) -> Result<(), MetricError> {
        if self.lengths.len() != expected {
            return Err(MetricError::SizeMismatch {
                expected,
                got: self.lengths.len(),
            });
        }
        Ok(())
    }
}
