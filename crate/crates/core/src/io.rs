//! File formats: triangulation input, metric overrides, run reports, and a
//! JSON formatter that prints every float with 17 significant digits.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::flow::{RateFit, Termination};
use crate::triangulation::{FaceGluing, Triangulation, TriangulationError};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("\"tetrahedra\" is {declared} but {found} entries were given")]
    CountMismatch { declared: usize, found: usize },
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error("initial metric override for class {class} is out of range ({classes} classes)")]
    OverrideClass { class: usize, classes: usize },
    #[error("initial metric key {0:?} is not a class index")]
    OverrideKey(String),
    #[error("initial metric has {got} entries, expected {expected}")]
    OverrideLength { expected: usize, got: usize },
}

/// On-disk triangulation description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "snake_case")]
pub enum TriangulationFile {
    EdgeLabels {
        tetrahedra: usize,
        edge_labels: Vec<[usize; 6]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial_metric: Option<MetricOverrides>,
    },
    FaceGluings {
        tetrahedra: usize,
        gluings: Vec<FaceGluing>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial_metric: Option<MetricOverrides>,
    },
}

/// Initial lengths: a full per-class array, the `final_lengths` of an earlier
/// run report, or a map from class index to length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricOverrides {
    Full(Vec<f64>),
    Report { final_lengths: Vec<f64> },
    Partial(BTreeMap<String, f64>),
}

impl MetricOverrides {
    /// Applies the overrides on top of `base`.
    pub fn apply(&self, base: &mut [f64]) -> Result<(), InputError> {
        let full = |v: &Vec<f64>, base: &mut [f64]| {
            if v.len() != base.len() {
                return Err(InputError::OverrideLength {
                    expected: base.len(),
                    got: v.len(),
                });
            }
            base.copy_from_slice(v);
            Ok(())
        };
        match self {
            MetricOverrides::Full(v) => full(v, base),
            MetricOverrides::Report { final_lengths } => full(final_lengths, base),
            MetricOverrides::Partial(map) => {
                for (key, &l) in map {
                    let class: usize = key
                        .parse()
                        .map_err(|_| InputError::OverrideKey(key.clone()))?;
                    let classes = base.len();
                    let slot = base
                        .get_mut(class)
                        .ok_or(InputError::OverrideClass { class, classes })?;
                    *slot = l;
                }
                Ok(())
            }
        }
    }
}

impl TriangulationFile {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<Triangulation, InputError> {
        match self {
            TriangulationFile::EdgeLabels {
                tetrahedra,
                edge_labels,
                ..
            } => {
                if *tetrahedra != edge_labels.len() {
                    return Err(InputError::CountMismatch {
                        declared: *tetrahedra,
                        found: edge_labels.len(),
                    });
                }
                Ok(Triangulation::from_edge_labels(edge_labels.clone())?)
            }
            TriangulationFile::FaceGluings {
                tetrahedra,
                gluings,
                ..
            } => Ok(Triangulation::from_gluings(*tetrahedra, gluings.clone())?),
        }
    }

    pub fn initial_metric(&self) -> Option<&MetricOverrides> {
        match self {
            TriangulationFile::EdgeLabels { initial_metric, .. }
            | TriangulationFile::FaceGluings { initial_metric, .. } => initial_metric.as_ref(),
        }
    }
}

pub fn read_file(path: &str) -> Result<Vec<u8>, InputError> {
    std::fs::read(path).map_err(|source| InputError::Read {
        path: path.to_owned(),
        source,
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Per-class summary in a run report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassReport {
    pub class: usize,
    pub valence: usize,
    pub length: f64,
    pub cosh_length: f64,
    pub curvature: f64,
    /// `[arccosh(1 + mu_v), arccosh(b_v)]`, for valence 9 and above.
    pub window: Option<[f64; 2]>,
    pub in_window: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub input_digest: String,
    pub tetrahedra: usize,
    pub edge_classes: usize,
    pub converged: bool,
    pub termination: Termination,
    pub iterations: usize,
    pub rejected_steps: usize,
    pub flow_time: f64,
    pub residual_tolerance: f64,
    pub final_residual: f64,
    pub initial_lengths: Vec<f64>,
    pub final_lengths: Vec<f64>,
    pub final_cosh_lengths: Vec<f64>,
    pub final_curvatures: Vec<f64>,
    pub classes: Vec<ClassReport>,
    pub hyperideal: Vec<bool>,
    pub h_initial: f64,
    pub h_final: f64,
    pub rate: Option<RateFit>,
    pub hypothesis_violations: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Formats a float with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Pretty JSON whose floats carry 17 significant digits.
struct Json17(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for Json17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt17(v).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(v))
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json17<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        Json17(serde_json::ser::PrettyFormatter::new()),
    );
    value
        .serialize(&mut ser)
        .expect("serializing to memory does not fail");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}
