//! Combinatorial Ricci curvature and the extended Ricci flow
//! `dl/dt = K(l) l`, integrated in log-length coordinates.

mod integrator;

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::bounds::{self, BoundsError};
use crate::functional::{self, FunctionalError};
use crate::metric::{Metric, MetricError};
use crate::tetra::angles_unchecked;
use crate::triangulation::Triangulation;

use integrator::{doubled_step, step_factor};

/// Smallest valence for which the bound window is guaranteed.
pub const MIN_VALENCE: usize = 9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("invalid flow configuration: {0}")]
    InvalidConfig(String),
    #[error("curvature became non-finite at flow time {time}")]
    NonFinite { time: f64 },
    #[error("rate fit needs at least {needed} samples with positive residual, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
}

/// Per-class curvature `K_e = 2 pi - (sum of incident dihedral angles)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureVector(Vec<f64>);

impl CurvatureVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, k| m.max(k.abs()))
}

fn curvature_of_lengths(tri: &Triangulation, lengths: &[f64]) -> Vec<f64> {
    let mut k = vec![2.0 * PI; tri.edge_class_count()];
    for t in 0..tri.tet_count() {
        let alpha = angles_unchecked(&tri.pull_back(t, lengths));
        for (c, a) in tri.labels()[t].iter().zip(alpha) {
            k[*c] -= a;
        }
    }
    k
}

pub fn curvature(tri: &Triangulation, metric: &Metric) -> Result<CurvatureVector, FlowError> {
    metric.check_size(tri.edge_class_count())?;
    Ok(CurvatureVector(curvature_of_lengths(tri, metric.lengths())))
}

/// `[arccosh(1 + mu_v), arccosh(b_v)]`, the window the flow stays in when
/// every valence is at least 9.
pub fn bound_window(valence: usize) -> Result<(f64, f64), FlowError> {
    Ok((
        (1.0 + bounds::mu_n(valence)?).acosh(),
        bounds::b_n(valence)?.acosh(),
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialMetric {
    pub metric: Metric,
    /// Classes whose valence is below 9.
    pub hypothesis_violations: Vec<usize>,
}

/// Midpoint of `[arccosh(1 + mu_v), min(arccosh 1.9, arccosh b_v)]` for each
/// class. Classes of valence below 9 get the midpoint of
/// `[arccosh 1.13, arccosh 1.9]` and are listed as hypothesis violations.
pub fn default_initial_metric(tri: &Triangulation) -> Result<InitialMetric, FlowError> {
    let cap = 1.9f64.acosh();
    let mut lengths = Vec::with_capacity(tri.edge_class_count());
    let mut hypothesis_violations = Vec::new();
    for (class, &v) in tri.valences().iter().enumerate() {
        let (lo, hi) = if v >= MIN_VALENCE {
            let (lo, hi) = bound_window(v)?;
            (lo, hi.min(cap))
        } else {
            hypothesis_violations.push(class);
            (1.13f64.acosh(), cap)
        };
        if lo >= hi || lo.is_nan() || hi.is_nan() {
            return Err(FlowError::InvalidConfig(format!(
                "empty initial window for class {class} of valence {v}"
            )));
        }
        lengths.push(0.5 * (lo + hi));
    }
    Ok(InitialMetric {
        metric: Metric::new(lengths)?,
        hypothesis_violations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowConfig {
    /// Stop once `max |K_e|` is at or below this.
    pub residual_tolerance: f64,
    pub max_time: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Record every `trace_stride`-th accepted step (the first and last state
    /// are always recorded).
    pub trace_stride: usize,
    /// Local error tolerance of one step in log-length coordinates.
    pub step_tolerance: f64,
    /// Absolute tolerance for the co-volume quadrature behind `H`.
    pub quadrature_tolerance: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            residual_tolerance: 1e-10,
            max_time: 200.0,
            initial_step: 0.01,
            min_step: 1e-12,
            max_step: 0.25,
            trace_stride: 1,
            step_tolerance: 1e-11,
            quadrature_tolerance: functional::DEFAULT_TOLERANCE,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<(), FlowError> {
        let positive = [
            ("residual_tolerance", self.residual_tolerance),
            ("max_time", self.max_time),
            ("initial_step", self.initial_step),
            ("min_step", self.min_step),
            ("max_step", self.max_step),
            ("step_tolerance", self.step_tolerance),
            ("quadrature_tolerance", self.quadrature_tolerance),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(FlowError::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.min_step > self.max_step {
            return Err(FlowError::InvalidConfig(
                "min_step exceeds max_step".to_owned(),
            ));
        }
        if self.trace_stride == 0 {
            return Err(FlowError::InvalidConfig(
                "trace_stride must be at least 1".to_owned(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxTime,
    StepUnderflow,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowTrace {
    pub times: Vec<f64>,
    pub metrics: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub h_values: Vec<f64>,
    pub steps: usize,
    pub rejected_steps: usize,
    pub termination: Termination,
    pub converged: bool,
    pub final_metric: Metric,
    pub final_curvature: CurvatureVector,
    pub rate: Option<RateFit>,
}

impl FlowTrace {
    pub fn final_residual(&self) -> f64 {
        self.final_curvature.max_abs()
    }
}

struct Recorder<'a> {
    tri: &'a Triangulation,
    quadrature_tolerance: f64,
    times: Vec<f64>,
    metrics: Vec<Vec<f64>>,
    residuals: Vec<f64>,
    h_values: Vec<f64>,
}

impl Recorder<'_> {
    fn push(&mut self, t: f64, lengths: Vec<f64>, residual: f64) -> Result<(), FlowError> {
        if self.times.last() == Some(&t) {
            return Ok(());
        }
        let metric = Metric::new(lengths)?;
        let h = functional::total_h(self.tri, &metric, self.quadrature_tolerance)?;
        self.times.push(t);
        self.metrics.push(metric.into_inner());
        self.residuals.push(residual);
        self.h_values.push(h);
        Ok(())
    }
}

/// Integrates the flow from `l0`.
///
/// Works in `u = ln l`, where the flow reads `du/dt = K(exp u)`. Steps are
/// classical RK4 with step doubling; the two-half-step value is accepted when
/// the local error estimate is within `step_tolerance`. Stops when the
/// residual reaches `residual_tolerance`, when `max_time` is reached, or when
/// a rejected step would shrink below `min_step`; the trace is returned in
/// all three cases.
pub fn run_flow(
    tri: &Triangulation,
    l0: &Metric,
    config: &FlowConfig,
) -> Result<FlowTrace, FlowError> {
    config.validate()?;
    l0.check_size(tri.edge_class_count())?;

    let rhs = |u: &[f64]| -> Result<Vec<f64>, FlowError> {
        let l: Vec<f64> = u.iter().map(|v| v.exp()).collect();
        let k = curvature_of_lengths(tri, &l);
        if k.iter().all(|v| v.is_finite()) {
            Ok(k)
        } else {
            Err(FlowError::NonFinite { time: f64::NAN })
        }
    };

    let mut rec = Recorder {
        tri,
        quadrature_tolerance: config.quadrature_tolerance,
        times: Vec::new(),
        metrics: Vec::new(),
        residuals: Vec::new(),
        h_values: Vec::new(),
    };

    let mut t = 0.0;
    let mut u: Vec<f64> = l0.lengths().iter().map(|l| l.ln()).collect();
    let mut k = rhs(&u)?;
    let mut residual = max_abs(&k);
    rec.push(t, l0.lengths().to_vec(), residual)?;

    let mut h = config.initial_step.min(config.max_step);
    let mut steps = 0;
    let mut rejected = 0;
    let termination = loop {
        if residual <= config.residual_tolerance {
            break Termination::Converged;
        }
        if t >= config.max_time {
            break Termination::MaxTime;
        }
        let h_try = h.min(config.max_step).min(config.max_time - t);
        let step = doubled_step(&rhs, &u, &k, h_try).map_err(|e| match e {
            FlowError::NonFinite { .. } => FlowError::NonFinite { time: t },
            other => other,
        })?;
        let factor = step_factor(step.error, config.step_tolerance);
        if step.error > config.step_tolerance {
            rejected += 1;
            h = h_try * factor;
            if h < config.min_step {
                break Termination::StepUnderflow;
            }
            continue;
        }
        t = if h_try == config.max_time - t {
            config.max_time
        } else {
            t + h_try
        };
        u = step.next;
        k = rhs(&u)?;
        residual = max_abs(&k);
        steps += 1;
        h = h_try * factor;
        if steps % config.trace_stride == 0 {
            rec.push(t, u.iter().map(|v| v.exp()).collect(), residual)?;
        }
    };

    let final_lengths: Vec<f64> = u.iter().map(|v| v.exp()).collect();
    rec.push(t, final_lengths.clone(), residual)?;
    let final_metric = Metric::new(final_lengths)?;
    let rate = fit_log_residual(&rec.times, &rec.residuals).ok();
    Ok(FlowTrace {
        times: rec.times,
        metrics: rec.metrics,
        residuals: rec.residuals,
        h_values: rec.h_values,
        steps,
        rejected_steps: rejected,
        converged: termination == Termination::Converged,
        termination,
        final_metric,
        final_curvature: CurvatureVector(k),
        rate,
    })
}

pub const MIN_RATE_SAMPLES: usize = 10;

/// Least-squares fit of `ln(residual)` against time.
///
/// Uses the samples with `t >= t_last / 2`, or the last ten samples if that
/// window holds fewer than ten. Samples with zero residual are dropped first.
pub fn fit_log_residual(times: &[f64], residuals: &[f64]) -> Result<RateFit, FlowError> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(residuals)
        .filter(|(_, r)| **r > 0.0 && r.is_finite())
        .map(|(t, r)| (*t, r.ln()))
        .collect();
    if pts.len() < MIN_RATE_SAMPLES {
        return Err(FlowError::InsufficientSamples {
            needed: MIN_RATE_SAMPLES,
            got: pts.len(),
        });
    }
    let t_last = pts[pts.len() - 1].0;
    let mut window: Vec<(f64, f64)> = pts
        .iter()
        .copied()
        .filter(|p| p.0 >= 0.5 * t_last)
        .collect();
    if window.len() < MIN_RATE_SAMPLES {
        window = pts[pts.len() - MIN_RATE_SAMPLES..].to_vec();
    }
    let n = window.len() as f64;
    let mt = window.iter().map(|p| p.0).sum::<f64>() / n;
    let my = window.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = window.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = window.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let slope = if stt > 0.0 { sty / stt } else { 0.0 };
    let intercept = my - slope * mt;
    let ss_tot: f64 = window.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = window
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        samples: window.len(),
    })
}

pub fn convergence_rate(trace: &FlowTrace) -> Result<RateFit, FlowError> {
    fit_log_residual(&trace.times, &trace.residuals)
}
