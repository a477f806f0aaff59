//! Numerical verification suites.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;

use crate::tetra::phi_formula;

use super::dd::Dd;

use super::hfun::{h1_raw, h2_raw, h3_raw, h4_raw, B_FIXED};
use super::table::{table1_checksum, Table1Row, TABLE1, TABLE1_SHA256};
use super::{
    b_n, beta_unchecked, c10, c9, cos_2pi_over, eta_unchecked, f_xi, g_function, mu_n,
    psi_unchecked, xi_infinity, CheckResult, VerificationReport,
};

const TWO_PI: f64 = 2.0 * PI;
/// Finite-difference step for derivative checks.
const FD_STEP: f64 = 1e-6;
/// Margins down to `-GRID_SLACK` pass in grid suites.
const GRID_SLACK: f64 = 1e-9;

/// Per-axis cap for the six-dimensional grids, which are subsampled at this
/// resolution when a finer one is requested.
const SIX_D_CAP: usize = 16;

fn phi(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> f64 {
    phi_formula([a, b, c, d, e, f])
}

/// Row check (f): `max{phi(2,q,q,1+delta,p,p), phi(2,q,p,1+delta,p,q)}`.
fn final_phi(r: &Table1Row) -> f64 {
    let s = 1.0 + r.delta;
    phi(2.0, r.q, r.q, s, r.p, r.p).max(phi(2.0, r.q, r.p, s, r.p, r.q))
}

fn row_checks(r: &Table1Row) -> Vec<CheckResult> {
    let label = r.label();
    let name = |k: &str| format!("table1[{label}].{k}");
    let mut out = Vec::with_capacity(7);

    // b_n decreases in n, so the smallest valence of the range is the worst.
    let b_worst = b_n(r.n_min).expect("rows start at valence 9 or above");
    out.push(CheckResult::new(
        name("gamma_ge_b"),
        &label,
        r.gamma - b_worst,
    ));

    // mu_n decreases to 0, so the largest valence (or the limit) is the worst.
    let mu_worst = match r.n_max {
        Some(m) => mu_n(m).expect("valence at least 9"),
        None => 0.0,
    };
    out.push(CheckResult::new(
        name("delta_le_mu"),
        &label,
        mu_worst - r.delta,
    ));

    out.push(CheckResult::new(
        name("h1_ge_2pi"),
        &label,
        h1_raw(r.d, r.gamma, B_FIXED) - TWO_PI,
    ));
    out.push(CheckResult::new(
        name("h3_ge_2pi"),
        &label,
        h3_raw(r.q, r.gamma) - TWO_PI,
    ));

    let h4_margin = h4_raw(r.p, r.gamma, r.d) - TWO_PI;
    if r.p == 2.0 {
        out.push(
            CheckResult::new(name("h4_ge_2pi_or_p_eq_2"), &label, h4_margin).with_verdict(true),
        );
        out.push(CheckResult::new(name("h4_at_p_eq_2"), &label, h4_margin).informational());
    } else {
        out.push(CheckResult::new(
            name("h4_ge_2pi_or_p_eq_2"),
            &label,
            h4_margin,
        ));
    }

    out.push(
        CheckResult::new(name("final_phi_lt_cos_2pi_9"), &label, c9() - final_phi(r)).strict(),
    );
    out
}

/// Re-derives every inequality for the given rows.
pub fn verify_rows(rows: &[Table1Row]) -> VerificationReport {
    let start = Instant::now();
    let checks = rows.iter().flat_map(row_checks).collect();
    VerificationReport::new("table1", checks, start.elapsed().as_secs_f64())
}

/// Checksum of the embedded table followed by [`verify_rows`] on it.
pub fn verify_table1() -> VerificationReport {
    let start = Instant::now();
    let digest = table1_checksum(&TABLE1);
    let checksum = CheckResult::new("table1.checksum", digest.clone(), 0.0)
        .with_verdict(digest == TABLE1_SHA256);
    let mut checks = vec![checksum];
    checks.extend(verify_rows(&TABLE1).checks);
    VerificationReport::new("table1", checks, start.elapsed().as_secs_f64())
}

/// Scalar constants used in the upper-bound bootstrap and in the case where
/// a valence-9 edge has a neighbour of higher valence.
pub fn verify_constants() -> VerificationReport {
    let start = Instant::now();
    let c9 = c9();
    let b = |n| b_n(n).expect("valence at least 9");
    let max_pair =
        |g: f64, q: f64, s: f64| phi(2.0, g, q, s, 2.0, 2.0).max(phi(2.0, g, 2.0, s, 2.0, q));
    let eta_at = |xi, n| eta_unchecked(xi, cos_2pi_over(n));
    let checks = vec![
        CheckResult::new(
            "bootstrap.h1_round1",
            "h1(1.9526, 1.2488, 2)",
            h1_raw(1.9526, 1.2488, 2.0) - TWO_PI,
        ),
        CheckResult::new(
            "bootstrap.h2_round1",
            "h2(1.9810, 1.9526, 0.0314)",
            h2_raw(1.9810, 1.9526, 0.0314) - TWO_PI,
        ),
        CheckResult::new(
            "bootstrap.h1_round2",
            "h1(1.9458, 1.2488, 1.9810)",
            h1_raw(1.9458, 1.2488, 1.9810) - TWO_PI,
        ),
        CheckResult::new(
            "bootstrap.h2_round2",
            "h2(1.9800, 1.9458, 0.0314)",
            h2_raw(1.98, 1.9458, 0.0314) - TWO_PI,
        ),
        CheckResult::new("xi_infinity_ge_0.125", "xi_inf", xi_infinity() - 0.125),
        CheckResult::new("neighbor_k_ge_11.gamma_ge_b11", "1.7 >= b_11", 1.7 - b(11)),
        CheckResult::new(
            "neighbor_k_ge_11.phi",
            "phi(2, 1.7, 2, 1, 2, 2) < c9",
            c9 - phi(2.0, 1.7, 2.0, 1.0, 2.0, 2.0),
        )
        .strict(),
        CheckResult::new("neighbor_k10.gamma_ge_b10", "1.845 >= b_10", 1.845 - b(10)),
        CheckResult::new(
            "neighbor_k10.n_lt_19.delta",
            "0.027 <= eta_0.125(cos(2pi/18))",
            eta_at(0.125, 18) - 0.027,
        ),
        CheckResult::new(
            "neighbor_k10.n_lt_19.phi",
            "gamma 1.845, b 1.98, delta 0.027",
            c9 - max_pair(1.845, B_FIXED, 1.027),
        )
        .strict(),
        CheckResult::new(
            "neighbor_k10.n_19_29.delta",
            "0.01 <= eta_0.125(cos(2pi/29))",
            eta_at(0.125, 29) - 0.01,
        ),
        CheckResult::new("neighbor_k10.n_19_29.gamma", "1.23 >= b_19", 1.23 - b(19)),
        CheckResult::new(
            "neighbor_k10.n_19_29.q",
            "h3(1.932, 1.23) >= 2pi",
            h3_raw(1.932, 1.23) - TWO_PI,
        ),
        CheckResult::new(
            "neighbor_k10.n_19_29.phi",
            "gamma 1.845, q 1.932, delta 0.01",
            c9 - max_pair(1.845, 1.932, 1.01),
        )
        .strict(),
        CheckResult::new("neighbor_k10.n_ge_30.gamma", "1.09 >= b_30", 1.09 - b(30)),
        CheckResult::new(
            "neighbor_k10.n_ge_30.q",
            "h3(1.923, 1.09) >= 2pi",
            h3_raw(1.923, 1.09) - TWO_PI,
        ),
        CheckResult::new(
            "neighbor_k10.n_ge_30.phi",
            "gamma 1.845, q 1.923, delta 0",
            c9 - max_pair(1.845, 1.923, 1.0),
        )
        .strict(),
    ];
    VerificationReport::new("constants", checks, start.elapsed().as_secs_f64())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridOptions {
    /// Points per axis; at least 8.
    pub resolution: usize,
    /// Worker threads; `None` lets the pool pick.
    pub jobs: Option<usize>,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            resolution: 16,
            jobs: None,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// `n` uniform points on `[lo, hi)`.
fn half_open(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect()
}

/// Derivative of `f` at `x`, where `f` is smooth on `[lo, hi]`. Central
/// differences inside, second-order one-sided stencils near the ends.
fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, lo: f64, hi: f64) -> f64 {
    let h = FD_STEP;
    if x - h >= lo && x + h <= hi {
        (f(x + h) - f(x - h)) / (2.0 * h)
    } else if x + 2.0 * h <= hi {
        (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)
    } else {
        (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h)
    }
}

/// `phi` in double-double arithmetic. On faces of the cube where `phi` is
/// constant (for instance `x1 = x4 = 1`, where it is identically 1) the f64
/// rounding noise, divided by the finite-difference step, is of order 1e-9;
/// this keeps the stencil's own noise far below the check's slack.
fn phi_dd(x: [f64; 6]) -> Dd {
    let [x1, x2, x3, x4, x5, x6] = x.map(Dd::from_f64);
    let num = x2 * x3 + x5 * x6 + x1 * x2 * x5 + x1 * x3 * x6 - x1 * x1 * x4 + x4;
    let d1 = (x1 * x2 * x6 * 2.0 + x1 * x1 + x2 * x2 + x6 * x6 - 1.0).sqrt();
    let d2 = (x1 * x3 * x5 * 2.0 + x1 * x1 + x3 * x3 + x5 * x5 - 1.0).sqrt();
    num / (d1 * d2)
}

/// [`derivative`] for a double-double valued function.
fn derivative_dd<F: Fn(f64) -> Dd>(f: F, x: f64, lo: f64, hi: f64) -> f64 {
    let h = FD_STEP;
    let d = if x - h >= lo && x + h <= hi {
        (f(x + h) - f(x - h)) / (2.0 * h)
    } else if x + 2.0 * h <= hi {
        (f(x) * -3.0 + f(x + h) * 4.0 - f(x + 2.0 * h)) / (2.0 * h)
    } else {
        (f(x) * 3.0 - f(x - h) * 4.0 + f(x - 2.0 * h)) / (2.0 * h)
    };
    d.to_f64()
}

#[derive(Clone, Debug)]
struct Worst {
    margin: f64,
    index: u64,
    point: Vec<f64>,
}

impl Worst {
    fn identity() -> Self {
        Self {
            margin: f64::INFINITY,
            index: u64::MAX,
            point: Vec::new(),
        }
    }

    /// Smaller margin wins, NaN counts as the smallest, ties go to the lower
    /// index. This makes the parallel reduction order-independent.
    fn pick(a: Worst, b: Worst) -> Worst {
        let key = |w: &Worst| {
            if w.margin.is_nan() {
                f64::NEG_INFINITY
            } else {
                w.margin
            }
        };
        match key(&a).total_cmp(&key(&b)) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal => {
                if a.index <= b.index {
                    a
                } else {
                    b
                }
            }
        }
    }
}

/// Minimum of `margin` over the mixed-radix grid `axes`, in parallel. The
/// closure may return `None` to skip a point outside the check's box.
fn grid_min<F>(axes: &[Vec<f64>], margin: F) -> (Worst, u64)
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    let total: u64 = axes.iter().map(|a| a.len() as u64).product();
    let (worst, count) = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut rem = idx;
            let mut point = vec![0.0; axes.len()];
            for (k, axis) in axes.iter().enumerate().rev() {
                let len = axis.len() as u64;
                point[k] = axis[(rem % len) as usize];
                rem /= len;
            }
            match margin(&point) {
                Some(m) => (
                    Worst {
                        margin: m,
                        index: idx,
                        point,
                    },
                    1u64,
                ),
                None => (Worst::identity(), 0),
            }
        })
        .reduce(
            || (Worst::identity(), 0),
            |(wa, ca), (wb, cb)| (Worst::pick(wa, wb), ca + cb),
        );
    (worst, count)
}

fn grid_check<F>(
    name: &str,
    domain: &str,
    resolution: usize,
    axes: &[Vec<f64>],
    margin: F,
) -> CheckResult
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    let (worst, samples) = grid_min(axes, margin);
    CheckResult::new(name, domain, worst.margin)
        .with_slack(GRID_SLACK)
        .with_grid(resolution, samples, worst.point)
}

type JFn = fn(f64, f64, f64, f64) -> f64;

/// The ten one-variable slices of `phi` that decrease on `[1, 2]`, as
/// functions of `(x, a, c, d)`.
const J_FUNCTIONS: [(&str, JFn); 10] = [
    ("j1", |x, a, c, d| phi(x, a, d, c, 2.0, 2.0)),
    ("j2", |x, a, c, d| phi(x, a, 2.0, c, 2.0, d)),
    ("j3", |x, a, c, d| phi(x, a, x, c, 2.0, d)),
    ("j4", |x, a, c, d| phi(x, a, d, c, 2.0, x)),
    ("j5", |x, a, _c, _d| phi(x, a, x, x, 2.0, 2.0)),
    ("j6", |x, a, _c, _d| phi(x, a, 2.0, x, 2.0, x)),
    ("j7", |x, _a, c, _d| phi(x, x, x, c, 2.0, 2.0)),
    ("j8", |x, _a, c, _d| phi(x, x, 2.0, c, 2.0, x)),
    ("j9", |x, _a, _c, _d| phi(x, x, x, x, 2.0, 2.0)),
    ("j10", |x, _a, _c, _d| phi(x, x, 2.0, x, 2.0, x)),
];

fn j_checks(res: usize) -> Vec<CheckResult> {
    let unit = linspace(1.0, 2.0, res);
    let axes = vec![unit.clone(), unit.clone(), unit.clone(), unit];
    J_FUNCTIONS
        .iter()
        .map(|(name, j)| {
            grid_check(
                &format!("decreasing.{name}"),
                "x, a, c, d in [1, 2]; margin = -dj/dx",
                res,
                &axes,
                |p| {
                    let (a, c, d) = (p[1], p[2], p[3]);
                    Some(-derivative(|x| j(x, a, c, d), p[0], 1.0, 2.0))
                },
            )
        })
        .collect()
}

fn phi_partial_checks(res: usize) -> Vec<CheckResult> {
    let unit = linspace(1.0, 2.0, res);
    let axes = vec![unit; 6];
    [1usize, 2, 4, 5]
        .iter()
        .map(|&j| {
            grid_check(
                &format!("phi_increasing_in_x{}", j + 1),
                "x in [1, 2]^6; margin = dphi/dx_j",
                res,
                &axes,
                |p| {
                    let x = [p[0], p[1], p[2], p[3], p[4], p[5]];
                    Some(derivative_dd(
                        |t| {
                            let mut x = x;
                            x[j] = t;
                            phi_dd(x)
                        },
                        p[j],
                        1.0,
                        2.0,
                    ))
                },
            )
        })
        .collect()
}

fn f_decreasing_check(res: usize) -> CheckResult {
    let axis = linspace(0.0, 0.13, res);
    grid_check(
        "f_xi_decreasing",
        "xi, delta in [0, 0.13]; margin = -df/ddelta",
        res,
        &[axis.clone(), axis],
        |p| Some(-derivative(|d| f_xi(p[0], d), p[1], 0.0, 0.13)),
    )
}

/// `psi_xi >= f_{eta_xi(c9)}` with every `y_i = cos(2 pi / n_i)`,
/// `n_i in 9..=40`. The `eta` and `beta` values are tabulated per `xi`.
fn psi_lower_bound_check(res: usize) -> CheckResult {
    let ns: Vec<usize> = (9..=40).collect();
    let ys: Vec<f64> = ns.iter().map(|&n| cos_2pi_over(n)).collect();
    let xis = [0.0, 0.065, 0.125, xi_infinity(), 0.13];
    let deltas = linspace(0.0, 0.13, res);
    let betas: Vec<f64> = ys.iter().map(|&y| beta_unchecked(y)).collect();
    let etas: Vec<Vec<f64>> = xis
        .iter()
        .map(|&xi| ys.iter().map(|&y| eta_unchecked(xi, y)).collect())
        .collect();
    let idx: Vec<f64> = (0..ns.len()).map(|i| i as f64).collect();
    let xi_idx: Vec<f64> = (0..xis.len()).map(|i| i as f64).collect();
    let axes = vec![xi_idx, deltas, idx.clone(), idx.clone(), idx.clone(), idx];
    let c9 = c9();
    let mut check = grid_check(
        "psi_ge_f_eta9",
        "xi in {0, 0.065, 0.125, xi_inf, 0.13}, delta in [0, 0.13], y_i = cos(2pi/n_i), n_i in 9..=40",
        res,
        &axes,
        |p| {
            let k = p[0] as usize;
            let delta = p[1];
            let i = [p[2] as usize, p[3] as usize, p[4] as usize, p[5] as usize];
            let psi = g_function(delta, i.map(|j| etas[k][j]), i.map(|j| betas[j]));
            Some(psi - f_xi(eta_unchecked(xis[k], c9), delta))
        },
    );
    // Report the sample in (xi, delta, n2, n3, n5, n6) form.
    if let Some(pt) = check.worst_at.as_mut() {
        if pt.len() == 6 {
            pt[0] = xis[pt[0] as usize];
            for v in pt.iter_mut().skip(2) {
                *v = ns[*v as usize] as f64;
            }
        }
    }
    check
}

/// `y` grid on `[c9, 1)` with `c10` inserted so both closed boxes around the
/// branch point of `beta` are sampled.
fn y_axis(res: usize) -> Vec<f64> {
    let mut ys = half_open(c9(), 1.0, res);
    ys.push(c10());
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    ys
}

/// Derivative of `psi` in `y_slot` (0..4 for `y2, y3, y5, y6`) on the branch
/// of `beta` selected by `upper`.
fn psi_partial(xi: f64, delta: f64, y: [f64; 4], slot: usize, upper: bool) -> f64 {
    let (lo, hi) = if upper { (c10(), 1.0) } else { (c9(), c10()) };
    derivative(
        |t| {
            let mut yy = y;
            yy[slot] = t;
            psi_unchecked(xi, delta, yy)
        },
        y[slot],
        lo,
        hi.min(1.0 - 1e-12),
    )
}

fn psi_inf_checks(res: usize) -> Vec<CheckResult> {
    let xs = linspace(0.0, 0.13, res);
    let ys = y_axis(res);
    let axes = vec![xs.clone(), xs, ys.clone(), ys.clone(), ys.clone(), ys];
    let c10 = c10();
    let inf1 = grid_check(
        "psi_inf1.dpsi_dy2",
        "xi, delta in [0, 0.13]; y in [c9, 1) with y2 >= max(y6, c10)",
        res,
        &axes,
        |p| {
            let y = [p[2], p[3], p[4], p[5]];
            (y[0] >= y[3].max(c10)).then(|| psi_partial(p[0], p[1], y, 0, true))
        },
    );
    let inf2 = grid_check(
        "psi_inf2.dpsi_dy2_dy6",
        "xi, delta in [0, 0.13]; y in [c9, 1) with y2, y6 <= c10; margin = min of both partials",
        res,
        &axes,
        |p| {
            let y = [p[2], p[3], p[4], p[5]];
            (y[0] <= c10 && y[3] <= c10).then(|| {
                psi_partial(p[0], p[1], y, 0, false).min(psi_partial(p[0], p[1], y, 3, false))
            })
        },
    );
    vec![inf1, inf2]
}

fn run_grid(res: usize) -> Vec<CheckResult> {
    let mut checks = j_checks(res);
    let sub = res.min(SIX_D_CAP);
    checks.extend(phi_partial_checks(sub));
    checks.push(f_decreasing_check(res));
    checks.push(psi_lower_bound_check(res));
    checks.extend(psi_inf_checks(sub));
    checks
}

/// Samples the monotonicity and lower-bound inequalities on uniform grids.
///
/// Resolutions below 8 are raised to 8. The six-dimensional grids use at most
/// 16 points per axis.
pub fn grid_monotonicity_suite(options: GridOptions) -> VerificationReport {
    let start = Instant::now();
    let res = options.resolution.max(8);
    let checks = match options.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
        {
            Ok(pool) => pool.install(|| run_grid(res)),
            Err(_) => run_grid(res),
        },
        None => run_grid(res),
    };
    VerificationReport::new("monotonicity", checks, start.elapsed().as_secs_f64())
}
