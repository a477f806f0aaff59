//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails. Runtime budgets are part of the verdict where stated.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hyperideal::bounds::{
    b_n, grid_monotonicity_suite, h1, h2, mu_n, verify_table1, xi_cubic, xi_iteration, GridOptions,
    TABLE1,
};
use hyperideal::flow::{
    bound_window, convergence_rate, curvature, default_initial_metric, run_flow, FlowConfig,
    FlowTrace,
};
use hyperideal::functional::{covolume_at_origin, covolume_tet, lobachevsky, total_h};
use hyperideal::tetra::{dihedral_angles, is_hyperideal, phi_formula, EdgeLengths6};
use hyperideal::{Metric, Triangulation};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Criterion = (
    u32,
    &'static str,
    Option<Duration>,
    Box<dyn FnMut() -> Outcome>,
);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn two_tet() -> Triangulation {
    Triangulation::from_edge_labels(vec![[0; 6]; 2]).unwrap()
}

fn two_tet_trace() -> FlowTrace {
    let tri = two_tet();
    let l0 = default_initial_metric(&tri).unwrap().metric;
    run_flow(&tri, &l0, &FlowConfig::default()).unwrap()
}

fn c1_constants() -> Outcome {
    let b18 = b_n(18).unwrap();
    let oracle = 16.0 / (1.0 + (2.0 * PI / 18.0).cos()) - 7.0;
    let b12 = b_n(12).unwrap();
    let b9 = b_n(9).unwrap();
    let ok = (1.2487..=1.2488).contains(&b18)
        && (b18 - oracle).abs() <= 1e-14
        && b18 <= 1.2488
        && b12 <= 1.5744
        && b9 == 2.0;
    outcome(ok, format!("b18 = {b18:.10}, b12 = {b12:.10}, b9 = {b9}"))
}

fn c2_xi() -> Outcome {
    let it = xi_iteration(1e-15).unwrap();
    let root = bisect(xi_cubic, 0.1, 0.2);
    let monotone = it.iterates.windows(2).all(|w| w[1] >= w[0]);
    let ok = (0.125..=0.13).contains(&it.value) && (it.value - root).abs() <= 1e-8 && monotone;
    outcome(
        ok,
        format!(
            "xi = {:.12}, |xi - root| = {:.1e}, {} iterates",
            it.value,
            (it.value - root).abs(),
            it.iterates.len()
        ),
    )
}

fn c3_mu() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut worst_row = String::new();
    for row in TABLE1 {
        // mu_n decreases, so the row's largest valence (or the limit 0) is worst.
        let mu = match row.n_max {
            Some(m) => mu_n(m).unwrap(),
            None => 0.0,
        };
        let margin = mu - row.delta;
        if margin < worst {
            worst = margin;
            worst_row = row.label();
        }
    }
    let mu9 = mu_n(9).unwrap();
    let xi = hyperideal::bounds::xi_infinity();
    let ok = TABLE1.len() == 15 && worst >= 0.0 && mu9 == xi;
    outcome(
        ok,
        format!(
            "worst margin {worst:.4e} at {worst_row}, mu9 == xi: {}",
            mu9 == xi
        ),
    )
}

fn c4_table() -> Outcome {
    let report = verify_table1();
    let failures: Vec<String> = report
        .failures()
        .map(|c| format!("{} ({:.4e})", c.name, c.worst_margin))
        .collect();
    let detail = if failures.is_empty() {
        format!("{} checks", report.checks.len())
    } else {
        format!("failed: {}", failures.join(", "))
    };
    outcome(report.passed, detail)
}

fn c5_bootstrap() -> Outcome {
    let tau = 2.0 * PI;
    let m = [
        h1(1.9526, 1.2488, 2.0).unwrap() - tau,
        h2(1.9810, 1.9526, 0.0314).unwrap() - tau,
        h1(1.9458, 1.2488, 1.9810).unwrap() - tau,
        h2(1.9800, 1.9458, 0.0314).unwrap() - tau,
    ];
    outcome(
        m.iter().all(|&v| v >= 0.0),
        format!(
            "margins {:.4e} {:.4e} {:.4e} {:.4e}",
            m[0], m[1], m[2], m[3]
        ),
    )
}

fn c6_flow(trace: &FlowTrace) -> Outcome {
    let root = bisect(
        |x| {
            (x.powi(3) + 2.0 * x * x + x) / (2.0 * x.powi(3) + 3.0 * x * x - 1.0) - (PI / 6.0).cos()
        },
        1.0,
        2.0,
    );
    let l = trace.final_metric.lengths()[0];
    let (lo, hi) = bound_window(12).unwrap();
    let lo_want = (1.0 + mu_n(12).unwrap()).acosh();
    let hi_want = b_n(12).unwrap().acosh();
    let ok = trace.converged
        && trace.final_residual() <= 1e-10
        && *trace.times.last().unwrap() <= 200.0
        && (l.cosh() - root).abs() <= 1e-5
        && (lo - lo_want).abs() <= 1e-15
        && (hi - hi_want).abs() <= 1e-15
        && lo <= l
        && l <= hi
        && is_hyperideal(&EdgeLengths6::uniform(l)).unwrap();
    outcome(
        ok,
        format!(
            "cosh l = {:.8} (oracle {root:.8}), residual {:.2e}, t = {:.3}",
            l.cosh(),
            trace.final_residual(),
            trace.times.last().unwrap()
        ),
    )
}

fn c7_rate(trace: &FlowTrace) -> Outcome {
    match convergence_rate(trace) {
        Ok(fit) => outcome(
            fit.slope < 0.0 && fit.r_squared > 0.99,
            format!("slope {:.5}, R^2 {:.6}", fit.slope, fit.r_squared),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c8_monotone(trace: &FlowTrace) -> Outcome {
    let max_rise = trace
        .h_values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let tri = two_tet();
    let tol = 1e-13;
    let mut worst_rel = 0.0f64;
    let mut samples = 0;
    for (m, &r) in trace.metrics.iter().zip(&trace.residuals) {
        if r < 1e-4 {
            continue;
        }
        let k = curvature(&tri, &Metric::new(m.clone()).unwrap()).unwrap();
        let v: Vec<f64> = k.values().iter().zip(m).map(|(k, l)| k * l).collect();
        let want: f64 = -k
            .values()
            .iter()
            .zip(m)
            .map(|(k, l)| k * k * l)
            .sum::<f64>();
        let h = 1e-3 / v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let shifted = |s: f64| {
            let l: Vec<f64> = m.iter().zip(&v).map(|(l, v)| l + s * v).collect();
            total_h(&tri, &Metric::new(l).unwrap(), tol).unwrap()
        };
        let central = |h: f64| (shifted(h) - shifted(-h)) / (2.0 * h);
        let fd = (4.0 * central(0.5 * h) - central(h)) / 3.0;
        worst_rel = worst_rel.max(((fd - want) / want).abs());
        samples += 1;
    }
    outcome(
        max_rise <= 1e-8 && worst_rel <= 1e-6 && samples >= 5,
        format!("max H rise {max_rise:.2e}, dH/dt rel err {worst_rel:.2e} over {samples} samples"),
    )
}

fn c9_gradients() -> Outcome {
    let tol = 1e-13;
    let h = 1e-5;
    let mut rng = StdRng::seed_from_u64(9);
    let mut worst_cov = 0.0f64;
    for _ in 0..20 {
        let l: [f64; 6] = std::array::from_fn(|_| rng.gen_range(0.3..=1.2));
        let alpha = dihedral_angles(&EdgeLengths6(l)).unwrap().alpha;
        for i in 0..6 {
            let (mut up, mut down) = (l, l);
            up[i] += h;
            down[i] -= h;
            let cov = |v: [f64; 6]| covolume_tet(&EdgeLengths6(v), tol).unwrap().value;
            let fd = (cov(up) - cov(down)) / (2.0 * h);
            worst_cov = worst_cov.max((fd - alpha[i]).abs());
        }
    }
    let tri = two_tet();
    let mut worst_h = 0.0f64;
    for l in [0.4, 0.6, 0.8, 1.0, 1.2] {
        let hv = |v: f64| total_h(&tri, &Metric::new(vec![v]).unwrap(), tol).unwrap();
        let fd = (hv(l + h) - hv(l - h)) / (2.0 * h);
        let k = curvature(&tri, &Metric::new(vec![l]).unwrap())
            .unwrap()
            .values()[0];
        worst_h = worst_h.max((fd + k).abs());
    }
    outcome(
        worst_cov <= 1e-6 && worst_h <= 1e-6,
        format!("cov gradient {worst_cov:.2e}, H gradient {worst_h:.2e}"),
    )
}

fn c10_phi() -> Outcome {
    let mut worst_id = 0.0f64;
    for i in 0..100 {
        let x = 1.0 + 3.0 * i as f64 / 99.0;
        let want = (9.0 - x) / (7.0 + x);
        worst_id = worst_id.max((phi_formula([x, 2.0, 2.0, 1.0, 2.0, 2.0]) - want).abs());
    }
    let mut rng = StdRng::seed_from_u64(10);
    let mut worst_sym = 0.0f64;
    for _ in 0..1000 {
        let x: [f64; 6] = std::array::from_fn(|_| rng.gen_range(1.0..=4.0));
        let [x1, x2, x3, x4, x5, x6] = x;
        let p = phi_formula(x);
        worst_sym = worst_sym
            .max((phi_formula([x1, x3, x2, x4, x6, x5]) - p).abs())
            .max((phi_formula([x1, x5, x6, x4, x2, x3]) - p).abs());
    }
    outcome(
        worst_id <= 1e-12 && worst_sym <= 1e-12,
        format!("identity {worst_id:.2e}, symmetry {worst_sym:.2e}"),
    )
}

fn c11_grids() -> Outcome {
    let report = grid_monotonicity_suite(GridOptions {
        resolution: 16,
        jobs: None,
    });
    let worst = report
        .checks
        .iter()
        .filter(|c| !c.informational)
        .min_by(|a, b| a.worst_margin.total_cmp(&b.worst_margin))
        .map(|c| format!("{} {:.3e}", c.name, c.worst_margin))
        .unwrap_or_default();
    let failed = report.failures().count();
    outcome(
        report.passed,
        format!(
            "{} checks, {failed} failed, worst {worst}",
            report.checks.len()
        ),
    )
}

fn c12_lobachevsky() -> Outcome {
    let q = lobachevsky(PI / 4.0);
    let mut odd = 0.0f64;
    let mut periodic = 0.0f64;
    for i in 0..=200 {
        let t = -2.0 * PI + 4.0 * PI * i as f64 / 200.0;
        odd = odd.max((lobachevsky(-t) + lobachevsky(t)).abs());
        periodic = periodic.max((lobachevsky(t + PI) - lobachevsky(t)).abs());
    }
    let base = covolume_tet(&EdgeLengths6([0.0; 6]), 1e-12).unwrap().value;
    let ok = (0.4579827..=0.4579829).contains(&q)
        && odd <= 1e-12
        && periodic <= 1e-12
        && (base - 16.0 * q).abs() <= 1e-12
        && covolume_at_origin() == 16.0 * q;
    outcome(
        ok,
        format!("L(pi/4) = {q:.10}, odd {odd:.1e}, period {periodic:.1e}, cov(0) = {base:.10}"),
    )
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (
            1,
            "constants b_n",
            Some(Duration::from_millis(1)),
            Box::new(c1_constants),
        ),
        (
            2,
            "xi fixed point",
            Some(Duration::from_millis(10)),
            Box::new(c2_xi),
        ),
        (
            3,
            "mu_n dominates row deltas",
            Some(Duration::from_millis(10)),
            Box::new(c3_mu),
        ),
        (
            4,
            "table row checks",
            Some(Duration::from_secs(1)),
            Box::new(c4_table),
        ),
        (
            5,
            "upper-bound bootstrap",
            Some(Duration::from_millis(100)),
            Box::new(c5_bootstrap),
        ),
        (
            6,
            "two-tet flow convergence",
            Some(Duration::from_secs(1)),
            Box::new(|| c6_flow(&two_tet_trace())),
        ),
        (
            7,
            "exponential rate fit",
            None,
            Box::new(|| c7_rate(&two_tet_trace())),
        ),
        (
            8,
            "H monotone along flow",
            None,
            Box::new(|| c8_monotone(&two_tet_trace())),
        ),
        (
            9,
            "gradient identities",
            Some(Duration::from_secs(10)),
            Box::new(c9_gradients),
        ),
        (10, "phi identity and symmetry", None, Box::new(c10_phi)),
        (
            11,
            "monotonicity grids",
            Some(Duration::from_secs(300)),
            Box::new(c11_grids),
        ),
        (12, "Lobachevsky function", None, Box::new(c12_lobachevsky)),
    ];
    let mut failed = 0;
    for (id, name, budget, mut run) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_budget = budget.is_none_or(|b| elapsed <= b);
        let passed = o.passed && in_budget;
        if !passed {
            failed += 1;
        }
        let budget_note = match budget {
            Some(b) if !in_budget => format!(" (over budget {b:?})"),
            _ => String::new(),
        };
        println!(
            "{} criterion {id:>2} {name}: {} [{elapsed:.3?}{budget_note}]",
            if passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{failed} of 12 criteria failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
