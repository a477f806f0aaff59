//! Command-line front end.
//!
//! Exit codes: 0 success, 1 flow not converged or a check failed, 2 bad
//! input (unreadable file, malformed JSON, invalid triangulation, bad flags).

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bounds::{
    self, grid_monotonicity_suite, verify_constants, verify_rows, verify_table1, BoundsTable,
    GridOptions, Table1Row, VerificationReport,
};
use crate::flow::{
    bound_window, default_initial_metric, run_flow, FlowConfig, FlowTrace, MIN_VALENCE,
};
use crate::functional::total_h;
use crate::io::{
    fmt17, read_file, sha256_hex, to_json17, ClassReport, InputError, MetricOverrides, RunReport,
    TriangulationFile,
};
use crate::metric::Metric;
use crate::tetra::{is_hyperideal, EdgeLengths6};
use crate::triangulation::Triangulation;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

pub const HYPOTHESIS_WARNING: &str = "hypothesis v(e) ≥ 9 violated";

#[derive(Debug, Parser)]
#[command(
    name = "hyperideal",
    version,
    about = "Extended Ricci flow on hyper-ideal triangulations and bound verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a triangulation file and list edge classes with valences.
    Check(CheckArgs),
    /// Run the extended Ricci flow to a zero-curvature metric.
    Flow(FlowArgs),
    /// Print b_n, mu_n and the row constants for n = 9..=n_max.
    Bounds(BoundsArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
}

#[derive(Debug, clap::Args)]
pub struct CheckArgs {
    pub input: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, clap::Args)]
pub struct FlowArgs {
    pub input: String,
    /// Residual tolerance on max |K_e|.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Maximum flow time.
    #[arg(long = "t-max", default_value_t = 200.0)]
    pub t_max: f64,
    /// Write the trace as CSV to this path.
    #[arg(long)]
    pub trace: Option<String>,
    /// `json` prints the run report, `csv` prints the trace.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
    /// JSON file with initial lengths: an array, a class -> length map, or an
    /// earlier run report.
    #[arg(long)]
    pub init: Option<String>,
}

#[derive(Debug, clap::Args)]
pub struct BoundsArgs {
    #[arg(long = "n-max", default_value_t = 40)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Table1,
    Constants,
    Monotonicity,
    All,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Grid points per axis for the monotonicity suite.
    #[arg(long, default_value_t = 16)]
    pub resolution: usize,
    /// Worker threads for grid suites.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub report: Option<String>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match cli.command {
        Command::Check(a) => cmd_check(&a, out, err),
        Command::Flow(a) => cmd_flow(&a, out, err),
        Command::Bounds(a) => cmd_bounds(&a, out, err),
        Command::Verify(a) => cmd_verify(&a, out, err),
    }
}

fn load(path: &str) -> Result<(TriangulationFile, Triangulation, String), InputError> {
    let bytes = read_file(path)?;
    let text = String::from_utf8_lossy(&bytes);
    let file = TriangulationFile::parse(&text)?;
    let tri = file.build()?;
    Ok((file, tri, sha256_hex(&bytes)))
}

fn input_error(err: &mut dyn Write, e: impl std::fmt::Display) -> i32 {
    let _ = writeln!(err, "error: {e}");
    EXIT_INPUT
}

pub fn cmd_check(args: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (_, tri, _) = match load(&args.input) {
        Ok(v) => v,
        Err(e) => return input_error(err, e),
    };
    let v = tri.valences();
    let summary = if v.len() == 1 {
        format!("1 class, valence {}", v[0])
    } else {
        let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        format!("{} classes, valences {}", v.len(), list.join(", "))
    };
    let _ = writeln!(out, "tetrahedra: {}", tri.tet_count());
    let _ = writeln!(out, "{summary}");
    for (c, val) in v.iter().enumerate() {
        let flag = if *val < MIN_VALENCE {
            "  (below 9)"
        } else {
            ""
        };
        let _ = writeln!(out, "class {c}: valence {val}{flag}");
    }
    if tri.min_valence() < MIN_VALENCE {
        let _ = writeln!(err, "warning: {HYPOTHESIS_WARNING}");
    }
    EXIT_OK
}

fn trace_csv(trace: &FlowTrace) -> String {
    let classes = trace.final_metric.len();
    let mut s = String::from("time,residual,H");
    for c in 0..classes {
        s.push_str(&format!(",l{c}"));
    }
    s.push('\n');
    for i in 0..trace.times.len() {
        let mut row = vec![
            fmt17(trace.times[i]),
            fmt17(trace.residuals[i]),
            fmt17(trace.h_values[i]),
        ];
        row.extend(trace.metrics[i].iter().map(|&l| fmt17(l)));
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Runs the flow for an already-parsed input and builds the report.
pub fn flow_report(
    tri: &Triangulation,
    overrides: &[&MetricOverrides],
    config: &FlowConfig,
    digest: String,
) -> Result<(RunReport, FlowTrace), String> {
    let init = default_initial_metric(tri).map_err(|e| e.to_string())?;
    let mut lengths = init.metric.into_inner();
    for o in overrides {
        o.apply(&mut lengths).map_err(|e| e.to_string())?;
    }
    let l0 = Metric::new(lengths).map_err(|e| e.to_string())?;
    let trace = run_flow(tri, &l0, config).map_err(|e| e.to_string())?;

    let mut warnings = Vec::new();
    if !init.hypothesis_violations.is_empty() {
        warnings.push(HYPOTHESIS_WARNING.to_owned());
    }
    let fin = trace.final_metric.lengths();
    let all_high_valence = tri.min_valence() >= MIN_VALENCE;
    let mut classes = Vec::with_capacity(fin.len());
    for (c, &l) in fin.iter().enumerate() {
        let valence = tri.valences()[c];
        let window = if valence >= MIN_VALENCE {
            bound_window(valence).ok().map(|(lo, hi)| [lo, hi])
        } else {
            None
        };
        let in_window = window.map(|[lo, hi]| lo <= l && l <= hi);
        if trace.converged && all_high_valence && in_window == Some(false) {
            warnings.push(format!(
                "class {c} final length {l} outside its bound window"
            ));
        }
        classes.push(ClassReport {
            class: c,
            valence,
            length: l,
            cosh_length: l.cosh(),
            curvature: trace.final_curvature.values()[c],
            window,
            in_window,
        });
    }
    let hyperideal = (0..tri.tet_count())
        .map(|t| is_hyperideal(&EdgeLengths6(tri.pull_back(t, fin))).unwrap_or(false))
        .collect();
    let h_final = total_h(tri, &trace.final_metric, config.quadrature_tolerance)
        .map_err(|e| e.to_string())?;
    let report = RunReport {
        input_digest: digest,
        tetrahedra: tri.tet_count(),
        edge_classes: tri.edge_class_count(),
        converged: trace.converged,
        termination: trace.termination,
        iterations: trace.steps,
        rejected_steps: trace.rejected_steps,
        flow_time: *trace.times.last().unwrap_or(&0.0),
        residual_tolerance: config.residual_tolerance,
        final_residual: trace.final_residual(),
        initial_lengths: l0.lengths().to_vec(),
        final_lengths: fin.to_vec(),
        final_cosh_lengths: trace.final_metric.cosh_lengths(),
        final_curvatures: trace.final_curvature.values().to_vec(),
        classes,
        hyperideal,
        h_initial: trace.h_values[0],
        h_final,
        rate: trace.rate,
        hypothesis_violations: init.hypothesis_violations,
        warnings,
    };
    Ok((report, trace))
}

pub fn cmd_flow(args: &FlowArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if args.output == OutputFormat::Text {
        return input_error(err, "flow supports --output json or csv");
    }
    let (file, tri, digest) = match load(&args.input) {
        Ok(v) => v,
        Err(e) => return input_error(err, e),
    };
    let init_file = match &args.init {
        Some(path) => {
            let parsed = read_file(path).and_then(|b| {
                serde_json::from_slice::<MetricOverrides>(&b).map_err(InputError::from)
            });
            match parsed {
                Ok(m) => Some(m),
                Err(e) => return input_error(err, e),
            }
        }
        None => None,
    };
    let overrides: Vec<&MetricOverrides> = file
        .initial_metric()
        .into_iter()
        .chain(init_file.as_ref())
        .collect();
    let config = FlowConfig {
        residual_tolerance: args.tol,
        max_time: args.t_max,
        ..FlowConfig::default()
    };
    let (report, trace) = match flow_report(&tri, &overrides, &config, digest) {
        Ok(v) => v,
        Err(e) => return input_error(err, e),
    };
    for w in &report.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    if let Some(path) = &args.trace {
        if let Err(e) = std::fs::write(path, trace_csv(&trace)) {
            return input_error(err, format!("cannot write {path}: {e}"));
        }
    }
    let _ = match args.output {
        OutputFormat::Csv => write!(out, "{}", trace_csv(&trace)),
        _ => writeln!(out, "{}", to_json17(&report)),
    };
    let window_ok = report.classes.iter().all(|c| c.in_window != Some(false))
        || tri.min_valence() < MIN_VALENCE;
    if report.converged && window_ok {
        EXIT_OK
    } else {
        if !report.converged {
            let _ = writeln!(
                err,
                "not converged: residual {} after flow time {}",
                fmt17(report.final_residual),
                fmt17(report.flow_time)
            );
        }
        EXIT_FAILED
    }
}

pub fn cmd_bounds(args: &BoundsArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let table = match BoundsTable::new(args.n_max) {
        Ok(t) => t,
        Err(e) => return input_error(err, e),
    };
    match args.output {
        OutputFormat::Json => {
            let _ = writeln!(out, "{}", to_json17(&table));
        }
        OutputFormat::Csv | OutputFormat::Text => {
            let sep = if args.output == OutputFormat::Csv {
                ","
            } else {
                "  "
            };
            let _ = writeln!(
                out,
                "{}",
                ["n", "b_n", "mu_n", "gamma", "delta", "d", "q", "p"].join(sep)
            );
            for v in &table.valences {
                let mut cols = vec![v.n.to_string(), fmt17(v.b), fmt17(v.mu)];
                if let Some(r) = table.row_for(v.n) {
                    cols.extend([r.gamma, r.delta, r.d, r.q, r.p].map(fmt17));
                }
                let _ = writeln!(out, "{}", cols.join(sep));
            }
            let _ = writeln!(out, "xi_infinity{sep}{}", fmt17(table.xi_infinity));
        }
    }
    EXIT_OK
}

fn emit_report(
    report: &VerificationReport,
    path: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let json = to_json17(report);
    match path {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &json) {
                return input_error(err, format!("cannot write {p}: {e}"));
            }
            for c in &report.checks {
                let status = match (c.informational, c.passed) {
                    (true, _) => "info",
                    (false, true) => "pass",
                    (false, false) => "FAIL",
                };
                let _ = writeln!(out, "{status} {} margin {}", c.name, fmt17(c.worst_margin));
            }
        }
        None => {
            let _ = writeln!(out, "{json}");
        }
    }
    for c in report.failures() {
        let _ = writeln!(err, "failed: {} (margin {})", c.name, fmt17(c.worst_margin));
    }
    if report.passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

/// `verify` with a substitute row table; used to exercise the failure path.
pub fn cmd_verify_with_rows(
    args: &VerifyArgs,
    rows: Option<&[Table1Row]>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let table = || match rows {
        None => verify_table1(),
        Some(rows) => {
            let mut r = verify_rows(rows);
            let digest = bounds::table1_checksum(rows);
            let checksum = bounds::CheckResult::new("table1.checksum", digest.clone(), 0.0)
                .with_verdict(digest == bounds::TABLE1_SHA256);
            r.checks.insert(0, checksum);
            VerificationReport::new("table1", r.checks, r.wall_time_seconds)
        }
    };
    let grid = || {
        grid_monotonicity_suite(GridOptions {
            resolution: args.resolution,
            jobs: args.jobs,
        })
    };
    let report = match args.suite {
        Suite::Table1 => table(),
        Suite::Constants => verify_constants(),
        Suite::Monotonicity => grid(),
        Suite::All => VerificationReport::merge("all", vec![table(), verify_constants(), grid()]),
    };
    emit_report(&report, args.report.as_deref(), out, err)
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if args.resolution < 8 {
        return input_error(err, "--resolution must be at least 8");
    }
    cmd_verify_with_rows(args, None, out, err)
}
