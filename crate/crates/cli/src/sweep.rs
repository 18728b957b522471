//! `ks sweep`: error data over a grid of mean anomalies.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ks_core::{make_orbit, MeanAnomaly, OrbitParams};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::methods::{
    evaluate, reference_psi, Estimate, EvalConfig, Method, Setting, REFERENCE_TOL,
};
use crate::record::{write_csv, SweepRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub m_min: f64,
    #[arg(long)]
    pub m_max: f64,
    #[arg(long, default_value_t = 50)]
    pub n_points: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "integral")]
    pub methods: Vec<Method>,
    /// Precision levels of the integral method.
    #[arg(long, value_delimiter = ',', default_value = "10,15,20,25")]
    pub precisions: Vec<u32>,
    /// Resummation orders of the weniger and wynn methods.
    #[arg(long, value_delimiter = ',', default_value = "20,30,40,50")]
    pub orders: Vec<usize>,
    /// Tail tolerance of the series method.
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Spacing::Linear)]
    pub spacing: Spacing,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional log-scale error plot.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

/// The M grid, endpoints included.
pub fn grid(args: &SweepArgs) -> CliResult<Vec<f64>> {
    let (a, b, n) = (args.m_min, args.m_max, args.n_points);
    if !(a > 0.0 && a < b && b < TAU) {
        return Err(CliError::usage(format!(
            "need 0 < m-min < m-max < 2π, got [{a}, {b}]"
        )));
    }
    if n < 2 {
        return Err(CliError::usage("n-points must be at least 2"));
    }
    let step = |i: usize| i as f64 / (n - 1) as f64;
    Ok((0..n)
        .map(|i| match (i, args.spacing) {
            (0, _) => a,
            (i, _) if i == n - 1 => b,
            (i, Spacing::Linear) => a + (b - a) * step(i),
            (i, Spacing::Log) => a * (b / a).powf(step(i)),
        })
        .collect())
}

/// The (method, setting) pairs in row order.
pub fn plan(args: &SweepArgs) -> Vec<(Method, Setting)> {
    let mut out = Vec::new();
    for &method in &args.methods {
        match method {
            // The oracle row is the reference itself.
            Method::Oracle => out.push((method, Setting::Tolerance(REFERENCE_TOL))),
            Method::Series => out.push((method, Setting::Tolerance(args.tol))),
            Method::Integral => out.extend(
                args.precisions
                    .iter()
                    .map(|&p| (method, Setting::Precision(p))),
            ),
            Method::Weniger | Method::Wynn => {
                out.extend(args.orders.iter().map(|&o| (method, Setting::Order(o))))
            }
        }
    }
    out
}

fn rows_at(
    orbit: &OrbitParams,
    m: f64,
    plan: &[(Method, Setting)],
    cfg: &EvalConfig,
) -> CliResult<(Vec<SweepRecord>, Vec<String>)> {
    let ma = MeanAnomaly::new(m)?;
    let reference = reference_psi(orbit, ma)?;
    let mut rows = Vec::with_capacity(plan.len());
    let mut warnings = Vec::new();
    for &(method, setting) in plan {
        let est = match method {
            Method::Oracle => Estimate {
                psi: Some(reference),
                warnings: Vec::new(),
            },
            _ => evaluate(method, orbit, ma, setting, cfg)?,
        };
        warnings.extend(est.warnings);
        rows.push(SweepRecord::new(
            orbit.eps(),
            m,
            method,
            setting.as_column(),
            est.psi.map(|v| (v, 0.0)),
            reference,
        ));
    }
    Ok((rows, warnings))
}

/// All records in deterministic order: M outer, then method, then setting.
/// Grid points are evaluated in parallel.
pub fn compute(args: &SweepArgs, cfg: &EvalConfig) -> CliResult<(Vec<SweepRecord>, Vec<String>)> {
    let orbit = make_orbit(args.eps)?;
    let ms = grid(args)?;
    let plan = plan(args);
    if plan.is_empty() {
        return Err(CliError::usage("no method selected"));
    }
    let cfg = EvalConfig {
        beta: args.beta,
        ..*cfg
    };
    let per_point: Vec<_> = ms
        .par_iter()
        .map(|&m| rows_at(&orbit, m, &plan, &cfg))
        .collect::<CliResult<_>>()?;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for (r, w) in per_point {
        rows.extend(r);
        warnings.extend(w);
    }
    Ok((rows, warnings))
}

fn create(path: &PathBuf) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

/// Compute the sweep and write CSV (and optionally SVG). Output files are
/// opened before any work so an unwritable path fails fast.
pub fn run(args: &SweepArgs, cfg: &EvalConfig) -> CliResult<Vec<String>> {
    let mut csv_file = args.out.as_ref().map(create).transpose()?;
    let mut svg_file = args.svg.as_ref().map(create).transpose()?;
    let (rows, warnings) = compute(args, cfg)?;

    let csv_label = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("<stdout>"));
    let to_io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => CliError::io(&csv_label, e),
        other => CliError::Csv(format!("{other:?}")),
    };
    match csv_file.as_mut() {
        Some(f) => write_csv(f, &rows).map_err(to_io)?,
        None => write_csv(std::io::stdout().lock(), &rows).map_err(to_io)?,
    }
    if let (Some(f), Some(path)) = (svg_file.as_mut(), args.svg.as_ref()) {
        f.write_all(crate::svg::error_plot(&rows).as_bytes())
            .and_then(|_| f.flush())
            .map_err(|e| CliError::io(path, e))?;
    }
    Ok(warnings)
}
