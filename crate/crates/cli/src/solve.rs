//! `ks solve`: one (ε, M) instance.

use std::fmt;

use clap::Args;
use ks_core::{make_orbit, MeanAnomaly};

use crate::error::{CliError, CliResult};
use crate::methods::{
    evaluate, reference_psi, tolerance_for_precision, EvalConfig, Method, Setting,
};

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Eccentricity in [0, 1].
    #[arg(long)]
    pub eps: f64,
    /// Mean anomaly in radians.
    #[arg(long = "M", visible_alias = "m")]
    pub m: f64,
    #[arg(long, value_enum, default_value_t = Method::Oracle)]
    pub method: Method,
    /// Precision level of the integral (10, 15, 20, 25); also sets the
    /// tolerance of the oracle and the series unless --tol is given.
    #[arg(long, default_value_t = 15)]
    pub precision: u32,
    /// Explicit tolerance for the oracle or the series.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Resummation order for weniger and wynn.
    #[arg(long, default_value_t = 30)]
    pub order: usize,
    /// Shift parameter of the δ transform.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub eps: f64,
    pub m: f64,
    pub method: Method,
    pub setting: Setting,
    pub psi: f64,
    /// `ψ − ε sin ψ − M`.
    pub residual: f64,
    /// Oracle ψ and the relative difference, for non-oracle methods.
    pub oracle: Option<(f64, f64)>,
    pub warnings: Vec<String>,
}

impl SolveReport {
    pub fn s(&self) -> f64 {
        self.psi - self.m
    }
}

pub fn setting_for(args: &SolveArgs) -> CliResult<Setting> {
    Ok(match args.method {
        Method::Oracle | Method::Series => Setting::Tolerance(match args.tol {
            Some(t) => t,
            None => tolerance_for_precision(args.precision)?,
        }),
        Method::Integral => Setting::Precision(args.precision),
        Method::Weniger | Method::Wynn => Setting::Order(args.order),
    })
}

pub fn run(args: &SolveArgs, cfg: &EvalConfig) -> CliResult<SolveReport> {
    let orbit = make_orbit(args.eps)?;
    let m = MeanAnomaly::new(args.m)?;
    let setting = setting_for(args)?;
    let cfg = EvalConfig {
        beta: args.beta,
        ..*cfg
    };
    let est = evaluate(args.method, &orbit, m, setting, &cfg)?;
    let psi = est.psi.ok_or_else(|| {
        CliError::Core(ks_core::Error::InsufficientData(format!(
            "{} broke down at order {}",
            args.method, args.order
        )))
    })?;
    let oracle = if args.method == Method::Oracle {
        None
    } else {
        let r = reference_psi(&orbit, m)?;
        Some((r, (psi - r).abs() / r.abs().max(1e-300)))
    };
    Ok(SolveReport {
        eps: args.eps,
        m: m.value(),
        method: args.method,
        setting,
        psi,
        residual: psi - args.eps * psi.sin() - m.value(),
        oracle,
        warnings: est.warnings,
    })
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "method     {}", self.method)?;
        writeln!(f, "eps        {:.16e}", self.eps)?;
        writeln!(f, "M          {:.16e}", self.m)?;
        writeln!(f, "psi        {:.16e}", self.psi)?;
        writeln!(f, "S          {:.16e}", self.s())?;
        write!(f, "residual   {:.3e}", self.residual)?;
        if let Some((r, e)) = self.oracle {
            writeln!(f)?;
            writeln!(f, "oracle     {r:.16e}")?;
            write!(f, "rel_error  {e:.3e}")?;
        }
        Ok(())
    }
}
