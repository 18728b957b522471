//! The five ways of computing ψ that `solve` and `sweep` expose.

use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use ks_core::accel::{best_estimate, kapteyn_partial_sums_extended, kepler_series, TableEntry};
use ks_core::integral::{precision_settings, s_integral_with};
use ks_core::{solve_kepler_oracle, Complex64, MeanAnomaly, OrbitParams};

use crate::error::{CliError, CliResult};

/// Residual tolerance of the oracle used as the "exact" reference.
pub const REFERENCE_TOL: f64 = 1e-14;

/// Environment variable overriding the quadrature panel cap.
pub const PANEL_BUDGET_ENV: &str = "KS_PANEL_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Method {
    /// Safeguarded Newton iteration.
    Oracle,
    /// Truncated Kapteyn series with a certified tail bound (ε < 1).
    Series,
    /// The arg-form integral for S(ε; M).
    Integral,
    /// Weniger δ applied to the Kapteyn partial sums.
    Weniger,
    /// Wynn ε applied to the Kapteyn partial sums.
    Wynn,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Oracle,
        Method::Series,
        Method::Integral,
        Method::Weniger,
        Method::Wynn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Series => "series",
            Method::Integral => "integral",
            Method::Weniger => "weniger",
            Method::Wynn => "wynn",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| CliError::usage(format!("unknown method {s:?}")))
    }
}

/// The accuracy knob of one evaluation. Its numeric form fills the
/// `order_or_tol` CSV column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Setting {
    /// Residual or tail tolerance (oracle, series).
    Tolerance(f64),
    /// Quadrature precision level (integral).
    Precision(u32),
    /// Resummation order (weniger, wynn).
    Order(usize),
}

impl Setting {
    pub fn as_column(self) -> f64 {
        match self {
            Setting::Tolerance(t) => t,
            Setting::Precision(p) => p as f64,
            Setting::Order(o) => o as f64,
        }
    }
}

/// Options shared by every evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub panel_budget: Option<usize>,
    /// Shift parameter of the δ transform.
    pub beta: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            panel_budget: None,
            beta: 1.0,
        }
    }
}

impl EvalConfig {
    /// Defaults with the panel cap read from [`PANEL_BUDGET_ENV`].
    pub fn from_env() -> CliResult<Self> {
        let panel_budget = match std::env::var(PANEL_BUDGET_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&b| b > 0)
                    .ok_or_else(|| {
                        CliError::usage(format!(
                            "{PANEL_BUDGET_ENV} must be a positive integer, got {v:?}"
                        ))
                    })?,
            ),
            Err(_) => None,
        };
        Ok(EvalConfig {
            panel_budget,
            ..EvalConfig::default()
        })
    }
}

/// One computed ψ together with diagnostics worth surfacing.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    /// `None` when the transform broke down at the requested entry.
    pub psi: Option<f64>,
    pub warnings: Vec<String>,
}

/// The tolerance a quadrature precision level stands for, used when a
/// series is asked for "precision p".
pub fn tolerance_for_precision(level: u32) -> CliResult<f64> {
    Ok(precision_settings(level)?.tol_rel)
}

/// The oracle ψ used as reference by every error column.
pub fn reference_psi(orbit: &OrbitParams, m: MeanAnomaly) -> CliResult<f64> {
    Ok(solve_kepler_oracle(orbit, m, REFERENCE_TOL)?.value())
}

/// ψ by `method` at accuracy `setting`.
pub fn evaluate(
    method: Method,
    orbit: &OrbitParams,
    m: MeanAnomaly,
    setting: Setting,
    cfg: &EvalConfig,
) -> CliResult<Estimate> {
    let mv = m.value();
    let mut warnings = Vec::new();
    let psi = match (method, setting) {
        (Method::Oracle, Setting::Tolerance(tol)) => {
            Some(solve_kepler_oracle(orbit, m, tol)?.value())
        }
        (Method::Series, Setting::Tolerance(tol)) => {
            let s = kepler_series(orbit, m, tol)?;
            Some(mv + s.value.im)
        }
        (Method::Integral, Setting::Precision(level)) => {
            let mut settings = precision_settings(level)?;
            if let Some(b) = cfg.panel_budget {
                settings = settings.panel_budget(b);
            }
            let s = s_integral_with(orbit, m, &settings)?;
            if s.ill_conditioned {
                warnings.push(format!(
                    "ill-conditioned: dψ/dM exceeds {:e} at eps={} M={mv}",
                    ks_core::integral::ILL_CONDITION_THRESHOLD,
                    orbit.eps()
                ));
            }
            Some(mv + s.value)
        }
        (Method::Weniger | Method::Wynn, Setting::Order(order)) => {
            let z = Complex64::from_polar(1.0, mv);
            let n = ks_core::accel::delta_terms_for_order(order);
            let sums = kapteyn_partial_sums_extended(z, orbit, n)?;
            let entry = if method == Method::Weniger {
                sums.delta_at_order(order, cfg.beta)?
            } else {
                TableEntry::Value(best_estimate(&sums.wynn_epsilon()?)?.0)
            };
            match entry {
                TableEntry::Value(v) => Some(mv + 2.0 * v.im),
                TableEntry::Breakdown => {
                    warnings.push(format!("{method} breakdown at order {order}"));
                    None
                }
            }
        }
        (method, setting) => {
            return Err(CliError::usage(format!(
                "{method} does not take setting {setting:?}"
            )))
        }
    };
    Ok(Estimate { psi, warnings })
}
