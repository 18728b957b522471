//! `ks resum`: partial sums of the Kapteyn series `Σ z^m J_m(mε)/m`
//! against their Weniger δ resummation, in the layout of a resummation
//! table, followed by the integral value of the continued function.
//!
//! Orders count from zero: the row of order `L` shows the sum of the
//! first `L + 1` terms and the δ estimate built from the first `L + 3`.

use std::fmt;

use clap::Args;
use ks_core::accel::{
    delta_at_order, delta_terms_for_order, kapteyn_partial_sums, kapteyn_partial_sums_extended,
    TableEntry,
};
use ks_core::integral::{kapteyn_continuation_with, ContinuationValue};
use ks_core::{make_orbit, Complex64, QuadSettings};

use crate::error::{CliError, CliResult};
use crate::methods::EvalConfig;
use crate::record::format_float;

/// Highest order accepted.
pub const MAX_ORDER: usize = 200;

#[derive(Debug, Clone, Args)]
pub struct ResumArgs {
    #[arg(long)]
    pub eps: f64,
    /// |z|.
    #[arg(long)]
    pub z_mod: f64,
    /// arg z in radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z_arg: f64,
    /// Strictly ascending list of orders, at most 200.
    #[arg(long, value_delimiter = ',', default_value = "1,10,20,30")]
    pub orders: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Use double-precision terms and arithmetic instead of double-double.
    /// Accurate only at low orders.
    #[arg(long)]
    pub double: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResumRow {
    pub order: usize,
    /// Sum of the first `order + 1` terms.
    pub partial_sum: Complex64,
    /// δ estimate from the first `order + 3` terms, `None` on breakdown.
    pub delta: Option<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResumReport {
    pub eps: f64,
    pub z: Complex64,
    pub beta: f64,
    pub extended: bool,
    pub rows: Vec<ResumRow>,
    pub reference: ContinuationValue,
}

fn check_orders(orders: &[usize]) -> CliResult<()> {
    if orders.is_empty() {
        return Err(CliError::usage("at least one order is required"));
    }
    if orders.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::usage("orders must be strictly ascending"));
    }
    if orders[orders.len() - 1] > MAX_ORDER {
        return Err(CliError::usage(format!(
            "orders may not exceed {MAX_ORDER}"
        )));
    }
    Ok(())
}

pub fn run(args: &ResumArgs, cfg: &EvalConfig) -> CliResult<ResumReport> {
    check_orders(&args.orders)?;
    if !(args.z_mod >= 0.0) || !args.z_mod.is_finite() || !args.z_arg.is_finite() {
        return Err(CliError::usage(
            "z-mod must be finite and nonnegative, z-arg finite",
        ));
    }
    let orbit = make_orbit(args.eps)?;
    let z = Complex64::from_polar(args.z_mod, args.z_arg);
    // Snap the representation error of cos/sin so a real z stays real.
    let z = if args.z_arg == 0.0 {
        Complex64::new(args.z_mod, 0.0)
    } else {
        z
    };

    let mut settings = QuadSettings::default();
    if let Some(b) = cfg.panel_budget {
        settings = settings.panel_budget(b);
    }
    // Computed first: a point on the cut is rejected before any summing.
    let reference = kapteyn_continuation_with(z, &orbit, &settings)?;

    // Every term vanishes: the sequence is constant and so is its limit.
    if z.norm() == 0.0 || orbit.is_circular() {
        let zero = Complex64::default();
        let rows = args
            .orders
            .iter()
            .map(|&order| ResumRow {
                order,
                partial_sum: zero,
                delta: Some(zero),
            })
            .collect();
        return Ok(ResumReport {
            eps: args.eps,
            z,
            beta: args.beta,
            extended: !args.double,
            rows,
            reference,
        });
    }

    let top = delta_terms_for_order(*args.orders.last().unwrap_or(&0));
    let mut rows = Vec::with_capacity(args.orders.len());
    let value = |e: TableEntry| e.value();
    if args.double {
        let sums = kapteyn_partial_sums(z, &orbit, top)?;
        for &order in &args.orders {
            rows.push(ResumRow {
                order,
                partial_sum: sums.sum_at(order + 1).unwrap_or_default(),
                delta: value(delta_at_order(&sums, order, args.beta)?),
            });
        }
    } else {
        let sums = kapteyn_partial_sums_extended(z, &orbit, top)?;
        let rounded = sums.rounded();
        for &order in &args.orders {
            rows.push(ResumRow {
                order,
                partial_sum: rounded.sum_at(order + 1).unwrap_or_default(),
                delta: value(sums.delta_at_order(order, args.beta)?),
            });
        }
    }
    Ok(ResumReport {
        eps: args.eps,
        z,
        beta: args.beta,
        extended: !args.double,
        rows,
        reference,
    })
}

impl fmt::Display for ResumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# eps={} z_re={} z_im={} beta={} arithmetic={}",
            format_float(self.eps),
            format_float(self.z.re),
            format_float(self.z.im),
            self.beta,
            if self.extended {
                "double-double"
            } else {
                "double"
            }
        )?;
        writeln!(f, "order partial_sum_re partial_sum_im delta_re delta_im")?;
        for r in &self.rows {
            let delta = match r.delta {
                Some(d) => format!("{} {}", format_float(d.re), format_float(d.im)),
                None => "breakdown breakdown".to_string(),
            };
            writeln!(
                f,
                "{} {} {} {delta}",
                r.order,
                format_float(r.partial_sum.re),
                format_float(r.partial_sum.im)
            )?;
        }
        write!(
            f,
            "integral {} {} quad_err={:.3e}",
            format_float(self.reference.value.re),
            format_float(self.reference.value.im),
            self.reference.quadrature_error
        )
    }
}
