//! `ks verify`: invariant suites over every module, one machine-readable
//! line per suite.

use std::fmt;
use std::time::{Duration, Instant};

use clap::{Args, ValueEnum};
use ks_core::accel::{kapteyn_partial_sums_extended, kepler_series};
use ks_core::integral::{kapteyn_continuation, s_integral};
use ks_core::stieltjes::{
    moment, polylog_series_to, polylog_stieltjes, stieltjes_value, StieltjesDensity,
};
use ks_core::watson::{bessel_reference, bessel_scaled, bessel_watson, phase_f};
use ks_core::{make_orbit, solve_kepler_oracle, Complex64, MeanAnomaly};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

/// Deliberate faults for checking that the suites can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Use −λ in place of λ in the λ-identity suite.
    FlipLambdaSign,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    pub level: Level,
    #[arg(long, value_enum, hide = true)]
    pub fault: Option<Fault>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: usize,
    pub max_error: f64,
    pub elapsed: Duration,
    /// First failure, for the log.
    pub first_failure: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "suite={} status={} checks={} failures={} max_err={:.3e} time_ms={}",
            self.name,
            if self.passed() { "pass" } else { "fail" },
            self.checks,
            self.failures,
            self.max_error,
            self.elapsed.as_millis()
        )?;
        if let Some(m) = &self.first_failure {
            write!(f, " first_failure=\"{m}\"")?;
        }
        Ok(())
    }
}

/// Accumulates one suite's checks.
struct Tally {
    checks: usize,
    failures: usize,
    max_error: f64,
    first_failure: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checks: 0,
            failures: 0,
            max_error: 0.0,
            first_failure: None,
        }
    }

    fn fail(&mut self, what: String) {
        self.failures += 1;
        self.first_failure.get_or_insert(what);
    }

    /// Record `err ≤ tol`, or the computation's error.
    fn check(&mut self, label: impl FnOnce() -> String, err: ks_core::Result<f64>, tol: f64) {
        self.checks += 1;
        match err {
            Ok(e) if e <= tol => self.max_error = self.max_error.max(e),
            Ok(e) => {
                self.max_error = self
                    .max_error
                    .max(if e.is_nan() { f64::INFINITY } else { e });
                self.fail(format!("{}: {e:.3e} > {tol:.0e}", label()));
            }
            Err(e) => self.fail(format!("{}: {e}", label())),
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn lambda_identity(level: Level, faults: &[Fault]) -> Tally {
    let mut t = Tally::new();
    let n = if level == Level::Full { 200 } else { 50 };
    let flip = faults.contains(&Fault::FlipLambdaSign);
    for i in 1..=n {
        let eps = i as f64 / n as f64;
        let err = make_orbit(eps).and_then(|o| {
            let lambda = o.finite_lambda()?;
            let lambda = if flip { -lambda } else { lambda };
            Ok((phase_f(0.0, &o)? + lambda).abs())
        });
        t.check(|| format!("eps={eps}"), err, 1e-12);
    }
    t
}

fn kepler_oracle(level: Level) -> Tally {
    let mut t = Tally::new();
    let n_m = if level == Level::Full { 256 } else { 32 };
    for eps in [0.0, 0.3, 0.7, 0.99, 1.0] {
        let orbit = match make_orbit(eps) {
            Ok(o) => o,
            Err(e) => {
                t.fail(format!("eps={eps}: {e}"));
                continue;
            }
        };
        let mut prev = -1.0;
        for i in 0..n_m {
            let mv = std::f64::consts::TAU * i as f64 / n_m as f64;
            let r = MeanAnomaly::new(mv)
                .and_then(|m| solve_kepler_oracle(&orbit, m, 1e-13))
                .map(|psi| psi.value());
            match r {
                Ok(psi) => {
                    t.check(
                        || format!("monotone eps={eps} M={mv}"),
                        Ok(if psi >= prev { 0.0 } else { prev - psi }),
                        0.0,
                    );
                    prev = psi;
                    t.check(
                        || format!("residual eps={eps} M={mv}"),
                        Ok((psi - eps * psi.sin() - mv).abs()),
                        1e-13,
                    );
                }
                Err(e) => t.fail(format!("eps={eps} M={mv}: {e}")),
            }
        }
    }
    t
}

fn siegel(level: Level) -> Tally {
    let mut t = Tally::new();
    let top = if level == Level::Full { 200 } else { 50 };
    for eps in [0.1, 0.5, 0.9, 0.99, 1.0] {
        for n in 1..=top {
            let excess = make_orbit(eps)
                .and_then(|o| bessel_scaled(n, &o))
                .map(|b| (b - 1.0).max(0.0));
            t.check(|| format!("eps={eps} n={n}"), excess, 1e-12);
        }
    }
    t
}

fn bessel_oracle(level: Level) -> Tally {
    let mut t = Tally::new();
    let top = if level == Level::Full { 50 } else { 20 };
    for eps in [0.3, 0.7, 0.95] {
        for n in 1..=top {
            let err = make_orbit(eps).and_then(|o| {
                Ok(rel(
                    bessel_watson(n, &o)?,
                    bessel_reference(n, n as f64 * eps)?,
                ))
            });
            t.check(|| format!("eps={eps} n={n}"), err, 1e-10);
        }
    }
    t
}

fn moment_identity(level: Level) -> Tally {
    let mut t = Tally::new();
    let top = if level == Level::Full { 20 } else { 5 };
    for eps in [0.1, 0.5, 0.9] {
        for n in 1..=top {
            let err = make_orbit(eps).and_then(|o| {
                let lhs = moment(n, &o)?;
                Ok(rel(lhs, 2.0 * bessel_scaled(n, &o)? / n as f64))
            });
            t.check(|| format!("eps={eps} n={n}"), err, 1e-9);
        }
    }
    t
}

fn polylog_dual_route(level: Level) -> Tally {
    let mut t = Tally::new();
    let count = if level == Level::Full { 20 } else { 10 };
    for k in 0..count {
        let r = 0.8 * (k + 1) as f64 / count as f64;
        let z = Complex64::from_polar(r, 2.4 * k as f64 - 3.0);
        let err = polylog_series_to(1.5, z, 1e-14)
            .and_then(|s| Ok((s.value - polylog_stieltjes(1.5, z)?).norm()));
        t.check(|| format!("z={z}"), err, 1e-10);
    }
    t
}

fn integral_oracle(level: Level) -> Tally {
    let mut t = Tally::new();
    let count = if level == Level::Full { 50 } else { 10 };
    let orbit = make_orbit(1.0).expect("ε = 1 is valid");
    for i in 0..count {
        let mv = 0.05 + (std::f64::consts::PI - 0.1) * i as f64 / (count - 1) as f64;
        let err = MeanAnomaly::new(mv).and_then(|m| {
            let psi = solve_kepler_oracle(&orbit, m, 1e-14)?.value();
            Ok(rel(mv + s_integral(&orbit, m)?.value, psi))
        });
        t.check(|| format!("M={mv}"), err, 1e-8);
    }
    t
}

fn route_equivalence(level: Level) -> Tally {
    let mut t = Tally::new();
    let (ne, nm) = if level == Level::Full { (5, 5) } else { (3, 3) };
    for i in 0..ne {
        let eps = 0.1 + 0.85 * i as f64 / (ne - 1) as f64;
        for j in 0..nm {
            let mv = 0.3 + 5.5 * j as f64 / (nm - 1) as f64;
            let routes = (|| -> ks_core::Result<[f64; 4]> {
                let orbit = make_orbit(eps)?;
                let m = MeanAnomaly::new(mv)?;
                let oracle = solve_kepler_oracle(&orbit, m, 1e-14)?.value() - mv;
                let series = kepler_series(&orbit, m, 1e-12)?.value.im;
                let integral = s_integral(&orbit, m)?.value;
                let w = Complex64::from_polar(orbit.finite_lambda()?.exp(), mv);
                let st = stieltjes_value(w, &StieltjesDensity::new(orbit)?)?.im;
                Ok([oracle, series, integral, st])
            })();
            let err = routes.map(|r| {
                let mut worst: f64 = 0.0;
                for a in 0..4 {
                    for b in a + 1..4 {
                        worst = worst.max((r[a] - r[b]).abs());
                    }
                }
                worst
            });
            t.check(|| format!("eps={eps} M={mv}"), err, 1e-7);
        }
    }
    t
}

/// The resummation-table point: ε = 0.9, z = 10·exp(iπ/3).
fn table_point() -> Complex64 {
    Complex64::from_polar(10.0, std::f64::consts::FRAC_PI_3)
}

fn continuation(level: Level) -> Tally {
    let mut t = Tally::new();
    let z = table_point();
    let err = make_orbit(0.9)
        .and_then(|o| kapteyn_continuation(z, &o))
        .map(|c| (c.value - Complex64::new(-1.001_838_982, 1.238_765_242)).norm());
    t.check(|| "table point".into(), err, 1e-8);
    // Inside the disc of convergence the integral equals the series.
    let count = if level == Level::Full { 12 } else { 4 };
    for eps in [0.5, 0.9] {
        for k in 0..count {
            let err = make_orbit(eps).and_then(|o| {
                let z = Complex64::from_polar(0.8 * o.convergence_radius(), 0.5 + 1.3 * k as f64);
                let c = kapteyn_continuation(z, &o)?.value;
                let direct = kapteyn_partial_sums_extended(z, &o, 400)?.rounded();
                Ok((c - *direct.sums().last().expect("nonempty")).norm())
            });
            t.check(|| format!("eps={eps} k={k}"), err, 1e-10);
        }
    }
    t
}

fn table_one(_level: Level) -> Tally {
    let mut t = Tally::new();
    let expected = [
        (10, Complex64::new(-1.003_096_168, 1.238_166_641)),
        (20, Complex64::new(-1.001_839_658, 1.238_763_069)),
        (30, Complex64::new(-1.001_838_979, 1.238_765_240)),
    ];
    let sums = make_orbit(0.9).and_then(|o| kapteyn_partial_sums_extended(table_point(), &o, 33));
    for (order, want) in expected {
        let err = sums.as_ref().map_err(Clone::clone).and_then(|s| {
            s.delta_at_order(order, 1.0)?
                .value()
                .map(|d| (d - want).norm())
                .ok_or_else(|| ks_core::Error::InsufficientData("breakdown".into()))
        });
        t.check(|| format!("order {order}"), err, 1e-8);
    }
    t
}

type SuiteFn = fn(Level, &[Fault]) -> Tally;

const SUITES: [(&str, SuiteFn); 10] = [
    ("lambda-identity", lambda_identity),
    ("kepler-oracle", |l, _| kepler_oracle(l)),
    ("siegel", |l, _| siegel(l)),
    ("bessel-oracle", |l, _| bessel_oracle(l)),
    ("moment-identity", |l, _| moment_identity(l)),
    ("polylog-dual-route", |l, _| polylog_dual_route(l)),
    ("integral-oracle", |l, _| integral_oracle(l)),
    ("route-equivalence", |l, _| route_equivalence(l)),
    ("continuation", |l, _| continuation(l)),
    ("table-one", |l, _| table_one(l)),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

/// Run every suite, calling `on_report` as each finishes.
pub fn run_suites(
    level: Level,
    faults: &[Fault],
    mut on_report: impl FnMut(&SuiteReport),
) -> Vec<SuiteReport> {
    SUITES
        .iter()
        .map(|(name, f)| {
            let start = Instant::now();
            let t = f(level, faults);
            let report = SuiteReport {
                name,
                checks: t.checks,
                failures: t.failures,
                max_error: t.max_error,
                elapsed: start.elapsed(),
                first_failure: t.first_failure,
            };
            on_report(&report);
            report
        })
        .collect()
}

/// Print each suite line and a summary; fail with the failing names.
pub fn run(args: &VerifyArgs) -> CliResult<()> {
    let faults: Vec<Fault> = args.fault.into_iter().collect();
    let start = Instant::now();
    let reports = run_suites(args.level, &faults, |r| println!("{r}"));
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name.to_string())
        .collect();
    println!(
        "summary level={} status={} suites={} failed={} time_ms={}",
        match args.level {
            Level::Quick => "quick",
            Level::Full => "full",
        },
        if failed.is_empty() { "pass" } else { "fail" },
        reports.len(),
        if failed.is_empty() {
            "none".to_string()
        } else {
            failed.join(",")
        },
        start.elapsed().as_millis()
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerifyFailed(failed))
    }
}
