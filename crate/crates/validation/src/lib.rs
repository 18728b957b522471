//! Helpers for the acceptance program: timed criterion outcomes and the
//! digit handling needed to compare against printed tables.

use std::fmt;
use std::time::{Duration, Instant};

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    /// The numerical check passed (ignoring time).
    pub check_passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.check_passed && self.elapsed <= self.budget
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {:<22} {} time={:.3}s/{}s {}",
            self.id,
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

/// Run `check`, timing it. `Err` counts as a failed check.
pub fn measure(
    id: u32,
    name: &'static str,
    budget_secs: u64,
    check: impl FnOnce() -> Result<(bool, String), String>,
) -> Outcome {
    let start = Instant::now();
    let (check_passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome {
        id,
        name,
        check_passed,
        detail,
        elapsed: start.elapsed(),
        budget: Duration::from_secs(budget_secs),
    }
}

/// `x` truncated toward zero to `decimals` places, as a table prints it.
pub fn truncate(x: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    // The nudge keeps values like 2.03 − 1e−16 from dropping a unit.
    (x * s + x.signum() * 1e-9).trunc() / s
}

/// Decimal exponent and mantissa `x = m·10^e` with `1 ≤ |m| < 10`.
pub fn decimal_parts(x: f64) -> (i32, f64) {
    let e = x.abs().log10().floor() as i32;
    (e, x / 10f64.powi(e))
}

/// `true` when the value, truncated to `decimals` places, is within
/// `ulps` units of the last printed place of `printed`.
pub fn matches_printed(value: f64, printed: f64, decimals: i32, ulps: f64) -> bool {
    (truncate(value, decimals) - printed).abs() <= ulps * 10f64.powi(-decimals) * (1.0 + 1e-9)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}
