//! Watson's phase function and the Bessel values `J_n(nε)` it generates.
//!
//! ```text
//! F(θ; ε) = log[(θ + √(θ² − ε² sin²θ)) / (ε sin θ)] − √(θ² − ε² sin²θ) / tan θ
//! J_n(nε) = (1/π) ∫₀^π exp(−n F(θ; ε)) dθ
//! ```
//!
//! `F(0; ε) = −λ`, so the shifted phase `G(θ) = F(θ; ε) + λ` starts at zero
//! and `J_n(nε) exp(−λn) = (1/π) ∫₀^π exp(−n G(θ)) dθ` stays in `(0, 1]`
//! for every `n` and `ε`. That scaled form is what the series code uses.

mod miller;
mod reference;

use std::f64::consts::PI;

pub use miller::bessel_miller;
pub(crate) use miller::bessel_miller_dd;
pub use reference::bessel_reference;

use crate::error::{Error, Result};
use crate::orbit::OrbitParams;
use crate::quadrature::{integrate_real, QuadSettings};
use crate::roots::brent;

/// Below this θ, `θ − sin θ` is summed from its Taylor series.
const SERIES_CUTOFF: f64 = 1.0;

/// Exponents below this underflow to zero in double precision.
pub(crate) const EXP_UNDERFLOW: f64 = -745.0;

/// A sampled point of the phase function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub theta: f64,
    pub value: f64,
}

/// `θ − sin θ` without cancellation for small θ.
fn theta_minus_sin(theta: f64) -> f64 {
    if theta >= SERIES_CUTOFF {
        return theta - theta.sin();
    }
    let t2 = theta * theta;
    let mut term = theta * t2 / 6.0;
    let mut sum = term;
    let mut k = 1.0;
    while term.abs() > 1e-18 * sum.abs() {
        term *= -t2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        sum += term;
        k += 1.0;
    }
    sum
}

/// `θ − ε sin θ`, accurate as θ → 0.
fn kepler_gap(theta: f64, eps: f64) -> f64 {
    theta * (1.0 - eps) + eps * theta_minus_sin(theta)
}

/// F(θ; ε) for `0 < θ < π`, no argument checks.
pub(crate) fn phase_unchecked(theta: f64, eps: f64) -> f64 {
    let s = theta.sin();
    let d = kepler_gap(theta, eps);
    let r = (d * (theta + eps * s)).sqrt();
    ((d + r) / (eps * s)).ln_1p() - r * theta.cos() / s
}

/// `F(0; ε) = log((1 + χ)/ε) − χ`.
fn phase_at_zero(orbit: &OrbitParams) -> f64 {
    ((1.0 + orbit.chi()) / orbit.eps()).ln() - orbit.chi()
}

fn check_phase_args(theta: f64, orbit: &OrbitParams) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain(format!("θ = {theta} outside [0, π]")));
    }
    if orbit.eps() == 0.0 {
        return Err(Error::domain("phase function undefined for ε = 0"));
    }
    Ok(())
}

/// Watson's phase F(θ; ε); `+∞` at θ = π.
pub fn phase_f(theta: f64, orbit: &OrbitParams) -> Result<f64> {
    check_phase_args(theta, orbit)?;
    Ok(if theta == 0.0 {
        phase_at_zero(orbit)
    } else if theta == PI {
        f64::INFINITY
    } else {
        phase_unchecked(theta, orbit.eps())
    })
}

/// Shifted phase `G(θ) = F(θ; ε) + λ`, with `G(0) = 0` and `G(π) = +∞`.
pub fn phase_g(theta: f64, orbit: &OrbitParams) -> Result<f64> {
    check_phase_args(theta, orbit)?;
    let lambda = orbit.finite_lambda()?;
    Ok(if theta == 0.0 {
        0.0
    } else if theta == PI {
        f64::INFINITY
    } else {
        phase_unchecked(theta, orbit.eps()) + lambda
    })
}

pub fn phase_point(theta: f64, orbit: &OrbitParams) -> Result<PhasePoint> {
    Ok(PhasePoint {
        theta,
        value: phase_f(theta, orbit)?,
    })
}

/// Shifted phase for interior θ, used inside integrands.
pub(crate) fn shifted_phase(theta: f64, eps: f64, lambda: f64) -> f64 {
    if theta <= 0.0 {
        0.0
    } else if theta >= PI {
        f64::INFINITY
    } else {
        phase_unchecked(theta, eps) + lambda
    }
}

/// θ with `G(θ) = level`, for `level > 0`.
pub(crate) fn invert_shifted_phase(level: f64, eps: f64, lambda: f64, xtol: f64) -> Result<f64> {
    let hi = PI - 1e-9;
    if shifted_phase(hi, eps, lambda) <= level {
        return Ok(PI);
    }
    brent(|th| shifted_phase(th, eps, lambda) - level, 0.0, hi, xtol)
}

/// Panel boundaries where `n·G(θ)` crosses a few fixed levels, so the
/// quadrature sees the peak at θ = 0 however narrow it is.
fn peak_hints(n: u32, eps: f64, lambda: f64) -> Vec<f64> {
    [0.5, 4.0, 30.0]
        .iter()
        .filter_map(|&level| invert_shifted_phase(level / n as f64, eps, lambda, 1e-6).ok())
        .filter(|&th| th < PI)
        .collect()
}

fn check_bessel_args(n: u32, orbit: &OrbitParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("order must be ≥ 1"));
    }
    if orbit.eps() == 0.0 {
        return Err(Error::domain(
            "ε = 0 has J_n(0) = 0; handle at series level",
        ));
    }
    orbit.finite_lambda()
}

/// `J_n(nε)·exp(−λn)` from the G-integral with default tolerances.
pub fn bessel_scaled(n: u32, orbit: &OrbitParams) -> Result<f64> {
    bessel_scaled_with(n, orbit, &QuadSettings::default())
}

pub fn bessel_scaled_with(n: u32, orbit: &OrbitParams, settings: &QuadSettings) -> Result<f64> {
    let lambda = check_bessel_args(n, orbit)?;
    let eps = orbit.eps();
    let nf = n as f64;
    let hints = peak_hints(n, eps, lambda);
    let r = integrate_real(
        |th| {
            let x = -nf * shifted_phase(th, eps, lambda);
            if x < EXP_UNDERFLOW {
                0.0
            } else {
                x.exp()
            }
        },
        0.0,
        PI,
        settings,
        &hints,
    )?;
    Ok(r.real()? / PI)
}

/// `J_n(nε)` straight from Watson's integral. Validation only: for small ε
/// and large n the value underflows long before the scaled form does.
pub fn bessel_watson(n: u32, orbit: &OrbitParams) -> Result<f64> {
    let lambda = check_bessel_args(n, orbit)?;
    let eps = orbit.eps();
    let nf = n as f64;
    let hints = peak_hints(n, eps, lambda);
    let settings = QuadSettings::with_tolerance(f64::MIN_POSITIVE, 1e-12);
    let f0 = phase_at_zero(orbit);
    let r = integrate_real(
        |th| {
            let f = if th <= 0.0 {
                f0
            } else {
                phase_unchecked(th, eps)
            };
            let x = -nf * f;
            if x < EXP_UNDERFLOW {
                0.0
            } else {
                x.exp()
            }
        },
        0.0,
        PI,
        &settings,
        &hints,
    )?;
    Ok(r.real()? / PI)
}
