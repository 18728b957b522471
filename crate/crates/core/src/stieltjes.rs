//! The Stieltjes structure of the Kapteyn series.
//!
//! With `t = exp(−G(θ))` the Watson integral turns into a moment integral,
//! and the density of the measure is `ρ(t) = 2θ(t)/π`:
//!
//! ```text
//! (2/n) J_n(nε) exp(−λn) = ∫₀¹ t^{n−1} ρ(t) dt,        n ≥ 1
//! 𝕊(ε; M) = z ∫₀¹ ρ(t) / (1 − zt) dt,                  z = exp(λ + iM)
//! ```
//!
//! The polylogarithm `L_ν(z) = z ∫₀¹ [(−log t)^{ν−1}/Γ(ν)] / (1 − zt) dt`
//! is the closed-form model case and is provided both as its Dirichlet
//! series and as the integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::orbit::OrbitParams;
use crate::quadrature::{integrate, integrate_real, QuadSettings};
use crate::roots::brent;
use crate::watson::shifted_phase;

/// Tolerance of the θ(t) inversion.
pub const THETA_TOL: f64 = 1e-13;

/// Above `G(π − THETA_CLIP)` the inversion returns θ = π.
const THETA_CLIP: f64 = 1e-8;

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("t = {t} outside [0, 1]")));
    }
    Ok(())
}

/// `−log t` with full accuracy near t = 1.
fn neg_log(t: f64) -> f64 {
    if t > 0.5 {
        -(t - 1.0).ln_1p()
    } else {
        -t.ln()
    }
}

fn theta_unchecked(t: f64, eps: f64, lambda: f64) -> Result<f64> {
    if t == 1.0 {
        return Ok(0.0);
    }
    if t == 0.0 {
        return Ok(PI);
    }
    let level = neg_log(t);
    let hi = PI - THETA_CLIP;
    if shifted_phase(hi, eps, lambda) <= level {
        return Ok(PI);
    }
    brent(
        |th| shifted_phase(th, eps, lambda) - level,
        0.0,
        hi,
        THETA_TOL,
    )
}

/// θ(t): the inverse of `t = exp(−G(θ))` on `[0, π]`.
pub fn theta_of_t(t: f64, orbit: &OrbitParams) -> Result<f64> {
    check_t(t)?;
    let density = StieltjesDensity::new(*orbit)?;
    theta_unchecked(t, density.orbit.eps(), density.lambda)
}

/// ρ(t) = 2θ(t)/π.
pub fn density_rho(t: f64, orbit: &OrbitParams) -> Result<f64> {
    Ok(2.0 * theta_of_t(t, orbit)? / PI)
}

/// The density `ρ` of the measure for one orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesDensity {
    orbit: OrbitParams,
    lambda: f64,
}

impl StieltjesDensity {
    pub fn new(orbit: OrbitParams) -> Result<Self> {
        if orbit.eps() == 0.0 {
            return Err(Error::domain("density undefined for ε = 0"));
        }
        Ok(StieltjesDensity {
            lambda: orbit.finite_lambda()?,
            orbit,
        })
    }

    pub fn orbit(&self) -> &OrbitParams {
        &self.orbit
    }

    pub fn rho(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        Ok(2.0 * theta_unchecked(t, self.orbit.eps(), self.lambda)? / PI)
    }

    /// ρ for an interior quadrature node; inversion failures map to NaN so
    /// the integrator flags the panel instead of panicking.
    fn rho_node(&self, t: f64) -> f64 {
        theta_unchecked(t.clamp(0.0, 1.0), self.orbit.eps(), self.lambda)
            .map(|th| 2.0 * th / PI)
            .unwrap_or(f64::NAN)
    }
}

/// `μ_{n−1} = ∫₀¹ t^{n−1} ρ(t) dt`.
pub fn moment(n: u32, orbit: &OrbitParams) -> Result<f64> {
    moment_with(n, orbit, &QuadSettings::default())
}

pub fn moment_with(n: u32, orbit: &OrbitParams, settings: &QuadSettings) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("moment index n must be ≥ 1"));
    }
    let density = StieltjesDensity::new(*orbit)?;
    let p = (n - 1) as i32;
    let r = integrate_real(
        |t| t.powi(p) * density.rho_node(t),
        0.0,
        1.0,
        settings,
        &[0.5],
    )?;
    r.real()
}

/// The moments `μ_0, μ_1, …` of the density for one orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    pub orbit: OrbitParams,
    pub moments: Vec<f64>,
}

impl MomentSequence {
    /// `μ_0 … μ_{count−1}` by quadrature.
    pub fn compute(orbit: &OrbitParams, count: usize) -> Result<Self> {
        let moments = (1..=count as u32)
            .map(|n| moment(n, orbit))
            .collect::<Result<Vec<_>>>()?;
        Ok(MomentSequence {
            orbit: *orbit,
            moments,
        })
    }

    /// Partial sums of `μ_m^{−1/(2m)}` for m ≥ 1, the Carleman series.
    pub fn carleman_partial_sums(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.moments
            .iter()
            .enumerate()
            .skip(1)
            .map(|(m, &mu)| {
                acc += mu.powf(-1.0 / (2.0 * m as f64));
                acc
            })
            .collect()
    }
}

fn on_unit_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re >= 1.0
}

/// `z ∫₀¹ ρ(t)/(1 − zt) dt` for `z` off the cut `[1, ∞)`.
pub fn stieltjes_value(z: Complex64, density: &StieltjesDensity) -> Result<Complex64> {
    stieltjes_value_with(z, density, &QuadSettings::default())
}

pub fn stieltjes_value_with(
    z: Complex64,
    density: &StieltjesDensity,
    settings: &QuadSettings,
) -> Result<Complex64> {
    if !z.is_finite() {
        return Err(Error::domain("z must be finite"));
    }
    if on_unit_cut(z) {
        return Err(Error::domain(format!("z = {z} lies on the cut [1, ∞)")));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(z);
    }
    let hints = pole_hints(z);
    let r = integrate(
        |t| density.rho_node(t) / (1.0 - z * t),
        0.0,
        1.0,
        settings,
        &hints,
    )?;
    Ok(z * r.checked()?)
}

/// Split points around `t = Re(1/z)`, where `|1 − zt|` is smallest.
fn pole_hints(z: Complex64) -> Vec<f64> {
    let w = z.inv();
    let centre = w.re;
    let width = w.im.abs();
    let mut hints = vec![centre];
    for k in [1.0, 8.0] {
        hints.push(centre - k * width);
        hints.push(centre + k * width);
    }
    hints
}

/// A truncated series together with a bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms: usize,
}

fn polylog_tail(nu: f64, r: f64, nmax: usize) -> f64 {
    let next = (nmax + 1) as f64;
    r.powf(next) / (next.powf(nu) * (1.0 - r))
}

/// `Σ_{n=1}^{nmax} z^n / n^ν` for `|z| < 1`, `ν ≥ 0`.
pub fn polylog_series(nu: f64, z: Complex64, nmax: usize) -> Result<SeriesValue> {
    let r = z.norm();
    if !(r < 1.0) {
        return Err(Error::domain(format!(
            "|z| = {r} ≥ 1: Dirichlet series diverges"
        )));
    }
    if !(nu >= 0.0) {
        return Err(Error::domain("ν must be ≥ 0"));
    }
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..=nmax {
        power *= z;
        sum += power / (n as f64).powf(nu);
    }
    Ok(SeriesValue {
        value: sum,
        tail_bound: polylog_tail(nu, r, nmax),
        terms: nmax,
    })
}

/// The Dirichlet series truncated where its tail bound drops below `tol`.
pub fn polylog_series_to(nu: f64, z: Complex64, tol: f64) -> Result<SeriesValue> {
    let r = z.norm();
    if !(r < 1.0) {
        return Err(Error::domain(format!(
            "|z| = {r} ≥ 1: Dirichlet series diverges"
        )));
    }
    let mut nmax = 1usize;
    while polylog_tail(nu.max(0.0), r, nmax) > tol {
        nmax *= 2;
        if nmax > 1 << 26 {
            return Err(Error::InsufficientData(format!(
                "tail bound {tol:e} needs more than 2^26 terms at |z| = {r}"
            )));
        }
    }
    polylog_series(nu, z, nmax)
}

/// `L_ν(z)` from its Stieltjes integral, valid off the cut `[1, ∞)`.
///
/// The integral is evaluated after `t = exp(−u²)`, which maps the endpoint
/// behaviour `(−log t)^{ν−1}` onto a smooth integrand in `u`; the interval
/// is truncated where the remaining mass is below 10⁻²⁰.
pub fn polylog_stieltjes(nu: f64, z: Complex64) -> Result<Complex64> {
    if !(nu > 0.0) {
        return Err(Error::domain("ν must be > 0"));
    }
    if !z.is_finite() {
        return Err(Error::domain("z must be finite"));
    }
    if on_unit_cut(z) {
        return Err(Error::domain(format!("z = {z} lies on the cut [1, ∞)")));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(z);
    }

    let log_r = z.norm().ln().max(0.0);
    let mut u2 = 40.0_f64.max(log_r + 40.0);
    while (nu - 1.0) * u2.ln() - u2 + (1.0 + nu).ln() > -46.0 {
        u2 += 2.0;
    }
    let upper = u2.sqrt();
    let mut hints = vec![];
    if log_r > 0.0 {
        hints.push(log_r.sqrt());
    }

    let r = integrate(
        |u| {
            let w = (-u * u).exp();
            Complex64::new(2.0 * u.powf(2.0 * nu - 1.0) * w, 0.0) / (1.0 - z * w)
        },
        0.0,
        upper,
        &QuadSettings::with_tolerance(1e-15, 1e-13),
        &hints,
    )?;
    Ok(z * r.checked()? / gamma(nu))
}
