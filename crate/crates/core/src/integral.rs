//! Integral representation of the Kepler solution and the continuation
//! of the Kapteyn series off its disk of convergence.
//!
//! With `w(θ) = exp(−F(θ; ε) + iM)`:
//!
//! ```text
//! S(ε; M) = ψ − M = −(2/π) ∫₀^π arg(1 − w(θ)) dθ
//! 𝕊(ε; M)         = 2iπ − (2/π) ∫₀^π log(w(θ) − 1) dθ        (Im 𝕊 = S)
//! Σ z^m J_m(mε)/m = −(1/π) ∫₀^π log(1 − z exp(−F(θ; ε))) dθ
//! ```
//!
//! The first and last forms use `1 − w`, whose principal logarithm is
//! continuous in θ, so no branch bookkeeping is needed. The middle form is
//! kept as a cross-check and unwraps its logarithm explicitly.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orbit::{MeanAnomaly, OrbitParams};
use crate::quadrature::{integrate, integrate_real, QuadSettings, QuadratureResult};
use crate::watson::{invert_shifted_phase, phase_unchecked, EXP_UNDERFLOW};

/// Above this condition number `dψ/dM` the result is flagged.
pub const ILL_CONDITION_THRESHOLD: f64 = 1e3;

/// Working-precision levels accepted by [`precision_settings`].
pub const PRECISION_LEVELS: [u32; 4] = [10, 15, 20, 25];

/// Quadrature settings for a nominal working precision in digits.
///
/// Double precision caps the requested tolerance at 1e−15; the top level
/// refines the initial panel grid instead of asking for more digits.
pub fn precision_settings(level: u32) -> Result<QuadSettings> {
    let s = match level {
        10 => QuadSettings::with_tolerance(1e-10, 1e-10),
        15 => QuadSettings::with_tolerance(1e-13, 1e-13),
        20 => QuadSettings::with_tolerance(1e-15, 1e-15),
        25 => QuadSettings::with_tolerance(1e-15, 1e-15).initial_panels(16),
        _ => {
            return Err(Error::domain(format!(
                "precision level {level} not in {PRECISION_LEVELS:?}"
            )))
        }
    };
    Ok(s)
}

/// `exp(−F)` with underflow clamped to zero.
fn decay(theta: f64, eps: f64) -> f64 {
    let f = phase_unchecked(theta, eps);
    if -f < EXP_UNDERFLOW {
        0.0
    } else {
        (-f).exp()
    }
}

/// `1 − exp(−F + iM)`, with the real part formed without cancellation.
fn one_minus_w(theta: f64, eps: f64, sin_m: f64, half_sin: f64) -> Complex64 {
    let f = phase_unchecked(theta, eps);
    if -f < EXP_UNDERFLOW {
        return Complex64::new(1.0, 0.0);
    }
    let e = (-f).exp();
    Complex64::new(-(-f).exp_m1() + e * 2.0 * half_sin * half_sin, -e * sin_m)
}

/// Panel boundaries resolving the arg variation near θ = 0 for small M.
fn small_m_hints(m: f64) -> Vec<f64> {
    let m = m.min(TAU - m);
    vec![(10.0 * m).min(0.1), m.min(0.1), (0.1 * m).min(0.1)]
}

/// Value of `S(ε; M)` with its quadrature error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SIntegral {
    pub value: f64,
    pub error: f64,
    /// Set when `dψ/dM = 1/(1 − ε cos ψ)` exceeds [`ILL_CONDITION_THRESHOLD`],
    /// which happens only near (ε, M) = (1, 0).
    pub ill_conditioned: bool,
}

/// `S(ε; M) = ψ − M` from the arg-form integral.
pub fn s_integral(orbit: &OrbitParams, m: MeanAnomaly) -> Result<SIntegral> {
    s_integral_with(orbit, m, &QuadSettings::default())
}

pub fn s_integral_with(
    orbit: &OrbitParams,
    m: MeanAnomaly,
    settings: &QuadSettings,
) -> Result<SIntegral> {
    let mv = m.value();
    let eps = orbit.eps();
    if mv == 0.0 || mv == PI || orbit.is_circular() {
        return Ok(SIntegral {
            value: 0.0,
            error: 0.0,
            ill_conditioned: false,
        });
    }
    let (sin_m, half_sin) = (mv.sin(), (0.5 * mv).sin());
    let r = integrate_real(
        |th| one_minus_w(th, eps, sin_m, half_sin).arg(),
        0.0,
        PI,
        settings,
        &small_m_hints(mv),
    )?;
    let value = -2.0 / PI * r.real()?;
    let psi = mv + value;
    let kappa = 1.0 / (1.0 - eps * psi.cos());
    Ok(SIntegral {
        value,
        error: 2.0 / PI * r.abs_error_estimate,
        ill_conditioned: !(kappa.abs() <= ILL_CONDITION_THRESHOLD),
    })
}

/// `𝕊(ε; M) = 2iπ − (2/π) ∫ log(exp(−F + iM) − 1) dθ`.
///
/// The principal logarithm of `w − 1` jumps by 2π when `sin M < 0`. Each
/// node's logarithm is moved onto the branch that is continuous with its
/// θ = π limit `log(−1) = iπ`, which is what fixes the constant `2iπ`.
pub fn s_complex_integral(orbit: &OrbitParams, m: MeanAnomaly) -> Result<Complex64> {
    s_complex_integral_with(orbit, m, &QuadSettings::default())
}

pub fn s_complex_integral_with(
    orbit: &OrbitParams,
    m: MeanAnomaly,
    settings: &QuadSettings,
) -> Result<Complex64> {
    let mv = m.value();
    let eps = orbit.eps();
    if orbit.is_circular() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (sin_m, half_sin) = (mv.sin(), (0.5 * mv).sin());
    let w_iso = Complex64::from_polar(1.0, mv);
    let r = integrate(
        |th| {
            let e = decay(th, eps);
            let principal = (e * w_iso - 1.0).ln();
            // Continuous branch: arg(1 − w) + π, with arg(1 − w) ∈ (−π/2, π/2).
            let one_minus = one_minus_w(th, eps, sin_m, half_sin);
            let reference = one_minus.arg() + PI;
            let wraps = ((reference - principal.im) / TAU).round();
            Complex64::new(one_minus.norm().ln(), principal.im + TAU * wraps)
        },
        0.0,
        PI,
        settings,
        &small_m_hints(mv),
    )?;
    Ok(Complex64::new(0.0, TAU) - 2.0 / PI * r.checked()?)
}

/// The continued Kapteyn sum `Σ z^m J_m(mε)/m` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationValue {
    pub z: Complex64,
    pub value: Complex64,
    pub quadrature_error: f64,
}

/// Start of the cut on the positive real axis: `exp(−λ)`, slightly relaxed.
pub fn cut_start(orbit: &OrbitParams) -> f64 {
    orbit.convergence_radius() * (1.0 - 1e-12)
}

/// `Σ z^m J_m(mε)/m`, continued to the plane cut along `[exp(−λ), ∞)`.
pub fn kapteyn_continuation(z: Complex64, orbit: &OrbitParams) -> Result<ContinuationValue> {
    kapteyn_continuation_with(z, orbit, &QuadSettings::default())
}

pub fn kapteyn_continuation_with(
    z: Complex64,
    orbit: &OrbitParams,
    settings: &QuadSettings,
) -> Result<ContinuationValue> {
    if !z.is_finite() {
        return Err(Error::domain("z must be finite"));
    }
    let zero = ContinuationValue {
        z,
        value: Complex64::new(0.0, 0.0),
        quadrature_error: 0.0,
    };
    if z.norm() == 0.0 || orbit.is_circular() {
        return Ok(zero);
    }
    if z.im == 0.0 && z.re >= cut_start(orbit) {
        return Err(Error::domain(format!(
            "z = {} lies on the cut [{}, ∞)",
            z.re,
            orbit.convergence_radius()
        )));
    }
    let eps = orbit.eps();
    let lambda = orbit.finite_lambda()?;
    // |1 − z exp(−F)| is smallest where F(θ) = log|z|.
    let mut hints = vec![];
    let level = z.norm().ln() + lambda;
    if level > 0.0 {
        if let Ok(th) = invert_shifted_phase(level, eps, lambda, 1e-10) {
            hints.push(th);
        }
    }
    let r: QuadratureResult = integrate(
        |th| (1.0 - z * decay(th, eps)).ln(),
        0.0,
        PI,
        settings,
        &hints,
    )?;
    Ok(ContinuationValue {
        z,
        value: -r.checked()? / PI,
        quadrature_error: r.abs_error_estimate / PI,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::{make_orbit, solve_kepler_oracle};

    fn mean(m: f64) -> MeanAnomaly {
        MeanAnomaly::new(m).unwrap()
    }

    fn oracle_s(eps: f64, m: f64) -> f64 {
        let orbit = make_orbit(eps).unwrap();
        solve_kepler_oracle(&orbit, mean(m), 1e-14).unwrap().value() - m
    }

    #[test]
    fn trivial_points() {
        let o = make_orbit(0.7).unwrap();
        assert_eq!(s_integral(&o, mean(0.0)).unwrap().value, 0.0);
        assert_eq!(s_integral(&o, mean(PI)).unwrap().value, 0.0);
        let circ = make_orbit(0.0).unwrap();
        assert_eq!(s_integral(&circ, mean(1.0)).unwrap().value, 0.0);
    }

    #[test]
    fn parabolic_matches_oracle() {
        let o = make_orbit(1.0).unwrap();
        let s = s_integral(&o, mean(1.0)).unwrap();
        assert!((s.value - oracle_s(1.0, 1.0)).abs() < 1e-8);
        assert!(!s.ill_conditioned);
    }

    #[test]
    fn oracle_sweep_parabolic() {
        let o = make_orbit(1.0).unwrap();
        for i in 1..=50 {
            let m = PI * i as f64 / 51.0;
            let psi = m + s_integral(&o, mean(m)).unwrap().value;
            let expect = m + oracle_s(1.0, m);
            assert!(((psi - expect) / expect).abs() <= 1e-8, "M = {m}");
        }
    }

    #[test]
    fn odd_in_mean_anomaly() {
        for &eps in &[0.3, 0.9, 1.0] {
            let o = make_orbit(eps).unwrap();
            for &m in &[0.2, 1.3, 2.9] {
                let a = s_integral(&o, mean(m)).unwrap().value;
                let b = s_integral(&o, mean(TAU - m)).unwrap().value;
                assert!((a + b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn complex_form_agrees_with_arg_form() {
        for &eps in &[0.2, 0.5, 0.9, 1.0] {
            let o = make_orbit(eps).unwrap();
            for &m in &[0.1, 1.0, 2.5, 3.5, 5.0, 6.2] {
                let s = s_integral(&o, mean(m)).unwrap().value;
                let c = s_complex_integral(&o, mean(m)).unwrap();
                assert!((c.im - s).abs() < 1e-10, "eps {eps} M {m}");
            }
        }
    }

    #[test]
    fn complex_form_real_part_is_series_re() {
        // Re 𝕊 = (2/π)·Re(−∫log(1 − w)) = 2 Σ J_n(nε) cos(nM)/n; compare with
        // the continuation at z = exp(iM), independently integrated.
        let o = make_orbit(0.5).unwrap();
        let c = s_complex_integral(&o, mean(1.0)).unwrap();
        let k = kapteyn_continuation(Complex64::from_polar(1.0, 1.0), &o).unwrap();
        assert!((c - 2.0 * k.value).norm() < 1e-10);
    }

    #[test]
    fn ill_conditioned_corner_is_flagged() {
        let o = make_orbit(1.0).unwrap();
        assert!(s_integral(&o, mean(1e-6)).unwrap().ill_conditioned);
    }

    #[test]
    fn continuation_cut_and_zero() {
        let o = make_orbit(0.9).unwrap();
        let r = o.convergence_radius();
        assert!(kapteyn_continuation(Complex64::new(r, 0.0), &o).is_err());
        assert!(kapteyn_continuation(Complex64::new(5.0 * r, 0.0), &o).is_err());
        assert!(kapteyn_continuation(Complex64::new(0.99 * r, 0.0), &o).is_ok());
        assert!(kapteyn_continuation(Complex64::new(-50.0, 0.0), &o).is_ok());
        let zero = kapteyn_continuation(Complex64::new(0.0, 0.0), &o).unwrap();
        assert_eq!(zero.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn continuation_table_one_point() {
        // Converged δ-transform value of the divergent series (60 digits).
        let o = make_orbit(0.9).unwrap();
        let z = Complex64::from_polar(10.0, PI / 3.0);
        let v = kapteyn_continuation(z, &o).unwrap();
        let expect = Complex64::new(-1.001_838_982, 1.238_765_242);
        assert!((v.value - expect).norm() < 2e-9, "{}", v.value);
        assert!(v.quadrature_error >= 0.0);
    }

    #[test]
    fn continuation_continuous_across_negative_axis() {
        let o = make_orbit(0.9).unwrap();
        let arc: Vec<Complex64> = (0..=40)
            .map(|i| {
                // Sweeps arg z from π − 0.01 through π to −(π − 0.01).
                let a = PI - 0.01 + 0.02 * i as f64 / 40.0;
                kapteyn_continuation(Complex64::from_polar(2.0, a), &o)
                    .unwrap()
                    .value
            })
            .collect();
        for w in arc.windows(2) {
            assert!((w[1] - w[0]).norm() < 1e-2);
        }
    }

    #[test]
    fn precision_levels() {
        for l in PRECISION_LEVELS {
            assert!(precision_settings(l).is_ok());
        }
        assert!(precision_settings(12).is_err());
    }
}
