//! Orbit geometry and the root-finding reference solution of the Kepler
//! equation.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Iteration cap for [`solve_kepler_oracle`].
pub const ORACLE_MAX_ITER: usize = 200;

/// Default residual tolerance for [`solve_kepler_oracle`].
pub const ORACLE_DEFAULT_TOL: f64 = 1e-13;

/// The decay exponent `λ = χ + ½ log((1 − χ)/(1 + χ))`.
///
/// For a circular orbit (`ε = 0`) the exponent is `−∞`; that case is kept
/// as its own variant so no NaN or infinity leaks into downstream
/// arithmetic by accident.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayExponent {
    Finite(f64),
    NegativeInfinity,
}

impl DecayExponent {
    /// The exponent as a float (`-inf` for the degenerate case).
    pub fn value(self) -> f64 {
        match self {
            DecayExponent::Finite(l) => l,
            DecayExponent::NegativeInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            DecayExponent::Finite(l) => Some(l),
            DecayExponent::NegativeInfinity => None,
        }
    }

    pub fn is_degenerate(self) -> bool {
        matches!(self, DecayExponent::NegativeInfinity)
    }
}

/// Eccentricity `ε`, aspect ratio `χ = √(1 − ε²)` and decay exponent `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitParams {
    eps: f64,
    chi: f64,
    lambda: DecayExponent,
}

impl OrbitParams {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn lambda(&self) -> DecayExponent {
        self.lambda
    }

    /// `λ` for `ε > 0`, or a domain error for the circular orbit.
    pub fn finite_lambda(&self) -> Result<f64> {
        self.lambda
            .finite()
            .ok_or_else(|| Error::domain("λ is −∞ for ε = 0"))
    }

    pub fn is_circular(&self) -> bool {
        self.lambda.is_degenerate()
    }

    /// Convergence radius `exp(−λ)` of `Σ z^m J_m(mε)/m`.
    pub fn convergence_radius(&self) -> f64 {
        (-self.lambda.value()).exp()
    }
}

/// Build the orbit triple for `0 ≤ ε ≤ 1`.
pub fn make_orbit(eps: f64) -> Result<OrbitParams> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::domain(format!("eccentricity {eps} outside [0, 1]")));
    }
    // (1 − ε)(1 + ε) keeps full relative accuracy as ε → 1.
    let chi = ((1.0 - eps) * (1.0 + eps)).sqrt();
    let lambda = if eps == 0.0 {
        DecayExponent::NegativeInfinity
    } else {
        // (1 − χ)/(1 + χ) = ε²/(1 + χ)², which avoids the cancellation in
        // 1 − χ for small ε.
        DecayExponent::Finite(chi + (eps / (1.0 + chi)).ln())
    };
    Ok(OrbitParams { eps, chi, lambda })
}

/// Mean anomaly reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MeanAnomaly(f64);

impl MeanAnomaly {
    pub fn new(m: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::domain(format!("mean anomaly {m} is not finite")));
        }
        let r = m.rem_euclid(TAU);
        // rem_euclid can round up to exactly 2π for tiny negative inputs.
        Ok(MeanAnomaly(if r >= TAU { 0.0 } else { r }))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Fold onto `[0, π]`; the flag is set when `M` was in `(π, 2π)`.
    pub fn folded(self) -> (f64, bool) {
        if self.0 > PI {
            (TAU - self.0, true)
        } else {
            (self.0, false)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EccentricAnomaly(f64);

impl EccentricAnomaly {
    pub fn new(psi: f64) -> Self {
        EccentricAnomaly(psi)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn kepler_residual(eps: f64, m: f64, psi: f64) -> f64 {
    psi - eps * psi.sin() - m
}

/// Solve `M = ψ − ε sin ψ` to residual `tol` by Newton's method started
/// at `ψ = π`, with bisection whenever a step leaves the bracket or fails
/// to halve it.
pub fn solve_kepler_oracle(
    orbit: &OrbitParams,
    m: MeanAnomaly,
    tol: f64,
) -> Result<EccentricAnomaly> {
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let eps = orbit.eps();
    let (mf, mirrored) = m.folded();
    if eps == 0.0 || mf == 0.0 || mf == PI {
        return Ok(unfold(mf, mirrored));
    }

    let f = |psi: f64| kepler_residual(eps, mf, psi);
    let (mut lo, mut hi) = (0.0_f64, TAU);
    let mut psi = PI;
    let mut fpsi = f(psi);
    let mut prev_step = hi - lo;

    for _ in 0..ORACLE_MAX_ITER {
        if fpsi.abs() <= tol {
            return Ok(unfold(psi, mirrored));
        }
        if fpsi < 0.0 {
            lo = psi;
        } else {
            hi = psi;
        }
        let deriv = 1.0 - eps * psi.cos();
        let newton = psi - fpsi / deriv;
        let step = (newton - psi).abs();
        psi = if deriv > 0.0 && newton > lo && newton < hi && step <= 0.5 * prev_step {
            prev_step = step;
            newton
        } else {
            prev_step = hi - lo;
            0.5 * (lo + hi)
        };
        fpsi = f(psi);
        if hi - lo <= 4.0 * f64::EPSILON * hi && fpsi.abs() > tol {
            break;
        }
    }
    Err(Error::Convergence {
        iterations: ORACLE_MAX_ITER,
        residual: fpsi.abs(),
    })
}

fn unfold(psi: f64, mirrored: bool) -> EccentricAnomaly {
    EccentricAnomaly(if mirrored { TAU - psi } else { psi })
}

/// `S(ε; M) = ψ − M`.
pub fn s_from_psi(psi: EccentricAnomaly, m: MeanAnomaly) -> f64 {
    psi.value() - m.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(x: f64) -> MeanAnomaly {
        MeanAnomaly::new(x).unwrap()
    }

    /// Plain bisection on `[0, 2π]`, independent of the Newton path.
    fn bisection(eps: f64, mean: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, TAU);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if kepler_residual(eps, mean, mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn parabolic_orbit() {
        let o = make_orbit(1.0).unwrap();
        assert_eq!(o.chi(), 0.0);
        assert_eq!(o.lambda(), DecayExponent::Finite(0.0));
    }

    #[test]
    fn circular_orbit_is_degenerate() {
        let o = make_orbit(0.0).unwrap();
        assert_eq!(o.chi(), 1.0);
        assert!(o.is_circular());
        assert_eq!(o.lambda().value(), f64::NEG_INFINITY);
        assert!(o.finite_lambda().is_err());
    }

    #[test]
    fn lambda_fixture() {
        // 0.8 + ½ log(0.2/1.8), evaluated at 40 digits.
        let o = make_orbit(0.6).unwrap();
        assert!((o.chi() - 0.8).abs() < 1e-15);
        let l = o.finite_lambda().unwrap();
        assert!((l - (-0.298_612_288_668_109_691_4)).abs() < 1e-15);
        assert!(l < 0.0);
    }

    #[test]
    fn eccentricity_out_of_range() {
        assert!(matches!(make_orbit(-0.1), Err(Error::Domain(_))));
        assert!(matches!(make_orbit(1.0 + 1e-12), Err(Error::Domain(_))));
        assert!(make_orbit(f64::NAN).is_err());
    }

    #[test]
    fn mean_anomaly_reduction() {
        assert!((m(TAU + 1.0).value() - 1.0).abs() < 1e-15);
        assert!((m(-1.0).value() - (TAU - 1.0)).abs() < 1e-15);
        assert!(m(-1e-300).value() < TAU);
        assert!(MeanAnomaly::new(f64::INFINITY).is_err());
    }

    #[test]
    fn trivial_roots() {
        let tol = ORACLE_DEFAULT_TOL;
        let psi = solve_kepler_oracle(&make_orbit(0.5).unwrap(), m(0.0), tol).unwrap();
        assert_eq!(psi.value(), 0.0);
        let psi = solve_kepler_oracle(&make_orbit(0.0).unwrap(), m(1.3), tol).unwrap();
        assert_eq!(psi.value(), 1.3);
        let psi = solve_kepler_oracle(&make_orbit(1.0).unwrap(), m(PI), tol).unwrap();
        assert_eq!(psi.value(), PI);
    }

    #[test]
    fn matches_bisection_fixture() {
        let o = make_orbit(0.9).unwrap();
        let psi = solve_kepler_oracle(&o, m(0.5), 1e-14).unwrap().value();
        // 40-digit bisection: 1.3844127202021625769
        assert!((psi - 1.384_412_720_202_162_6).abs() < 1e-14);
        assert!((psi - bisection(0.9, 0.5)).abs() < 1e-14);
        let s = s_from_psi(EccentricAnomaly::new(psi), m(0.5));
        assert!((s - 0.884_412_720_202_162_6).abs() < 1e-14);
    }

    #[test]
    fn s_from_psi_trivial() {
        assert_eq!(s_from_psi(EccentricAnomaly::new(1.3), m(1.3)), 0.0);
        assert_eq!(s_from_psi(EccentricAnomaly::new(PI), m(PI)), 0.0);
    }

    #[test]
    fn near_parabolic_corner() {
        let o = make_orbit(1.0).unwrap();
        for &mean in &[1e-8, 1e-5, 1e-3] {
            let psi = solve_kepler_oracle(&o, m(mean), 1e-15).unwrap().value();
            assert!(kepler_residual(1.0, mean, psi).abs() <= 1e-15);
            assert!((psi - bisection(1.0, mean)).abs() < 1e-6 * psi);
        }
    }

    #[test]
    fn unreachable_tolerance_reports_residual() {
        // A residual of 1e−30 is reachable only by hitting the root exactly.
        let o = make_orbit(0.7).unwrap();
        let mut failures = 0;
        for i in 1..20 {
            let mean = 0.15 * i as f64;
            match solve_kepler_oracle(&o, m(mean), 1e-30) {
                Ok(psi) => assert!(kepler_residual(0.7, mean, psi.value()).abs() <= 1e-30),
                Err(Error::Convergence { residual, .. }) => {
                    assert!(residual < 1e-14);
                    failures += 1;
                }
                Err(e) => panic!("unexpected error {e:?}"),
            }
        }
        assert!(failures > 0);
        assert!(solve_kepler_oracle(&o, m(2.0), 0.0).is_err());
    }

    #[test]
    fn monotone_in_mean_anomaly() {
        for &eps in &[0.3, 0.9, 1.0] {
            let o = make_orbit(eps).unwrap();
            let psis: Vec<f64> = (1..=100)
                .map(|i| {
                    let mean = PI * i as f64 / 101.0;
                    solve_kepler_oracle(&o, m(mean), ORACLE_DEFAULT_TOL)
                        .unwrap()
                        .value()
                })
                .collect();
            assert!(psis.windows(2).all(|w| w[1] > w[0]), "eps {eps}");
            assert!(psis.iter().enumerate().all(|(i, &p)| {
                let mean = PI * (i + 1) as f64 / 101.0;
                p >= mean && p <= PI
            }));
        }
    }

    #[test]
    fn mirror_symmetry() {
        let tol = ORACLE_DEFAULT_TOL;
        for &eps in &[0.2, 0.95, 0.999] {
            let o = make_orbit(eps).unwrap();
            for i in 1..50 {
                let mean = PI * i as f64 / 50.0;
                let a = solve_kepler_oracle(&o, m(mean), tol).unwrap().value();
                let b = solve_kepler_oracle(&o, m(TAU - mean), tol).unwrap().value();
                assert!((b - (TAU - a)).abs() <= 10.0 * tol);
            }
        }
    }
}
