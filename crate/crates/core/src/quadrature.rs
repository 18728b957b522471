//! Adaptive Gauss–Kronrod (7/15) integration on finite intervals.
//!
//! Real and complex integrands share one implementation: the integrand
//! returns a [`Complex64`], and both components are integrated on the same
//! panel tree. Panels are bisected in order of decreasing error estimate
//! until the global estimate meets the tolerance or the panel budget runs
//! out.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cap on the number of panels.
pub const DEFAULT_PANEL_BUDGET: usize = 10_000;

/// Panels whose local error estimate falls below this multiple of
/// `f64::EPSILON · ∫|f|` are at the rounding floor and are not refined.
const ROUNDOFF_FACTOR: f64 = 50.0;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the abscissae `XGK[1]`, `XGK[3]`, `XGK[5]`, `XGK[7]`.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub panel_budget: usize,
    /// Number of equal panels each hinted sub-interval starts with.
    pub initial_panels: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            tol_abs: 1e-13,
            tol_rel: 1e-12,
            panel_budget: DEFAULT_PANEL_BUDGET,
            initial_panels: 1,
        }
    }
}

impl QuadSettings {
    pub fn with_tolerance(tol_abs: f64, tol_rel: f64) -> Self {
        QuadSettings {
            tol_abs,
            tol_rel,
            ..Default::default()
        }
    }

    pub fn panel_budget(mut self, budget: usize) -> Self {
        self.panel_budget = budget.max(1);
        self
    }

    pub fn initial_panels(mut self, panels: usize) -> Self {
        self.initial_panels = panels.max(1);
        self
    }

    /// Accepted global error. The rounding term is twice the sum of the
    /// per-panel floors, so a tree whose panels all sit at their floor is
    /// accepted rather than refined until the budget runs out.
    fn target(&self, value: Complex64, abs_integral: f64) -> f64 {
        self.tol_abs
            .max(self.tol_rel * value.norm())
            .max(2.0 * ROUNDOFF_FACTOR * f64::EPSILON * abs_integral)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub panels_used: usize,
    pub converged: bool,
}

impl QuadratureResult {
    /// The real part, or an accuracy error when the tolerance was missed.
    pub fn real(&self) -> Result<f64> {
        self.checked().map(|v| v.re)
    }

    pub fn checked(&self) -> Result<Complex64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Accuracy {
                estimate: self.value.re,
                error: self.abs_error_estimate,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    abs_value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_panel<F>(f: &mut F, a: f64, b: f64) -> Panel
where
    F: FnMut(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.norm() * WGK[7];

    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += (f1 + f2) * w;
        abs_sum += (f1.norm() + f2.norm()) * w;
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }

    let value = kronrod * half;
    let abs_value = abs_sum * half.abs();
    let raw = ((kronrod - gauss) * half).norm();
    let floor = ROUNDOFF_FACTOR * f64::EPSILON * abs_value;
    Panel {
        a,
        b,
        value,
        abs_value,
        error: if raw.is_nan() {
            f64::INFINITY
        } else {
            raw.max(floor)
        },
    }
}

/// Neumaier-compensated sum over the panel values.
fn total(panels: &[Panel]) -> (Complex64, f64, f64) {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut err = 0.0;
    for p in panels {
        for (s, c, v) in [
            (&mut sum.re, &mut comp.re, p.value.re),
            (&mut sum.im, &mut comp.im, p.value.im),
        ] {
            let t = *s + v;
            if s.abs() >= v.abs() {
                *c += (*s - t) + v;
            } else {
                *c += (v - t) + *s;
            }
            *s = t;
        }
        abs_sum += p.abs_value;
        err += p.error;
    }
    (sum + comp, abs_sum, err)
}

/// Integrate `f` over `[a, b]`.
///
/// `split_hints` strictly inside `(a, b)` become initial panel boundaries;
/// hints outside the open interval are ignored. A result with
/// `converged == false` carries the best estimate reached when the panel
/// budget ran out.
pub fn integrate<F>(
    mut f: F,
    a: f64,
    b: f64,
    settings: &QuadSettings,
    split_hints: &[f64],
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Complex64,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!("invalid interval [{a}, {b}]")));
    }
    if !(settings.tol_abs > 0.0 && settings.tol_rel > 0.0) {
        return Err(Error::domain("tolerances must be positive"));
    }

    let mut cuts: Vec<f64> = split_hints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let per = settings.initial_panels.max(1);
    for w in cuts.windows(2) {
        let h = (w[1] - w[0]) / per as f64;
        for i in 0..per {
            let lo = w[0] + h * i as f64;
            let hi = if i + 1 == per {
                w[1]
            } else {
                w[0] + h * (i + 1) as f64
            };
            heap.push(kronrod_panel(&mut f, lo, hi));
        }
    }

    let mut value: Complex64 = heap.iter().map(|p| p.value).sum();
    let mut abs_integral: f64 = heap.iter().map(|p| p.abs_value).sum();
    let mut error: f64 = heap.iter().map(|p| p.error).sum();

    while heap.len() < settings.panel_budget {
        if error <= settings.target(value, abs_integral) {
            break;
        }
        let worst = match heap.peek() {
            Some(p) => *p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel cannot be split further in double precision.
            break;
        }
        heap.pop();
        let left = kronrod_panel(&mut f, worst.a, mid);
        let right = kronrod_panel(&mut f, mid, worst.b);
        value += left.value + right.value - worst.value;
        abs_integral += left.abs_value + right.abs_value - worst.abs_value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    let panels = heap.into_vec();
    let (value, abs_integral, error) = total(&panels);
    Ok(QuadratureResult {
        value,
        abs_error_estimate: error,
        panels_used: panels.len(),
        converged: error <= settings.target(value, abs_integral),
    })
}

/// Convenience wrapper for real integrands.
pub fn integrate_real<F>(
    mut f: F,
    a: f64,
    b: f64,
    settings: &QuadSettings,
    split_hints: &[f64],
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    integrate(|x| Complex64::new(f(x), 0.0), a, b, settings, split_hints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn quad(f: impl FnMut(f64) -> f64, a: f64, b: f64) -> QuadratureResult {
        integrate_real(f, a, b, &QuadSettings::default(), &[]).unwrap()
    }

    #[test]
    fn sine_over_half_period() {
        let r = quad(f64::sin, 0.0, PI);
        assert!(r.converged);
        assert!((r.value.re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cubic_on_unit_interval() {
        let r = quad(|t| t * t * t, 0.0, 1.0);
        assert!((r.value.re - 0.25).abs() < 1e-15);
        assert_eq!(r.panels_used, 1);
    }

    #[test]
    fn monomials_exact_up_to_kronrod_degree() {
        // A single 15-point Kronrod panel integrates degree ≤ 22 exactly.
        for k in 0..=22 {
            let p = kronrod_panel(&mut |x: f64| Complex64::new(x.powi(k), 0.0), 0.0, 1.0);
            let exact = 1.0 / (k as f64 + 1.0);
            assert!((p.value.re - exact).abs() < 1e-14, "degree {k}");
        }
    }

    #[test]
    fn complex_components_share_nodes() {
        let mut nodes = Vec::new();
        let r = integrate(
            |x| {
                nodes.push(x);
                Complex64::new(x.cos(), x.sin())
            },
            0.0,
            1.0,
            &QuadSettings::default(),
            &[],
        )
        .unwrap();
        assert!((r.value - Complex64::new(1f64.sin(), 1.0 - 1f64.cos())).norm() < 1e-14);
        assert_eq!(nodes.len(), 15 * (2 * r.panels_used - 1));
    }

    #[test]
    fn split_hints_become_boundaries() {
        let r = integrate_real(|x| x.abs(), -1.0, 2.0, &QuadSettings::default(), &[0.0]).unwrap();
        assert!(r.converged);
        assert_eq!(r.panels_used, 2);
        assert!((r.value.re - 2.5).abs() < 1e-15);
        // Hints outside the open interval are dropped.
        let r =
            integrate_real(|x| x, 0.0, 1.0, &QuadSettings::default(), &[0.0, 1.0, 3.0]).unwrap();
        assert_eq!(r.panels_used, 1);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let settings = QuadSettings::default().panel_budget(3);
        let r = integrate_real(|x| x.sqrt(), 0.0, 1.0, &settings, &[]).unwrap();
        assert!(!r.converged);
        assert!(r.panels_used <= 3);
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-3);
        assert!(matches!(r.real(), Err(Error::Accuracy { .. })));
    }

    #[test]
    fn rejects_bad_arguments() {
        let s = QuadSettings::default();
        assert!(integrate_real(|x| x, 1.0, 0.0, &s, &[]).is_err());
        assert!(integrate_real(
            |x| x,
            0.0,
            1.0,
            &QuadSettings::with_tolerance(0.0, 1e-3),
            &[]
        )
        .is_err());
    }

    #[test]
    fn endpoint_singularity_converges() {
        let r = quad(|x| x.sqrt(), 0.0, 1.0);
        assert!(r.converged);
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-12);
    }
}
