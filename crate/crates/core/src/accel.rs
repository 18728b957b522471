//! Kapteyn partial sums and sequence transformations.
//!
//! Both transformations map a finite run of partial sums to a triangular
//! table of estimates. Wynn's ε algorithm produces Padé values of the
//! underlying power series; the Weniger δ-transformation uses the factorial
//! weights `(β + n + j)_{k−1}` and the remainder estimate `ω_n = a_{n+1}`.
//!
//! Entries whose denominator vanishes are kept as [`TableEntry::Breakdown`]
//! rather than aborting the table; entries that depend on a breakdown are
//! breakdowns too.

use std::ops::{Add, Div, Mul, Sub};

use num_complex::Complex64;

use crate::dd::{Dd, DdComplex};
use crate::error::{Error, Result};
use crate::orbit::{MeanAnomaly, OrbitParams};
use crate::watson::{bessel_miller_dd, bessel_scaled};

/// Denominators below this magnitude count as a breakdown.
pub const BREAKDOWN_GUARD: f64 = 1e-300;

/// Up to this column the δ numerator and denominator use the binomial sum.
const BINOMIAL_MAX_K: usize = 10;

const LOG_MAX: f64 = 709.0;

/// A run of terms `a_n` and their partial sums `s_n = Σ_{k ≤ n} a_k`.
///
/// `first_index` is the series index of the first stored term; the Kapteyn
/// sums start at m = 1. Transformations index the stored run from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSums {
    first_index: usize,
    terms: Vec<Complex64>,
    sums: Vec<Complex64>,
}

impl PartialSums {
    pub fn from_terms(first_index: usize, terms: Vec<Complex64>) -> Self {
        let mut acc = Complex64::new(0.0, 0.0);
        let sums = terms
            .iter()
            .map(|&a| {
                acc += a;
                acc
            })
            .collect();
        PartialSums {
            first_index,
            terms,
            sums,
        }
    }

    pub fn first_index(&self) -> usize {
        self.first_index
    }

    pub fn terms(&self) -> &[Complex64] {
        &self.terms
    }

    pub fn sums(&self) -> &[Complex64] {
        &self.sums
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    /// `s_n` by series index.
    pub fn sum_at(&self, n: usize) -> Option<Complex64> {
        n.checked_sub(self.first_index)
            .and_then(|i| self.sums.get(i).copied())
    }

    /// The first `len` stored entries.
    pub fn truncated(&self, len: usize) -> Self {
        let len = len.min(self.len());
        PartialSums {
            first_index: self.first_index,
            terms: self.terms[..len].to_vec(),
            sums: self.sums[..len].to_vec(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        PartialSums::from_terms(
            self.first_index,
            self.terms.iter().map(|&a| c * a).collect(),
        )
    }
}

/// `a_m = z^m J_m(mε)/m` for `m = 1…n_terms`.
///
/// Each term is assembled from `log|z|`, λ and the scaled Bessel value so
/// that `|z|^m` and `exp(λm)` never overflow separately.
pub fn kapteyn_partial_sums(
    z: Complex64,
    orbit: &OrbitParams,
    n_terms: usize,
) -> Result<PartialSums> {
    if n_terms == 0 {
        return Err(Error::domain("need at least one term"));
    }
    if !z.is_finite() {
        return Err(Error::domain("z must be finite"));
    }
    if z.norm() == 0.0 || orbit.is_circular() {
        return Ok(PartialSums::from_terms(
            1,
            vec![Complex64::new(0.0, 0.0); n_terms],
        ));
    }
    let lambda = orbit.finite_lambda()?;
    let (log_r, phase) = (z.norm().ln(), z.arg());
    let mut terms = Vec::with_capacity(n_terms);
    for m in 1..=n_terms {
        let mf = m as f64;
        let b = bessel_scaled(m as u32, orbit)?;
        let log_mag = mf * (log_r + lambda) + b.ln() - mf.ln();
        if log_mag > LOG_MAX {
            return Err(Error::Range {
                index: m,
                log_magnitude: log_mag,
            });
        }
        terms.push(Complex64::from_polar(log_mag.exp(), mf * phase));
    }
    Ok(PartialSums::from_terms(1, terms))
}

/// Terms of `𝕊(ε; M) = Σ (2/n) J_n(nε) exp(inM)` for `n = 1…n_terms`.
pub fn kepler_partial_sums(
    orbit: &OrbitParams,
    m: MeanAnomaly,
    n_terms: usize,
) -> Result<PartialSums> {
    let z = Complex64::from_polar(1.0, m.value());
    Ok(kapteyn_partial_sums(z, orbit, n_terms)?.scaled(Complex64::new(2.0, 0.0)))
}

/// Bound on `|𝕊 − s_N|` from `J_n(nε) ≤ exp(λn)`.
pub fn kepler_tail_bound(orbit: &OrbitParams, n_terms: usize) -> Result<f64> {
    let lambda = orbit.finite_lambda()?;
    if lambda >= 0.0 {
        return Ok(f64::INFINITY);
    }
    let next = (n_terms + 1) as f64;
    Ok(2.0 * (lambda * next).exp() / (next * -lambda.exp_m1()))
}

/// A truncated Kepler series with its certified tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSeries {
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// `𝕊(ε; M)` summed until the tail bound drops below `tol` (ε < 1).
pub fn kepler_series(orbit: &OrbitParams, m: MeanAnomaly, tol: f64) -> Result<TruncatedSeries> {
    if orbit.is_circular() {
        return Ok(TruncatedSeries {
            value: Complex64::new(0.0, 0.0),
            tail_bound: 0.0,
            terms: 0,
        });
    }
    if kepler_tail_bound(orbit, 1)?.is_infinite() {
        return Err(Error::domain(
            "the Kapteyn series has no geometric tail bound at ε = 1",
        ));
    }
    let mut n = 1;
    while kepler_tail_bound(orbit, n)? > tol {
        n += 1;
        if n > 1_000_000 {
            return Err(Error::InsufficientData(format!(
                "tail bound {tol:e} needs more than 10^6 terms"
            )));
        }
    }
    let sums = kepler_partial_sums(orbit, m, n)?;
    Ok(TruncatedSeries {
        value: sums.sums()[n - 1],
        tail_bound: kepler_tail_bound(orbit, n)?,
        terms: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    WynnEpsilon,
    WenigerDelta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableEntry {
    Value(Complex64),
    Breakdown,
}

impl TableEntry {
    pub fn value(self) -> Option<Complex64> {
        match self {
            TableEntry::Value(v) => Some(v),
            TableEntry::Breakdown => None,
        }
    }
}

/// Triangular table of transformation estimates.
///
/// `entry(n, k)` is `ε_{2k}^{(n)}` for Wynn and `δ_k^{(n)}` for Weniger;
/// column 0 holds the input sums. Indices outside the triangle return
/// `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformTable {
    kind: TransformKind,
    beta: Option<f64>,
    /// `columns[k][n]`.
    columns: Vec<Vec<TableEntry>>,
}

impl TransformTable {
    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    pub fn columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column_len(&self, k: usize) -> usize {
        self.columns.get(k).map_or(0, Vec::len)
    }

    pub fn entry(&self, n: usize, k: usize) -> Option<TableEntry> {
        self.columns.get(k).and_then(|c| c.get(n)).copied()
    }

    pub fn value(&self, n: usize, k: usize) -> Option<Complex64> {
        self.entry(n, k).and_then(TableEntry::value)
    }

    pub fn is_breakdown(&self, n: usize, k: usize) -> bool {
        matches!(self.entry(n, k), Some(TableEntry::Breakdown))
    }

    /// The estimates a resummation reports, lowest order first. For Weniger
    /// this is the `n = 0` row. For Wynn it is, for each number of input
    /// sums, the highest even column that did not break down on the
    /// anti-diagonal ending at the last sum.
    fn diagonal(&self) -> Vec<TableEntry> {
        match self.kind {
            TransformKind::WenigerDelta => self.columns.iter().map(|c| c[0]).collect(),
            TransformKind::WynnEpsilon => (0..self.columns[0].len())
                .map(|last| {
                    (0..=last / 2)
                        .rev()
                        .map(|k| self.columns[k][last - 2 * k])
                        .find(|e| e.value().is_some())
                        .unwrap_or(TableEntry::Breakdown)
                })
                .collect(),
        }
    }
}

fn check_len(sums: &PartialSums, min: usize) -> Result<()> {
    if sums.len() < min {
        return Err(Error::InsufficientData(format!(
            "need at least {min} partial sums, got {}",
            sums.len()
        )));
    }
    Ok(())
}

/// Wynn's ε algorithm; the table keeps the even columns.
pub fn wynn_epsilon(sums: &PartialSums) -> Result<TransformTable> {
    check_len(sums, 3)?;
    Ok(wynn_table(sums.sums()))
}

fn wynn_table<T: Scalar>(s: &[T]) -> TransformTable {
    let one = T::ratio(1.0, 1.0);
    let mut prev: Vec<Option<T>> = vec![Some(T::zero()); s.len() + 1];
    let mut cur: Vec<Option<T>> = s.iter().map(|&v| Some(v)).collect();
    let mut even = vec![to_entries(&cur)];
    let mut k = 0;
    while cur.len() > 1 {
        let next: Vec<Option<T>> = (0..cur.len() - 1)
            .map(|n| {
                let (lo, hi, back) = (cur[n]?, cur[n + 1]?, prev[n + 1]?);
                let diff = hi - lo;
                if diff.rounded().norm() < BREAKDOWN_GUARD {
                    return None;
                }
                let v = back + one / diff;
                v.rounded().is_finite().then_some(v)
            })
            .collect();
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            even.push(to_entries(&cur));
        }
    }
    TransformTable {
        kind: TransformKind::WynnEpsilon,
        beta: None,
        columns: even,
    }
}

fn to_entries<T: Scalar>(col: &[Option<T>]) -> Vec<TableEntry> {
    col.iter()
        .map(|v| v.map_or(TableEntry::Breakdown, |x| TableEntry::Value(x.rounded())))
        .collect()
}

/// Arithmetic the δ kernel runs in: plain complex doubles or complex
/// double-double.
pub(crate) trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn zero() -> Self;
    /// The real number `p/q`, rounded in this arithmetic.
    fn ratio(p: f64, q: f64) -> Self;
    fn rounded(self) -> Complex64;
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn ratio(p: f64, q: f64) -> Self {
        Complex64::new(p / q, 0.0)
    }
    fn rounded(self) -> Complex64 {
        self
    }
}

impl Scalar for DdComplex {
    fn zero() -> Self {
        DdComplex::ZERO
    }
    fn ratio(p: f64, q: f64) -> Self {
        DdComplex::real(Dd::ratio(p, q))
    }
    fn rounded(self) -> Complex64 {
        self.to_c64()
    }
}

fn entry_from_ratio<T: Scalar>(num: T, den: T) -> TableEntry {
    if den.rounded().norm() < BREAKDOWN_GUARD {
        return TableEntry::Breakdown;
    }
    let v = (num / den).rounded();
    if v.is_finite() {
        TableEntry::Value(v)
    } else {
        TableEntry::Breakdown
    }
}

fn binomial(k: usize, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// `(b + j)_{k−1} / (b + k)_{k−1}` as a product of single ratios.
fn pochhammer_ratio<T: Scalar>(b: f64, j: usize, k: usize) -> T {
    (0..k.saturating_sub(1)).fold(T::ratio(1.0, 1.0), |acc, i| {
        acc * T::ratio(b + (j + i) as f64, b + (k + i) as f64)
    })
}

/// Columns `1…` of the δ table for sums `s` and terms `a`.
fn delta_columns<T: Scalar>(s: &[T], a: &[T], beta: f64) -> Vec<Vec<TableEntry>> {
    let zero = T::zero();
    let one = T::ratio(1.0, 1.0);
    // Rows with a remainder estimate available.
    let rows = s.len() - 1;
    let inv_omega: Vec<T> = (0..rows)
        .map(|n| {
            if a[n + 1].rounded().norm() < BREAKDOWN_GUARD {
                zero
            } else {
                one / a[n + 1]
            }
        })
        .collect();
    let dead: Vec<bool> = inv_omega
        .iter()
        .map(|w| w.rounded().norm() == 0.0)
        .collect();
    let has_dead = |n: usize, k: usize| dead[n..=n + k].iter().any(|&d| d);

    let mut num: Vec<T> = (0..rows).map(|n| s[n] * inv_omega[n]).collect();
    let mut den: Vec<T> = inv_omega.clone();
    let mut columns = Vec::with_capacity(rows);
    for k in 1..rows {
        let width = rows - k;
        // Advance the recurrence from column k − 1 to k.
        let km = (k - 1) as f64;
        let coeff: Vec<T> = (0..width)
            .map(|n| {
                let b = beta + n as f64;
                if k == 1 {
                    one
                } else {
                    T::ratio(
                        (b + km) * (b + km - 1.0),
                        (b + 2.0 * km) * (b + 2.0 * km - 1.0),
                    )
                }
            })
            .collect();
        num = (0..width).map(|n| num[n + 1] - coeff[n] * num[n]).collect();
        den = (0..width).map(|n| den[n + 1] - coeff[n] * den[n]).collect();

        let col = (0..width)
            .map(|n| {
                if has_dead(n, k) {
                    return TableEntry::Breakdown;
                }
                if k > BINOMIAL_MAX_K {
                    return entry_from_ratio(num[n], den[n]);
                }
                let (mut p, mut q) = (zero, zero);
                let b = beta + n as f64;
                for j in 0..=k {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    let c = T::ratio(sign * binomial(k, j), 1.0) * pochhammer_ratio::<T>(b, j, k);
                    p = p + c * s[n + j] * inv_omega[n + j];
                    q = q + c * inv_omega[n + j];
                }
                entry_from_ratio(p, q)
            })
            .collect();
        columns.push(col);
    }
    columns
}

/// The Weniger δ-transformation with shift `beta` and `ω_n = a_{n+1}`.
///
/// Column `k` at row `n` uses `s_n … s_{n+k}` and `a_{n+1} … a_{n+k+1}`.
/// Up to `k = 10` numerator and denominator are the explicit binomial
/// sums; beyond that the three-term recurrence
/// `X_{k+1}^{(n)} = X_k^{(n+1)} − c_{n,k} X_k^{(n)}` is used, whose common
/// sign flip cancels in the ratio.
pub fn weniger_delta(sums: &PartialSums, beta: f64) -> Result<TransformTable> {
    check_beta(beta)?;
    check_len(sums, 2)?;
    Ok(delta_table(sums.sums(), sums.terms(), beta))
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) {
        return Err(Error::domain("β must be positive"));
    }
    Ok(())
}

fn delta_table<T: Scalar>(s: &[T], a: &[T], beta: f64) -> TransformTable {
    let mut columns = vec![s
        .iter()
        .map(|v| TableEntry::Value(v.rounded()))
        .collect::<Vec<_>>()];
    columns.extend(delta_columns(s, a, beta));
    TransformTable {
        kind: TransformKind::WenigerDelta,
        beta: Some(beta),
        columns,
    }
}

/// The highest-order valid estimate and `|last − previous|`.
pub fn best_estimate(table: &TransformTable) -> Result<(Complex64, f64)> {
    let valid: Vec<Complex64> = table
        .diagonal()
        .into_iter()
        .filter_map(TableEntry::value)
        .collect();
    match valid.as_slice() {
        [.., prev, last] => Ok((*last, (*last - *prev).norm())),
        _ => Err(Error::InsufficientData(
            "fewer than two valid diagonal entries".into(),
        )),
    }
}

/// Number of Kapteyn terms the δ estimate of resummation order `order`
/// consumes: `δ_{order+1}^{(0)}` needs `s_1 … s_{order+2}` and `a_{order+3}`.
pub fn delta_terms_for_order(order: usize) -> usize {
    order + 3
}

/// `δ_{order+1}^{(0)}` of a run with at least `order + 3` terms.
pub fn delta_at_order(sums: &PartialSums, order: usize, beta: f64) -> Result<TableEntry> {
    let needed = delta_terms_for_order(order);
    check_len(sums, needed)?;
    let table = weniger_delta(&sums.truncated(needed), beta)?;
    table
        .entry(0, order + 1)
        .ok_or_else(|| Error::Internal("δ table shorter than expected".into()))
}

/// Kapteyn partial sums carried in double-double.
///
/// The δ-transformation of a strongly divergent series cancels many
/// digits: at (ε, z) = (0.9, 10·e^{iπ/3}) the order-30 estimate amplifies
/// relative input noise by about 10²⁰. Terms accurate to double precision
/// therefore cannot resolve high orders; this route computes `J_m(mε)` by
/// Miller's recurrence and the sums and the transformation in
/// double-double arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedPartialSums {
    terms: Vec<DdComplex>,
    sums: Vec<DdComplex>,
}

/// `a_m = z^m J_m(mε)/m` for `m = 1…n_terms` in double-double.
pub fn kapteyn_partial_sums_extended(
    z: Complex64,
    orbit: &OrbitParams,
    n_terms: usize,
) -> Result<ExtendedPartialSums> {
    if n_terms == 0 {
        return Err(Error::domain("need at least one term"));
    }
    if !z.is_finite() {
        return Err(Error::domain("z must be finite"));
    }
    let mut terms = Vec::with_capacity(n_terms);
    if z.norm() == 0.0 || orbit.is_circular() {
        terms.resize(n_terms, DdComplex::ZERO);
    } else {
        let zd = DdComplex::from_c64(z);
        // z^m = zpow · 2^zexp with zpow kept near unit size.
        let (mut zpow, mut zexp) = (DdComplex::real(Dd::ONE), 0i32);
        for m in 1..=n_terms {
            zpow = zpow * zd;
            let e = zpow.exponent().unwrap_or(0);
            zpow = zpow.ldexp(-e);
            zexp += e;
            let (j, je) = bessel_miller_dd(m as u32, Dd::prod(m as f64, orbit.eps()))?;
            let mant = zpow.scale(j / Dd::new(m as f64));
            let total = zexp + je;
            let log_mag = total as f64 * std::f64::consts::LN_2 + mant.to_c64().norm().ln();
            if log_mag > LOG_MAX {
                return Err(Error::Range {
                    index: m,
                    log_magnitude: log_mag,
                });
            }
            terms.push(if total < -1000 {
                DdComplex::ZERO
            } else {
                mant.ldexp(total)
            });
        }
    }
    let mut acc = DdComplex::ZERO;
    let sums = terms
        .iter()
        .map(|&a| {
            acc = acc + a;
            acc
        })
        .collect();
    Ok(ExtendedPartialSums { terms, sums })
}

impl ExtendedPartialSums {
    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    /// The run rounded to double, starting at m = 1.
    pub fn rounded(&self) -> PartialSums {
        PartialSums {
            first_index: 1,
            terms: self.terms.iter().map(|t| t.to_c64()).collect(),
            sums: self.sums.iter().map(|s| s.to_c64()).collect(),
        }
    }

    /// The Weniger δ table computed in double-double.
    pub fn weniger_delta(&self, beta: f64) -> Result<TransformTable> {
        check_beta(beta)?;
        if self.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "need at least 2 partial sums, got {}",
                self.len()
            )));
        }
        Ok(delta_table(&self.sums, &self.terms, beta))
    }

    /// Wynn's ε table computed in double-double.
    pub fn wynn_epsilon(&self) -> Result<TransformTable> {
        if self.len() < 3 {
            return Err(Error::InsufficientData(format!(
                "need at least 3 partial sums, got {}",
                self.len()
            )));
        }
        Ok(wynn_table(&self.sums))
    }

    /// The first `len` entries.
    pub fn truncated(&self, len: usize) -> Self {
        let len = len.min(self.len());
        ExtendedPartialSums {
            terms: self.terms[..len].to_vec(),
            sums: self.sums[..len].to_vec(),
        }
    }

    /// `δ_{order+1}^{(0)}`, exactly as [`delta_at_order`] but in double-double.
    pub fn delta_at_order(&self, order: usize, beta: f64) -> Result<TableEntry> {
        let needed = delta_terms_for_order(order);
        if self.len() < needed {
            return Err(Error::InsufficientData(format!(
                "order {order} needs {needed} terms, got {}",
                self.len()
            )));
        }
        check_beta(beta)?;
        let table = delta_table(&self.sums[..needed], &self.terms[..needed], beta);
        table
            .entry(0, order + 1)
            .ok_or_else(|| Error::Internal("δ table shorter than expected".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::make_orbit;
    use crate::quadrature::{integrate_real, QuadSettings};
    use crate::stieltjes::{polylog_series_to, polylog_stieltjes};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn geometric(z: Complex64, n: usize) -> PartialSums {
        PartialSums::from_terms(0, (0..n).map(|k| z.powi(k as i32)).collect())
    }

    #[test]
    fn partial_sums_bookkeeping() {
        let p = PartialSums::from_terms(1, vec![c(1.0), c(2.0), c(3.0)]);
        assert_eq!(p.sums(), &[c(1.0), c(3.0), c(6.0)]);
        assert_eq!(p.sum_at(2), Some(c(3.0)));
        assert_eq!(p.sum_at(0), None);
        for (i, w) in p.sums().windows(2).enumerate() {
            assert_eq!(w[1] - w[0], p.terms()[i + 1]);
        }
    }

    #[test]
    fn single_kapteyn_term() {
        let o = make_orbit(0.5).unwrap();
        let z = Complex64::new(0.01, 0.02);
        let p = kapteyn_partial_sums(z, &o, 1).unwrap();
        let expect = z * 0.242_268_457_674_873_886_38;
        assert!((p.sums()[0] - expect).norm() < 1e-14);
    }

    #[test]
    fn kapteyn_overflow_is_a_range_error() {
        let o = make_orbit(0.9).unwrap();
        let err = kapteyn_partial_sums(c(1e3), &o, 200).unwrap_err();
        assert!(matches!(err, Error::Range { index, .. } if index > 100));
    }

    #[test]
    fn wynn_exact_on_geometric() {
        let z = c(0.5);
        let t = wynn_epsilon(&geometric(z, 3)).unwrap();
        assert!((t.value(0, 1).unwrap() - 2.0).norm() < 1e-15);
        let t = wynn_epsilon(&geometric(z, 8)).unwrap();
        let (v, err) = best_estimate(&t).unwrap();
        assert!((v - 2.0).norm() < 1e-12 && err < 1e-12, "{v} {err}");
    }

    #[test]
    fn wynn_pade_diagonal_on_geometric() {
        let z = Complex64::new(0.3, -0.4);
        let exact = (1.0 - z).inv();
        let t = wynn_epsilon(&geometric(z, 6)).unwrap();
        for k in 1..t.columns() {
            match t.entry(0, k).unwrap() {
                TableEntry::Value(v) => assert!((v - exact).norm() < 1e-12, "k {k}"),
                TableEntry::Breakdown => {}
            }
        }
        assert!((t.value(0, 1).unwrap() - exact).norm() < 1e-14);
    }

    #[test]
    fn wynn_breakdown_on_constant_sums() {
        let p = PartialSums::from_terms(0, vec![c(3.0), c(0.0), c(0.0), c(0.0)]);
        let t = wynn_epsilon(&p).unwrap();
        assert!(t.is_breakdown(0, 1));
        assert_eq!(t.value(2, 0), Some(c(3.0)));
        assert!(t.entry(5, 0).is_none());
    }

    #[test]
    fn weniger_constant_series() {
        let p = PartialSums::from_terms(0, vec![c(2.5), c(0.0), c(0.0), c(0.0)]);
        let t = weniger_delta(&p, 1.0).unwrap();
        for n in 0..4 {
            assert_eq!(t.value(n, 0), Some(c(2.5)));
        }
        assert!(t.is_breakdown(0, 1));
        assert!(best_estimate(&t).is_err());
    }

    #[test]
    fn weniger_recurrence_matches_binomial_form() {
        // Columns 1…10 are binomial sums; recompute them with the recurrence.
        let z = Complex64::new(-3.0, 1.0);
        let p = PartialSums::from_terms(
            0,
            (0..20)
                .map(|k| z.powi(k) * (1..=k).map(f64::from).product::<f64>() / 1e6)
                .collect(),
        );
        let t = weniger_delta(&p, 1.0).unwrap();
        let s = p.sums();
        let a = p.terms();
        for k in 1..=10usize {
            let mut num: Vec<Complex64> = (0..19).map(|n| s[n] / a[n + 1]).collect();
            let mut den: Vec<Complex64> = (0..19).map(|n| a[n + 1].inv()).collect();
            for j in 1..=k {
                let jm = (j - 1) as f64;
                let w = 19 - j;
                let coeff = |n: usize| {
                    let b = 1.0 + n as f64;
                    if j == 1 {
                        1.0
                    } else {
                        (b + jm) * (b + jm - 1.0) / ((b + 2.0 * jm) * (b + 2.0 * jm - 1.0))
                    }
                };
                num = (0..w).map(|n| num[n + 1] - coeff(n) * num[n]).collect();
                den = (0..w).map(|n| den[n + 1] - coeff(n) * den[n]).collect();
            }
            let via_rec = num[0] / den[0];
            let via_bin = t.value(0, k).unwrap();
            assert!((via_rec - via_bin).norm() < 1e-10 * via_bin.norm(), "k {k}");
        }
    }

    #[test]
    fn weniger_exact_on_geometric() {
        // ω_n = a_{n+1} makes δ exact already at k = 1.
        let z = c(0.5);
        let t = weniger_delta(&geometric(z, 6), 1.0).unwrap();
        let (v, err) = best_estimate(&t).unwrap();
        assert!((v - 2.0).norm() < 1e-13 && err < 1e-13);
    }

    #[test]
    fn euler_series_wynn() {
        // Σ (−1)^n n! x^n at x = 0.1 against ∫₀^∞ e^{−t}/(1 + xt) dt.
        let x: f64 = 0.1;
        let terms: Vec<Complex64> = (0..20)
            .map(|n| {
                let f: f64 = (1..=n).map(|k| k as f64).product();
                c(if n % 2 == 0 { 1.0 } else { -1.0 } * f * x.powi(n))
            })
            .collect();
        let p = PartialSums::from_terms(0, terms);
        let exact = integrate_real(
            |t| (-t).exp() / (1.0 + x * t),
            0.0,
            60.0,
            &QuadSettings::with_tolerance(1e-14, 1e-13),
            &[1.0, 5.0, 20.0],
        )
        .unwrap()
        .real()
        .unwrap();
        let (v, _) = best_estimate(&wynn_epsilon(&p).unwrap()).unwrap();
        assert!((v.re - exact).abs() < 1e-7, "{} vs {exact}", v.re);
        let (d, _) = best_estimate(&weniger_delta(&p, 1.0).unwrap()).unwrap();
        assert!((d.re - exact).abs() < 1e-9, "{} vs {exact}", d.re);
    }

    #[test]
    fn polylog_divergent_via_wynn() {
        let z = c(-2.0);
        let terms = (1..=30).map(|n| z.powi(n) / (n as f64).powf(1.5)).collect();
        let p = PartialSums::from_terms(1, terms);
        let (v, _) = best_estimate(&wynn_epsilon(&p).unwrap()).unwrap();
        let exact = polylog_stieltjes(1.5, z).unwrap();
        assert!((v - exact).norm() < 1e-8, "{v} vs {exact}");
    }

    #[test]
    fn polylog_convergent_via_weniger() {
        let z = c(0.5);
        // δ on this series is best near k = 12; higher orders lose digits.
        let terms = (1..=14).map(|n| z.powi(n) / (n as f64).powf(1.5)).collect();
        let p = PartialSums::from_terms(1, terms);
        let (v, _) = best_estimate(&weniger_delta(&p, 1.0).unwrap()).unwrap();
        let exact = polylog_series_to(1.5, z, 1e-17).unwrap().value;
        assert!((v - exact).norm() < 1e-12, "{v} vs {exact}");
    }

    const TABLE_ONE_DELTA: [(usize, f64, f64); 3] = [
        // Weniger δ values at 40 digits.
        (10, -1.003_096_168, 1.238_166_641),
        (20, -1.001_839_658, 1.238_763_069),
        (30, -1.001_838_979, 1.238_765_240),
    ];

    fn table_one_z() -> Complex64 {
        Complex64::from_polar(10.0, PI / 3.0)
    }

    #[test]
    fn table_one_double_route_low_order() {
        let o = make_orbit(0.9).unwrap();
        let p = kapteyn_partial_sums(table_one_z(), &o, delta_terms_for_order(10)).unwrap();
        let (_, re, im) = TABLE_ONE_DELTA[0];
        let v = delta_at_order(&p, 10, 1.0).unwrap().value().unwrap();
        assert!((v - Complex64::new(re, im)).norm() < 1e-8, "{v}");
        let s1 = p.sum_at(1).unwrap();
        assert!((s1 - Complex64::new(2.029_747_730, 3.515_626_196)).norm() < 1e-8);
    }

    #[test]
    fn table_one_extended_route() {
        let o = make_orbit(0.9).unwrap();
        let p =
            kapteyn_partial_sums_extended(table_one_z(), &o, delta_terms_for_order(30)).unwrap();
        for (order, re, im) in TABLE_ONE_DELTA {
            let v = p.delta_at_order(order, 1.0).unwrap().value().unwrap();
            assert!(
                (v - Complex64::new(re, im)).norm() < 2e-9,
                "order {order}: {v}"
            );
        }
        // |s_30| ≈ 1.44e27.
        let s30 = p.rounded().sum_at(30).unwrap();
        assert!((s30.norm() / 1.436_471e27 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn extended_wynn_matches_double_wynn_when_benign() {
        let o = make_orbit(0.5).unwrap();
        let z = Complex64::new(0.5, 0.5);
        let ext = kapteyn_partial_sums_extended(z, &o, 12).unwrap();
        let (a, _) = best_estimate(&ext.wynn_epsilon().unwrap()).unwrap();
        let (b, _) = best_estimate(&wynn_epsilon(&ext.rounded()).unwrap()).unwrap();
        assert!((a - b).norm() < 1e-12);
        assert_eq!(ext.truncated(5).len(), 5);
    }

    #[test]
    fn extended_and_double_terms_agree() {
        let o = make_orbit(0.7).unwrap();
        let z = Complex64::new(-1.5, 2.0);
        let a = kapteyn_partial_sums(z, &o, 60).unwrap();
        let b = kapteyn_partial_sums_extended(z, &o, 60).unwrap().rounded();
        for (x, y) in a.terms().iter().zip(b.terms()) {
            assert!((x - y).norm() <= 1e-10 * y.norm());
        }
        assert!(kapteyn_partial_sums_extended(c(1e3), &make_orbit(0.9).unwrap(), 200).is_err());
    }

    #[test]
    fn kepler_series_tail_bounded() {
        use crate::orbit::solve_kepler_oracle;
        let o = make_orbit(0.5).unwrap();
        let m = MeanAnomaly::new(0.5).unwrap();
        let s = kepler_series(&o, m, 1e-12).unwrap();
        let psi = solve_kepler_oracle(&o, m, 1e-14).unwrap().value();
        assert!(s.tail_bound <= 1e-12);
        assert!((s.value.im - (psi - 0.5)).abs() < 1e-10);
        assert!(kepler_series(&make_orbit(1.0).unwrap(), m, 1e-8).is_err());
    }

    #[test]
    fn rejects_short_input() {
        let p = PartialSums::from_terms(0, vec![c(1.0), c(1.0)]);
        assert!(wynn_epsilon(&p).is_err());
        assert!(weniger_delta(&p.truncated(1), 1.0).is_err());
        assert!(weniger_delta(&p, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn transforms_are_scale_covariant(
            re in -5.0f64..5.0, im in -5.0f64..5.0, zr in -3.0f64..-0.2,
        ) {
            prop_assume!(re.abs() + im.abs() > 1e-3);
            let scale = Complex64::new(re, im);
            let z = c(zr);
            let p = PartialSums::from_terms(
                1,
                (1..=14).map(|n| z.powi(n) / (n as f64).powf(1.5)).collect(),
            );
            let q = p.scaled(scale);
            let (a, _) = best_estimate(&weniger_delta(&p, 1.0).unwrap()).unwrap();
            let (b, _) = best_estimate(&weniger_delta(&q, 1.0).unwrap()).unwrap();
            prop_assert!((scale * a - b).norm() <= 1e-10 * b.norm().max(1.0));
            let (a, _) = best_estimate(&wynn_epsilon(&p).unwrap()).unwrap();
            let (b, _) = best_estimate(&wynn_epsilon(&q).unwrap()).unwrap();
            prop_assert!((scale * a - b).norm() <= 1e-9 * b.norm().max(1.0));
        }
    }
}
