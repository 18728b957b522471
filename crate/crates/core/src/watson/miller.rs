//! Miller's backward recurrence for `J_n(x)` in double-double.
//!
//! `J_{k−1} = (2k/x) J_k − J_{k+1}` run downward from a start well above
//! `max(n, x)` is stable, and the normalisation `J_0 + 2 Σ J_{2k} = 1`
//! fixes the scale. The result carries about 30 significant digits, which
//! the resummation of strongly divergent Kapteyn series needs.

use crate::dd::{exponent, Dd};
use crate::error::{Error, Result};

/// Rescale when the recurrence values exceed `2^RESCALE_EXP`.
const RESCALE_EXP: i32 = 500;

fn start_index(n: u32, x: f64) -> u32 {
    let top = (n as f64).max(x);
    let raw = top + 40.0 + 8.0 * top.sqrt();
    // Even start keeps the normalisation bookkeeping uniform.
    2 * ((raw as u32) / 2 + 1)
}

/// `J_n(x)` as `mantissa · 2^exp2` for `x > 0`.
pub(crate) fn bessel_miller_dd(n: u32, x: Dd) -> Result<(Dd, i32)> {
    if !(x.hi > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "Miller recurrence needs x > 0, got {}",
            x.hi
        )));
    }
    let top = start_index(n, x.hi);
    let (mut next, mut cur) = (Dd::ZERO, Dd::new(pow_tiny()));
    let mut norm = Dd::ZERO;
    let mut target = None;
    let mut shift_after = 0;
    let two_over_x = Dd::new(2.0) / x;

    // Invariant at the top of the loop: cur = J_k, next = J_{k+1} (scaled).
    for k in (1..=top).rev() {
        if k == n {
            target = Some(cur);
        }
        if k % 2 == 0 {
            norm = norm + cur + cur;
        }
        let prev = two_over_x * Dd::new(k as f64) * cur - next;
        next = cur;
        cur = prev;
        if cur.hi.abs() > f64::from_bits(((1023 + RESCALE_EXP) as u64) << 52) {
            cur = cur.ldexp(-RESCALE_EXP);
            next = next.ldexp(-RESCALE_EXP);
            norm = norm.ldexp(-RESCALE_EXP);
            if target.is_some() {
                shift_after -= RESCALE_EXP;
            }
        }
    }
    // cur = J_0 now.
    if n == 0 {
        target = Some(cur);
    }
    norm = norm + cur;
    let t = target.ok_or_else(|| Error::Internal("Miller start below order".into()))?;
    let mant = t / norm;
    if !mant.is_finite() {
        return Err(Error::Internal("Miller recurrence overflowed".into()));
    }
    if mant.hi == 0.0 {
        return Ok((Dd::ZERO, 0));
    }
    // Normalise the mantissa to [1, 2).
    let e = exponent(mant.hi);
    Ok((mant.ldexp(-e), shift_after + e))
}

/// Seed of the recurrence, small enough to leave headroom for growth.
fn pow_tiny() -> f64 {
    f64::from_bits(((1023 - 600) as u64) << 52)
}

/// `J_n(x)` from Miller's recurrence, rounded to double. Agrees with the
/// Watson route and the power series; used for validation and by the
/// extended-precision Kapteyn sums.
pub fn bessel_miller(n: u32, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let (m, e) = bessel_miller_dd(n, Dd::new(x))?;
    Ok(m.to_f64() * 2f64.powi(e))
}
