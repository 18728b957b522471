//! Double-double arithmetic: an unevaluated sum `hi + lo` carrying about
//! 32 significant digits, built on error-free transforms.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// Unit roundoff, 2⁻¹⁰⁴.
pub(crate) const DD_EPS: f64 = 4.930_380_657_631_324e-32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// `a·b` exactly.
    pub fn prod(a: f64, b: f64) -> Self {
        let p = a * b;
        quick_two_sum(p, a.mul_add(b, -p))
    }

    /// `p/q` to double-double accuracy.
    pub fn ratio(p: f64, q: f64) -> Self {
        Dd::new(p) / Dd::new(q)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Multiplication by `2^k`, exact barring over/underflow.
    pub fn ldexp(self, mut k: i32) -> Self {
        let mut v = self;
        while k.abs() > 1000 {
            let step = 1000 * k.signum();
            v = v.ldexp(step);
            k -= step;
        }
        let s = pow2(k);
        Dd {
            hi: v.hi * s,
            lo: v.lo * s,
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }
}

/// `2^k` for `|k| ≤ 1000`.
pub(crate) fn pow2(k: i32) -> f64 {
    debug_assert!(k.abs() <= 1000);
    if k >= 0 {
        f64::from_bits(((1023 + k) as u64) << 52)
    } else {
        1.0 / f64::from_bits(((1023 - k) as u64) << 52)
    }
}

/// Binary exponent `e` with `2^e ≤ |x| < 2^{e+1}`, for normal nonzero x.
pub(crate) fn exponent(x: f64) -> i32 {
    ((x.to_bits() >> 52) & 0x7ff) as i32 - 1023
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let n = quick_two_sum(s, e + t);
        quick_two_sum(n.hi, n.lo + f)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
        quick_two_sum(p, e)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::new(q2);
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2) + Dd::new(q3)
    }
}

/// Complex double-double.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    pub fn new(re: Dd, im: Dd) -> Self {
        DdComplex { re, im }
    }

    pub fn real(re: Dd) -> Self {
        DdComplex { re, im: Dd::ZERO }
    }

    pub fn from_c64(z: Complex64) -> Self {
        DdComplex::new(Dd::new(z.re), Dd::new(z.im))
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn scale(self, r: Dd) -> Self {
        DdComplex::new(self.re * r, self.im * r)
    }

    pub fn ldexp(self, k: i32) -> Self {
        DdComplex::new(self.re.ldexp(k), self.im.ldexp(k))
    }

    /// Largest binary exponent of the two parts; `None` for zero.
    pub fn exponent(self) -> Option<i32> {
        let m = self.re.hi.abs().max(self.im.hi.abs());
        (m > 0.0 && m.is_finite()).then(|| exponent(m))
    }

    /// `1/z` with power-of-two prescaling so `|z|²` cannot overflow.
    pub fn inv(self) -> Self {
        let e = self.exponent().unwrap_or(0);
        let w = self.ldexp(-e);
        let d = w.re * w.re + w.im * w.im;
        DdComplex::new(w.re / d, -(w.im / d)).ldexp(-e)
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, o: DdComplex) -> DdComplex {
        DdComplex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    fn sub(self, o: DdComplex) -> DdComplex {
        DdComplex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    fn mul(self, o: DdComplex) -> DdComplex {
        DdComplex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl Div for DdComplex {
    type Output = DdComplex;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: DdComplex) -> DdComplex {
        self * o.inv()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_carries_double_double_precision() {
        // 1/3 · 3 − 1 vanishes to ~1e−32.
        let third = Dd::ratio(1.0, 3.0);
        let back = third * Dd::new(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
        // The low word of 1/3 is nonzero: more than double precision.
        assert!(third.lo != 0.0);
    }

    #[test]
    fn exact_products() {
        let p = Dd::prod(0.1, 0.1);
        assert_eq!(p.hi, 0.1 * 0.1);
        assert_eq!(p.lo, 0.1f64.mul_add(0.1, -(0.1 * 0.1)));
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(pow2(0), 1.0);
        assert_eq!(pow2(10), 1024.0);
        assert_eq!(pow2(-3), 0.125);
        assert_eq!(exponent(1024.0), 10);
        assert_eq!(exponent(0.75), -1);
    }

    #[test]
    fn complex_inverse_of_huge_value() {
        let z = DdComplex::from_c64(Complex64::new(3e200, -4e200));
        let w = z * z.inv();
        assert!((w.to_c64() - Complex64::new(1.0, 0.0)).norm() < 1e-30);
    }
}
