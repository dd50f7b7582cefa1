//! Overflow-safe complex numbers stored as `mantissa * 2^exp`.
//!
//! Scaling by powers of two is exact, so a scaled value carries the same
//! relative accuracy as a plain double regardless of its magnitude.

use num_complex::Complex64;
use std::ops::{Mul, Neg};

/// `x * 2^k` without intermediate overflow or underflow.
pub fn ldexp(x: f64, k: i64) -> f64 {
    let mut x = x;
    let mut k = k;
    while k > 1000 {
        x *= f64::from_bits(((1000 + 1023) as u64) << 52);
        k -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -1000 {
        x *= f64::from_bits(((-1000 + 1023) as u64) << 52);
        k += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * f64::from_bits(((k + 1023) as u64) << 52)
}

/// Binary exponent `e` with `2^(e-1) <= m < 2^e` for finite positive `m`.
pub(crate) fn exponent_of(m: f64) -> i64 {
    let bits = m.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        // subnormal
        return exponent_of(m * f64::from_bits(((64 + 1023) as u64) << 52)) - 64;
    }
    biased - 1022
}

/// A complex value `mant * 2^exp` with `|mant|` in `[0.5, 2)` (or zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    mant: Complex64,
    exp: i64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { mant: Complex64::new(0.0, 0.0), exp: 0 };
    pub const ONE: Scaled = Scaled { mant: Complex64::new(1.0, 0.0), exp: 0 };

    /// `mant * 2^exp`.
    pub fn new(mant: Complex64, exp: i64) -> Self {
        Scaled { mant, exp }.normalized()
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z, 0)
    }

    pub fn from_real(x: f64) -> Self {
        Self::new(Complex64::new(x, 0.0), 0)
    }

    fn normalized(self) -> Self {
        let m = self.mant.re.abs().max(self.mant.im.abs());
        if m == 0.0 {
            return Scaled::ZERO;
        }
        if !m.is_finite() {
            return self;
        }
        let e = exponent_of(m);
        Scaled { mant: Complex64::new(ldexp(self.mant.re, -e), ldexp(self.mant.im, -e)), exp: self.exp + e }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }

    /// `ln |value|`; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mant.norm().ln() + self.exp as f64 * std::f64::consts::LN_2
        }
    }

    /// Unit phase (`sign` for real values); zero for the zero value.
    pub fn phase(&self) -> Complex64 {
        if self.is_zero() {
            self.mant
        } else {
            self.mant / self.mant.norm()
        }
    }

    /// Plain complex value; may overflow to infinity or underflow to zero.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ldexp(self.mant.re, self.exp), ldexp(self.mant.im, self.exp))
    }

    /// Real part of the plain value.
    pub fn to_f64(&self) -> f64 {
        ldexp(self.mant.re, self.exp)
    }

    pub fn abs(&self) -> f64 {
        ldexp(self.mant.norm(), self.exp)
    }

    pub fn recip(&self) -> Self {
        Scaled::new(Complex64::new(1.0, 0.0) / self.mant, -self.exp)
    }

    pub fn scale_by(&self, c: f64) -> Self {
        Scaled::new(self.mant * c, self.exp)
    }

    /// Sum of two scaled values aligned to the larger exponent.
    pub fn add(&self, other: &Scaled) -> Scaled {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let e = self.exp.max(other.exp);
        let a = self.mant * ldexp(1.0, self.exp - e);
        let b = other.mant * ldexp(1.0, other.exp - e);
        Scaled::new(a + b, e)
    }

    pub fn sub(&self, other: &Scaled) -> Scaled {
        self.add(&(-*other))
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Scaled) -> Scaled {
        if self.is_zero() || rhs.is_zero() {
            return Scaled::ZERO;
        }
        Scaled::new(self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled { mant: -self.mant, exp: self.exp }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_do_not_overflow() {
        let big = Scaled::from_real(1e300);
        let p = big * big * big;
        assert!((p.ln_abs() - 3.0 * 1e300f64.ln()).abs() < 1e-9);
        assert_eq!(p.phase(), Complex64::new(1.0, 0.0));
        let back = p * big.recip() * big.recip();
        assert!((back.to_f64() / 1e300 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scaling_is_exact() {
        let x = Scaled::from_real(0.1);
        let y = x * Scaled::new(Complex64::new(1.0, 0.0), 4000) * Scaled::new(Complex64::new(1.0, 0.0), -4000);
        assert_eq!(y.to_f64(), 0.1);
    }

    #[test]
    fn addition_aligns_exponents() {
        let a = Scaled::from_real(3.0);
        let b = Scaled::from_real(-1.0);
        assert_eq!(a.add(&b).to_f64(), 2.0);
        assert!(a.sub(&a).is_zero());
        assert_eq!(Scaled::ZERO.add(&b), b);
    }

    #[test]
    fn ldexp_edges() {
        assert_eq!(ldexp(1.0, 1023), 2f64.powi(1023));
        assert_eq!(ldexp(1.0, 2000), f64::INFINITY);
        assert_eq!(ldexp(1.0, -1074), 5e-324);
        assert_eq!(ldexp(3.0, 0), 3.0);
        assert_eq!(exponent_of(1.0), 1);
        assert_eq!(exponent_of(0.75), 0);
    }
}
