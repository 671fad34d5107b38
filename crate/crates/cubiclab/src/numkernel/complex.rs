//! Arbitrary-precision complex arithmetic over MPFR reals.
//!
//! The type is deliberately small: the laboratory only needs field
//! arithmetic plus `exp`, `log`, `sqrt`, and fractional powers with the
//! *principal* branch. Paper-specific branch cuts (e.g. a square root cut
//! on a finite interval) are assembled at the call sites from products of
//! principal-branch factors, which keeps every cut choice visible where it
//! matters.

use rug::ops::Pow;
use rug::Float;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A complex number with extended-precision real and imaginary parts.
///
/// Both parts always carry the same mantissa length; binary operations take
/// the precision of the left operand.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexValue {
    pub re: Float,
    pub im: Float,
}

impl ComplexValue {
    pub fn new(re: Float, im: Float) -> Self {
        debug_assert_eq!(re.prec(), im.prec());
        Self { re, im }
    }

    /// Purely real value.
    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Self { re, im }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(Float::new(prec), Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::new(Float::with_val(prec, 1), Float::new(prec))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// |z|, computed without overflow via the hypot kernel.
    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    /// Principal argument in (−π, π], following `atan2` (signed zeros in
    /// the imaginary part select the side of the negative real axis).
    pub fn arg(&self) -> Float {
        self.im.clone().atan2(&self.re)
    }

    pub fn scale(&self, s: &Float) -> Self {
        Self::new(self.re.clone() * s, self.im.clone() * s)
    }

    pub fn mul_i(&self) -> Self {
        Self::new(-self.im.clone(), self.re.clone())
    }

    pub fn square(&self) -> Self {
        // (a+bi)² = (a−b)(a+b) + 2abi
        let re = Float::with_val(self.prec(), &self.re - &self.im)
            * Float::with_val(self.prec(), &self.re + &self.im);
        let im = Float::with_val(self.prec(), &self.re * &self.im) * 2u32;
        Self::new(re, im)
    }

    pub fn recip(&self) -> Self {
        let d = Float::with_val(self.prec(), self.re.clone().square() + self.im.clone().square());
        Self::new(
            Float::with_val(self.prec(), &self.re / &d),
            -Float::with_val(self.prec(), &self.im / &d),
        )
    }

    /// Principal square root (cut on the negative real axis).
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return Self::zero(self.prec());
        }
        let m = self.abs().sqrt();
        let half = Float::with_val(self.prec(), self.arg() / 2u32);
        let (s, c) = half.sin_cos(Float::new(self.prec()));
        Self::new(Float::with_val(self.prec(), &m * &c), m * s)
    }

    /// Principal logarithm: `ln|z| + i·arg z`.
    pub fn ln(&self) -> Self {
        Self::new(self.abs().ln(), self.arg())
    }

    pub fn exp(&self) -> Self {
        let m = self.re.clone().exp();
        let (s, c) = self.im.clone().sin_cos(Float::new(self.prec()));
        Self::new(Float::with_val(self.prec(), &m * &c), m * s)
    }

    /// Principal fractional power `z^p = exp(p·Log z)` for real `p`.
    pub fn powf(&self, p: &Float) -> Self {
        if self.is_zero() {
            return Self::zero(self.prec());
        }
        if self.im.is_zero() && self.re.is_sign_positive() {
            // Keep positive-real arguments exactly real.
            return Self::from_real(self.re.clone().pow(p));
        }
        self.ln().scale(p).exp()
    }

    /// Integer power by binary exponentiation.
    pub fn powi(&self, mut n: i64) -> Self {
        if n == 0 {
            return Self::one(self.prec());
        }
        let invert = n < 0;
        n = n.abs();
        let mut base = self.clone();
        let mut acc = Self::one(self.prec());
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = base.square();
            n >>= 1;
        }
        if invert {
            acc.recip()
        } else {
            acc
        }
    }

    /// `e^{iθ}` at the precision of `theta`.
    pub fn cis(theta: &Float) -> Self {
        let (s, c) = theta.clone().sin_cos(Float::new(theta.prec()));
        Self::new(c, s)
    }
}

impl Add for &ComplexValue {
    type Output = ComplexValue;
    fn add(self, rhs: &ComplexValue) -> ComplexValue {
        ComplexValue::new(self.re.clone() + &rhs.re, self.im.clone() + &rhs.im)
    }
}

impl Sub for &ComplexValue {
    type Output = ComplexValue;
    fn sub(self, rhs: &ComplexValue) -> ComplexValue {
        ComplexValue::new(self.re.clone() - &rhs.re, self.im.clone() - &rhs.im)
    }
}

impl Mul for &ComplexValue {
    type Output = ComplexValue;
    fn mul(self, rhs: &ComplexValue) -> ComplexValue {
        let prec = self.prec();
        let re = Float::with_val(prec, &self.re * &rhs.re) - Float::with_val(prec, &self.im * &rhs.im);
        let im = Float::with_val(prec, &self.re * &rhs.im) + Float::with_val(prec, &self.im * &rhs.re);
        ComplexValue::new(re, im)
    }
}

impl Div for &ComplexValue {
    type Output = ComplexValue;
    fn div(self, rhs: &ComplexValue) -> ComplexValue {
        self * &rhs.recip()
    }
}

impl Neg for &ComplexValue {
    type Output = ComplexValue;
    fn neg(self) -> ComplexValue {
        ComplexValue::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for ComplexValue {
    type Output = ComplexValue;
    fn neg(self) -> ComplexValue {
        ComplexValue::new(-self.re, -self.im)
    }
}
