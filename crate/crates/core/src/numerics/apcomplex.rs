//! Arbitrary-precision complex numbers backed by MPFR.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// A complex number with an explicit working precision in bits.
///
/// Binary operations round to the larger of the two operand precisions.
#[derive(Clone, PartialEq)]
pub struct APComplex {
    z: Complex,
}

impl APComplex {
    pub fn zero(prec: u32) -> Self {
        APComplex { z: Complex::new(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        APComplex { z: Complex::with_val(prec, (v, 0)) }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        APComplex { z: Complex::with_val(prec, (re, im)) }
    }

    pub fn from_integer(v: &Integer, prec: u32) -> Self {
        APComplex { z: Complex::with_val(prec, (v, 0)) }
    }

    pub fn from_rational(v: &Rational, prec: u32) -> Self {
        APComplex { z: Complex::with_val(prec, (v, 0)) }
    }

    pub fn from_floats(re: Float, im: Float) -> Self {
        APComplex { z: Complex::with_val(re.prec().max(im.prec()), (re, im)) }
    }

    pub fn from_complex(z: Complex) -> Self {
        APComplex { z }
    }

    pub fn i(prec: u32) -> Self {
        APComplex { z: Complex::with_val(prec, (0, 1)) }
    }

    pub fn pi(prec: u32) -> Float {
        Float::with_val(prec, Constant::Pi)
    }

    pub fn prec(&self) -> u32 {
        self.z.prec().0.max(self.z.prec().1)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        APComplex { z: Complex::with_val(prec, &self.z) }
    }

    pub fn re(&self) -> &Float {
        self.z.real()
    }

    pub fn im(&self) -> &Float {
        self.z.imag()
    }

    pub fn inner(&self) -> &Complex {
        &self.z
    }

    pub fn conj(&self) -> Self {
        APComplex { z: self.z.clone().conj() }
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.z.abs_ref())
    }

    pub fn norm_sqr(&self) -> Float {
        Float::with_val(self.prec(), self.z.norm_ref())
    }

    pub fn exp(&self) -> Self {
        APComplex { z: self.z.clone().exp() }
    }

    pub fn ln(&self) -> Self {
        APComplex { z: self.z.clone().ln() }
    }

    pub fn sqrt(&self) -> Self {
        APComplex { z: self.z.clone().sqrt() }
    }

    pub fn recip(&self) -> Self {
        APComplex { z: self.z.clone().recip() }
    }

    pub fn square(&self) -> Self {
        APComplex { z: self.z.clone().square() }
    }

    pub fn powi(&self, e: i64) -> Self {
        if e >= 0 {
            APComplex { z: Complex::with_val(self.prec(), (&self.z).pow(e as u64)) }
        } else {
            APComplex { z: Complex::with_val(self.prec(), (&self.z).pow((-e) as u64)) }.recip()
        }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        APComplex { z: Complex::with_val(self.prec(), &self.z * k) }
    }

    pub fn mul_integer(&self, k: &Integer) -> Self {
        APComplex { z: Complex::with_val(self.prec(), &self.z * k) }
    }

    pub fn mul_float(&self, k: &Float) -> Self {
        APComplex { z: Complex::with_val(self.prec(), &self.z * k) }
    }

    pub fn mul_pow2(&self, e: i32) -> Self {
        let mut z = self.z.clone();
        if e >= 0 {
            z <<= e as u32;
        } else {
            z >>= (-e) as u32;
        }
        APComplex { z }
    }

    pub fn is_zero(&self) -> bool {
        self.z.real().is_zero() && self.z.imag().is_zero()
    }

    /// Base-2 exponent of the larger component magnitude, or `None` for zero.
    pub fn exponent(&self) -> Option<i32> {
        let a = self.z.real().get_exp();
        let b = self.z.imag().get_exp();
        match (a, b) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        }
    }

    /// `|self - other| <= tol * max(1, |self|, |other|)`.
    pub fn approx_eq(&self, other: &Self, tol_bits: u32) -> bool {
        let p = self.prec().max(other.prec());
        let d = Float::with_val(p, (self - other).z.abs_ref());
        let mut scale = self.abs().max(&other.abs());
        if scale < 1 {
            scale = Float::with_val(p, 1);
        }
        d <= scale >> tol_bits
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.z.real().to_f64(), self.z.imag().to_f64())
    }

    /// Nearest Gaussian integer (real part only is returned as `Integer` with the
    /// distance of each component to the rounding).
    pub fn round_real(&self) -> Option<(Integer, Float)> {
        let re = self.z.real();
        if !re.is_finite() {
            return None;
        }
        let r = re.to_integer()?;
        let dist = Float::with_val(self.prec(), re - &r).abs();
        Some((r, dist))
    }
}

impl fmt::Debug for APComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.to_f64_pair();
        write!(f, "({a:e} + {b:e}i)@{}", self.prec())
    }
}

impl fmt::Display for APComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.z)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl<'a> $tr<&'a APComplex> for &'a APComplex {
            type Output = APComplex;
            fn $m(self, rhs: &'a APComplex) -> APComplex {
                let p = self.prec().max(rhs.prec());
                APComplex { z: Complex::with_val(p, (&self.z).$m(&rhs.z)) }
            }
        }
        impl $tr<APComplex> for APComplex {
            type Output = APComplex;
            fn $m(self, rhs: APComplex) -> APComplex {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a APComplex> for APComplex {
            type Output = APComplex;
            fn $m(self, rhs: &'a APComplex) -> APComplex {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl AddAssign<&APComplex> for APComplex {
    fn add_assign(&mut self, rhs: &APComplex) {
        if rhs.prec() > self.prec() {
            *self = &*self + rhs;
        } else {
            self.z += &rhs.z;
        }
    }
}

impl SubAssign<&APComplex> for APComplex {
    fn sub_assign(&mut self, rhs: &APComplex) {
        if rhs.prec() > self.prec() {
            *self = &*self - rhs;
        } else {
            self.z -= &rhs.z;
        }
    }
}

impl MulAssign<&APComplex> for APComplex {
    fn mul_assign(&mut self, rhs: &APComplex) {
        if rhs.prec() > self.prec() {
            *self = &*self * rhs;
        } else {
            self.z *= &rhs.z;
        }
    }
}

impl Neg for APComplex {
    type Output = APComplex;
    fn neg(self) -> APComplex {
        APComplex { z: -self.z }
    }
}

impl Neg for &APComplex {
    type Output = APComplex;
    fn neg(self) -> APComplex {
        APComplex { z: -self.z.clone() }
    }
}
