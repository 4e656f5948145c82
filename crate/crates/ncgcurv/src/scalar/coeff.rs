//! Coefficients of the ground field: Gaussian rationals extended by sqrt(2).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A Gaussian rational re + im*i.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }

    pub fn zero() -> Self {
        GaussRat::new(Rat::zero(), Rat::zero())
    }

    pub fn one() -> Self {
        GaussRat::new(Rat::one(), Rat::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        GaussRat::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        Some(GaussRat::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// Element of Q(i, sqrt2): `a + b*sqrt(2)` with `a`, `b` Gaussian rationals.
///
/// This is the smallest field containing every constant appearing in the
/// built-in geometries (i from anti-self-adjoint frames, sqrt2 from the
/// complex frame normalization (e1 +/- i e2)/sqrt2).
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Coeff {
    pub a: GaussRat,
    pub b: GaussRat,
}

impl Coeff {
    pub fn new(a: GaussRat, b: GaussRat) -> Self {
        Coeff { a, b }
    }

    pub fn zero() -> Self {
        Coeff::new(GaussRat::zero(), GaussRat::zero())
    }

    pub fn one() -> Self {
        Coeff::new(GaussRat::one(), GaussRat::zero())
    }

    pub fn i() -> Self {
        Coeff::new(GaussRat::new(Rat::zero(), Rat::one()), GaussRat::zero())
    }

    pub fn sqrt2() -> Self {
        Coeff::new(GaussRat::zero(), GaussRat::one())
    }

    pub fn from_int(n: i64) -> Self {
        Coeff::new(GaussRat::new(rat(n), Rat::zero()), GaussRat::zero())
    }

    pub fn from_rat(r: Rat) -> Self {
        Coeff::new(GaussRat::new(r, Rat::zero()), GaussRat::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Complex conjugation: i -> -i, sqrt2 -> sqrt2.
    pub fn conj(&self) -> Self {
        Coeff::new(self.a.conj(), self.b.conj())
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // 1/(a + b sqrt2) = (a - b sqrt2) / (a^2 - 2 b^2); the denominator is a
        // nonzero Gaussian rational because sqrt2 is irrational over Q(i).
        let d = self.a.mul(&self.a).sub_g(&GaussRat::new(rat(2), Rat::zero()).mul(&self.b.mul(&self.b)));
        let dinv = d.inv()?;
        Some(Coeff::new(self.a.mul(&dinv), self.b.conj_free_neg().mul(&dinv)))
    }

    pub fn to_complex(&self) -> Complex64 {
        self.a.to_complex() + self.b.to_complex() * std::f64::consts::SQRT_2
    }
}

impl GaussRat {
    fn sub_g(&self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }

    fn conj_free_neg(&self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        Coeff::new(
            GaussRat::new(&self.a.re + &o.a.re, &self.a.im + &o.a.im),
            GaussRat::new(&self.b.re + &o.b.re, &self.b.im + &o.b.im),
        )
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        Coeff::new(
            GaussRat::new(&self.a.re - &o.a.re, &self.a.im - &o.a.im),
            GaussRat::new(&self.b.re - &o.b.re, &self.b.im - &o.b.im),
        )
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        // (a1 + b1 s)(a2 + b2 s) = (a1 a2 + 2 b1 b2) + (a1 b2 + b1 a2) s, s^2 = 2.
        let two = GaussRat::new(rat(2), Rat::zero());
        let a = self.a.mul(&o.a).add_g(&two.mul(&self.b.mul(&o.b)));
        let b = self.a.mul(&o.b).add_g(&self.b.mul(&o.a));
        Coeff::new(a, b)
    }
}

impl GaussRat {
    fn add_g(&self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff::new(self.a.conj_free_neg(), self.b.conj_free_neg())
    }
}

fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Coeff {
    /// Canonical token form: the nonzero components joined by '+', e.g. `6`,
    /// `3/2`, `2i`, `1+1i`, `1/2r2`, `-1ir2`. Parses back exactly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.short())
    }
}

impl Coeff {
    /// One-token rendering of the nonzero components.
    pub fn short(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        if !self.a.re.is_zero() {
            parts.push(fmt_rat(&self.a.re));
        }
        if !self.a.im.is_zero() {
            parts.push(format!("{}i", fmt_rat(&self.a.im)));
        }
        if !self.b.re.is_zero() {
            parts.push(format!("{}r2", fmt_rat(&self.b.re)));
        }
        if !self.b.im.is_zero() {
            parts.push(format!("{}ir2", fmt_rat(&self.b.im)));
        }
        parts.join("+")
    }

    /// True when the token form needs parentheses inside a product.
    pub fn needs_parens(&self) -> bool {
        let s = self.short();
        s.contains('+')
    }

    pub fn abs_norm(&self) -> Rat {
        self.a.re.abs() + self.a.im.abs() + self.b.re.abs() + self.b.im.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let x = Coeff::new(
            GaussRat::new(rat_frac(3, 2), rat(1)),
            GaussRat::new(rat(-2), rat_frac(1, 3)),
        );
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, Coeff::one());
    }

    #[test]
    fn sqrt2_squares_to_two() {
        let s = Coeff::sqrt2();
        assert_eq!(&s * &s, Coeff::from_int(2));
    }

    #[test]
    fn conj_fixes_sqrt2_negates_i() {
        assert_eq!(Coeff::i().conj(), -&Coeff::i());
        assert_eq!(Coeff::sqrt2().conj(), Coeff::sqrt2());
    }
}
