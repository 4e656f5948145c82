//! Exact arithmetic in the coefficient field Q(i, sqrt2)(L).
//!
//! `L` is a formal unit-circle parameter: conjugation sends L to L^{-1}.
//! Values are fractions of Laurent polynomials kept in a canonical form, so
//! structural equality decides identity. Numeric evaluation interprets
//! L = e^{2 pi i q} for a rational q.

mod coeff;
mod laurent;
pub mod parse;

pub use coeff::{rat, rat_frac, Coeff, GaussRat, Rat};
pub use laurent::Laurent;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero scalar")]
    DivisionByZero,
    #[error("denominator vanishes at the evaluation point")]
    Pole,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Element of the fraction field Q(i, sqrt2)(L).
///
/// Invariants: the denominator is an ordinary polynomial with constant
/// coefficient 1 and no common factor with the (shifted) numerator; zero is
/// represented by an empty numerator over denominator 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Scalar {
    num: Laurent,
    den: Laurent,
}

impl Scalar {
    pub fn new(num: Laurent, den: Laurent) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: Laurent, den: Laurent) -> Self {
        if num.is_zero() {
            return Scalar { num: Laurent::zero(), den: Laurent::one() };
        }
        let vd = den.min_exp().unwrap();
        // fast path: monomial denominator folds into the numerator shift
        if den.num_terms() == 1 {
            let c = den.coeff(vd);
            if c == Coeff::one() {
                return Scalar { num: num.shift(-vd), den: Laurent::one() };
            }
            let cinv = c.inv().unwrap();
            return Scalar { num: num.shift(-vd).scale(&cinv), den: Laurent::one() };
        }
        let vn = num.min_exp().unwrap();
        let n0 = num.shift(-vn);
        let d0 = den.shift(-vd);
        let g = n0.gcd(&d0);
        let (n1, r1) = n0.div_rem(&g);
        debug_assert!(r1.is_zero());
        let (d1, r2) = d0.div_rem(&g);
        debug_assert!(r2.is_zero());
        // normalize the denominator so its lowest-degree coefficient is 1
        let c = d1.coeff(d1.min_exp().unwrap());
        let cinv = c.inv().unwrap();
        let n2 = n1.scale(&cinv);
        let d2 = d1.scale(&cinv);
        Scalar { num: n2.shift(vn - vd), den: d2 }
    }

    pub fn zero() -> Self {
        Scalar { num: Laurent::zero(), den: Laurent::one() }
    }

    pub fn one() -> Self {
        Scalar { num: Laurent::one(), den: Laurent::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar { num: Laurent::monomial(0, Coeff::from_int(n)), den: Laurent::one() }
    }

    pub fn from_rat(r: Rat) -> Self {
        Scalar { num: Laurent::monomial(0, Coeff::from_rat(r)), den: Laurent::one() }
    }

    pub fn from_coeff(c: Coeff) -> Self {
        Scalar { num: Laurent::monomial(0, c), den: Laurent::one() }
    }

    pub fn i() -> Self {
        Scalar::from_coeff(Coeff::i())
    }

    pub fn sqrt2() -> Self {
        Scalar::from_coeff(Coeff::sqrt2())
    }

    /// The formal phase L (unit-circle parameter).
    pub fn lambda() -> Self {
        Scalar::lambda_pow(1)
    }

    pub fn lambda_pow(k: i64) -> Self {
        Scalar { num: Laurent::monomial(k, Coeff::one()), den: Laurent::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self == &Scalar::one()
    }

    pub fn numerator(&self) -> &Laurent {
        &self.num
    }

    pub fn denominator(&self) -> &Laurent {
        &self.den
    }

    /// True when the value is free of L (constant coefficient).
    pub fn is_constant(&self) -> bool {
        self.den == Laurent::one()
            && (self.num.is_zero() || (self.num.min_exp() == Some(0) && self.num.max_exp() == Some(0)))
    }

    pub fn as_constant(&self) -> Option<Coeff> {
        if self.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::canonical(self.den.clone(), self.num.clone()))
    }

    /// Involutive field anti-automorphism fixing Q, sending i -> -i,
    /// sqrt2 -> sqrt2 and L -> L^{-1}.
    pub fn conj(&self) -> Scalar {
        if self.is_zero() {
            return Scalar::zero();
        }
        Self::canonical(self.num.conj(), self.den.conj())
    }

    pub fn pow(&self, k: i64) -> Result<Scalar, ScalarError> {
        if k == 0 {
            return Ok(Scalar::one());
        }
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = Scalar::one();
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Evaluate at L = e^{2 pi i q}.
    pub fn eval(&self, q: &Rat) -> Result<Complex64, ScalarError> {
        use num_traits::ToPrimitive;
        let angle = 2.0 * std::f64::consts::PI * q.to_f64().unwrap_or(f64::NAN);
        let lambda = Complex64::from_polar(1.0, angle);
        let d = self.den.eval(lambda);
        if d.norm() < 1e-12 {
            return Err(ScalarError::Pole);
        }
        Ok(self.num.eval(lambda) / d)
    }

    /// Specialize L -> 1 exactly.
    pub fn at_lambda_one(&self) -> Result<Scalar, ScalarError> {
        let fold = |l: &Laurent| {
            let mut acc = Coeff::zero();
            for (_, c) in l.terms() {
                acc = &acc + c;
            }
            acc
        };
        let d = fold(&self.den);
        if d.is_zero() {
            return Err(ScalarError::Pole);
        }
        let n = fold(&self.num);
        Ok(Scalar::from_coeff(&n * &d.inv().unwrap()))
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        if self.den == o.den {
            if self.den == Laurent::one() {
                return Scalar { num: self.num.add(&o.num), den: Laurent::one() };
            }
            return Scalar::canonical(self.num.add(&o.num), self.den.clone());
        }
        Scalar::canonical(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.den == Laurent::one() && o.den == Laurent::one() {
            return Scalar { num: self.num.mul(&o.num), den: Laurent::one() };
        }
        Scalar::canonical(self.num.mul(&o.num), self.den.mul(&o.den))
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.den == Laurent::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse::parse_scalar(&s).map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for Scalar {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse_scalar(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sc(s: &str) -> Scalar {
        parse::parse_scalar(s).unwrap()
    }

    #[test]
    fn monomial_product() {
        // L^2 * (1/2) L^-1 = (1/2) L
        let x = Scalar::lambda_pow(2);
        let y = &Scalar::from_rat(rat_frac(1, 2)) * &Scalar::lambda_pow(-1);
        assert_eq!(&x * &y, sc("(1/2)*L"));
    }

    #[test]
    fn inv_one_plus_lambda_canonical() {
        let x = sc("1+L").inv().unwrap();
        assert_eq!(&x * &sc("1+L"), Scalar::one());
    }

    #[test]
    fn sqrt2_addition() {
        let x = &Scalar::sqrt2() * &Scalar::lambda();
        assert_eq!(&x + &x, sc("2*r2*L"));
    }

    #[test]
    fn conj_examples() {
        // conj(i L^3) = -i L^-3
        let x = &Scalar::i() * &Scalar::lambda_pow(3);
        assert_eq!(x.conj(), &(-&Scalar::i()) * &Scalar::lambda_pow(-3));
        // conj(1/(1+L)) = L/(1+L)
        let y = sc("1+L").inv().unwrap();
        assert_eq!(y.conj(), sc("L/(1+L)"));
    }

    #[test]
    fn eval_examples() {
        let q = rat_frac(1, 4);
        let v = Scalar::lambda_pow(2).eval(&q).unwrap();
        assert!((v.re + 1.0).abs() < 1e-12 && v.im.abs() < 1e-12);
        let w = Scalar::from_int(3).eval(&rat_frac(2, 7)).unwrap();
        assert!((w.re - 3.0).abs() < 1e-12);
        // L + L^-1 at q = 1/8 equals sqrt2
        let u = (&Scalar::lambda() + &Scalar::lambda_pow(-1)).eval(&rat_frac(1, 8)).unwrap();
        assert!((u.re - std::f64::consts::SQRT_2).abs() < 1e-12 && u.im.abs() < 1e-12);
        // |eval(L, q)| = 1
        for q in [rat_frac(1, 3), rat_frac(2, 5), rat_frac(5, 7)] {
            let l = Scalar::lambda().eval(&q).unwrap();
            assert!((l.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(Scalar::zero().inv(), Err(ScalarError::DivisionByZero));
    }

    fn arb_coeff() -> impl Strategy<Value = Coeff> {
        (-4i64..5, 1i64..4, -4i64..5, 1i64..4).prop_map(|(a, b, c, d)| {
            Coeff::new(
                GaussRat::new(rat_frac(a, b), rat_frac(c, d)),
                GaussRat::new(rat_frac(c, b), rat_frac(a.rem_euclid(3), d)),
            )
        })
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        (
            proptest::collection::vec((arb_coeff(), -3i64..4), 0..3),
            proptest::collection::vec((arb_coeff(), 1i64..3), 0..2),
        )
            .prop_map(|(num, den)| {
                let n = Laurent::from_terms(num.into_iter().map(|(c, e)| (e, c)));
                let mut d = Laurent::one();
                for (c, e) in den {
                    d = d.add(&Laurent::monomial(e, c));
                }
                Scalar::new(n, d).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn field_add_assoc(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        }

        #[test]
        fn field_mul_assoc(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn field_distributive(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn field_inverse(a in arb_scalar()) {
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
            }
        }

        #[test]
        fn sub_self_structurally_zero(a in arb_scalar(), b in arb_scalar()) {
            // canonical form uniqueness after an operation sequence
            let x = &(&a * &b) + &a;
            prop_assert_eq!(&x - &x, Scalar::zero());
            prop_assert!((&x - &x).is_zero());
        }

        #[test]
        fn conj_is_involutive_antihomomorphism(a in arb_scalar(), b in arb_scalar()) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
        }

        #[test]
        fn conj_matches_complex_conjugation_numerically(a in arb_scalar()) {
            let q = rat_frac(1, 5);
            if let (Ok(v), Ok(w)) = (a.eval(&q), a.conj().eval(&q)) {
                prop_assert!((v.conj() - w).norm() < 1e-10);
            }
        }

        #[test]
        fn print_parse_round_trip(a in arb_scalar()) {
            let s = a.to_string();
            prop_assert_eq!(parse::parse_scalar(&s).unwrap(), a);
        }
    }
}
