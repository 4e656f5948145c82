//! Sparse Laurent polynomials in the deformation phase `L` with `Coeff` coefficients.

use super::coeff::Coeff;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

/// Finitely supported map exponent -> Coeff, no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Laurent {
    terms: BTreeMap<i64, Coeff>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Laurent::monomial(0, Coeff::one())
    }

    pub fn monomial(exp: i64, c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Laurent { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (i64, Coeff)>) -> Self {
        let mut l = Laurent::zero();
        for (e, c) in it {
            l.add_term(e, c);
        }
        l
    }

    pub fn add_term(&mut self, exp: i64, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(cur) => {
                let s = &*cur + &c;
                if s.is_zero() {
                    self.terms.remove(&exp);
                } else {
                    *cur = s;
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, exp: i64) -> Coeff {
        self.terms.get(&exp).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn add(&self, o: &Laurent) -> Laurent {
        let mut r = self.clone();
        for (e, c) in o.terms.iter() {
            r.add_term(*e, c.clone());
        }
        r
    }

    pub fn neg(&self) -> Laurent {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn sub(&self, o: &Laurent) -> Laurent {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Laurent) -> Laurent {
        let mut r = Laurent::zero();
        for (e1, c1) in self.terms.iter() {
            for (e2, c2) in o.terms.iter() {
                r.add_term(e1 + e2, c1 * c2);
            }
        }
        r
    }

    pub fn scale(&self, c: &Coeff) -> Laurent {
        if c.is_zero() {
            return Laurent::zero();
        }
        Laurent {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    /// Multiply by L^k.
    pub fn shift(&self, k: i64) -> Laurent {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Coefficient conjugation plus L -> L^{-1}.
    pub fn conj(&self) -> Laurent {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (-e, c.conj())).collect(),
        }
    }

    /// Euclidean division for ordinary polynomials (min_exp >= 0 on both, divisor nonzero).
    pub fn div_rem(&self, d: &Laurent) -> (Laurent, Laurent) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.max_exp().unwrap();
        let dlead = d.coeff(dd);
        let dlead_inv = dlead.inv().unwrap();
        let mut rem = self.clone();
        let mut quot = Laurent::zero();
        while !rem.is_zero() && rem.max_exp().unwrap() >= dd {
            let re = rem.max_exp().unwrap();
            let f = &rem.coeff(re) * &dlead_inv;
            let t = Laurent::monomial(re - dd, f);
            quot = quot.add(&t);
            rem = rem.sub(&t.mul(d));
        }
        (quot, rem)
    }

    /// Monic gcd of two ordinary polynomials.
    pub fn gcd(&self, o: &Laurent) -> Laurent {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.coeff(a.max_exp().unwrap());
        a.scale(&lead.inv().unwrap())
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in self.terms.iter() {
            acc += c.to_complex() * lambda.powi(*e as i32);
        }
        acc
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter() {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let cs = if c.needs_parens() { format!("({c})") } else { c.to_string() };
            match e {
                0 => write!(f, "{cs}")?,
                1 => write!(f, "{cs}*L")?,
                _ => write!(f, "{cs}*L^{e}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_exact() {
        // (1 + L)(1 - L) = 1 - L^2
        let a = Laurent::from_terms([(0, Coeff::one()), (2, -&Coeff::one())]);
        let d = Laurent::from_terms([(0, Coeff::one()), (1, Coeff::one())]);
        let (q, r) = a.div_rem(&d);
        assert!(r.is_zero());
        assert_eq!(q, Laurent::from_terms([(0, Coeff::one()), (1, -&Coeff::one())]));
    }

    #[test]
    fn gcd_of_common_factor() {
        let f = Laurent::from_terms([(0, Coeff::one()), (1, Coeff::one())]); // 1 + L
        let a = f.mul(&Laurent::from_terms([(0, Coeff::from_int(2)), (1, Coeff::one())]));
        let b = f.mul(&Laurent::from_terms([(0, Coeff::one()), (1, Coeff::from_int(3))]));
        let g = a.gcd(&b);
        assert_eq!(g, f); // already monic with leading coefficient 1
    }
}
