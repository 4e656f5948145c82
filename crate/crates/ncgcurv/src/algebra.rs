//! Z^2-graded *-algebras presented by homogeneous basis symbols with
//! structure constants, plus the derivation data expressed in frame
//! coordinates.

use crate::scalar::{Scalar, ScalarError};
use rand::rngs::StdRng;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("basis key {0} does not belong to this algebra")]
    ForeignKey(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Which product structure is in force: the plain one or the twisted one.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Mode {
    Classical,
    Deformed,
}

impl Mode {
    pub fn is_deformed(self) -> bool {
        matches!(self, Mode::Deformed)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Classical => write!(f, "classical"),
            Mode::Deformed => write!(f, "deformed"),
        }
    }
}

/// Z^2 grading degree.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Serialize, Deserialize)]
pub struct Degree {
    pub n1: i64,
    pub n2: i64,
}

impl Degree {
    pub const ZERO: Degree = Degree { n1: 0, n2: 0 };

    pub fn new(n1: i64, n2: i64) -> Self {
        Degree { n1, n2 }
    }

    pub fn is_zero(self) -> bool {
        self.n1 == 0 && self.n2 == 0
    }
}

impl std::ops::Add for Degree {
    type Output = Degree;
    fn add(self, o: Degree) -> Degree {
        Degree::new(self.n1 + o.n1, self.n2 + o.n2)
    }
}

impl std::ops::Neg for Degree {
    type Output = Degree;
    fn neg(self) -> Degree {
        Degree::new(-self.n1, -self.n2)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n1, self.n2)
    }
}

/// Product phase of the twisted algebra: L^{n2(a) n1(b)} when deformed.
pub fn product_phase(mode: Mode, a: Degree, b: Degree) -> Scalar {
    match mode {
        Mode::Classical => Scalar::one(),
        Mode::Deformed => Scalar::lambda_pow(a.n2 * b.n1),
    }
}

/// Adjoint phase of the twisted algebra: L^{n1 n2} of the total degree.
pub fn star_phase(mode: Mode, n: Degree) -> Scalar {
    match mode {
        Mode::Classical => Scalar::one(),
        Mode::Deformed => Scalar::lambda_pow(n.n1 * n.n2),
    }
}

/// The antisymmetric bicharacter L^{n2(a) n1(b) - n2(b) n1(a)}.
pub fn bicharacter(a: Degree, b: Degree) -> Scalar {
    Scalar::lambda_pow(a.n2 * b.n1 - b.n2 * a.n1)
}

/// Phase for moving a coefficient of degree `a` from the left of a module
/// element of degree `x` to its right. Trivial classically.
pub fn commute_phase(mode: Mode, a: Degree, x: Degree) -> Scalar {
    match mode {
        Mode::Classical => Scalar::one(),
        Mode::Deformed => bicharacter(a, x),
    }
}

/// Homogeneous basis symbol of an algebra.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Serialize, Deserialize)]
pub enum BasisKey {
    /// U^m V^n (the unit is Mono(0,0), also the only key of the constants algebra).
    Mono(i64, i64),
    /// Index into a user table's basis list.
    Named(u16),
}

impl fmt::Display for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisKey::Mono(0, 0) => write!(f, "1"),
            BasisKey::Mono(m, n) => write!(f, "({m},{n})"),
            BasisKey::Named(k) => write!(f, "#{k}"),
        }
    }
}

/// User-supplied structure-constant presentation. The unit is always the
/// universal key Mono(0,0); `names` lists the non-unit generators.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct UserAlgebra {
    pub unit_name: String,
    pub names: Vec<String>,
    pub degrees: Vec<Degree>,
    /// Products of non-unit pairs; missing entries mean zero. Unit products
    /// are built in.
    pub products: BTreeMap<(u16, u16), Vec<(BasisKey, Scalar)>>,
    /// i -> (key, c) with star(basis_i) = c * key.
    pub stars: Vec<(BasisKey, Scalar)>,
}

/// Basis-presented Z^2-graded *-algebra.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum AlgebraSpec {
    /// Only the unit, degree (0,0). Scalars act as the whole coefficient algebra.
    TrivialConstants,
    /// Laurent monomials U^m V^n with degree (n, m), so that U*V = L*(V*U)
    /// in the deformed product.
    LaurentMonomials,
    UserTable(UserAlgebra),
}

impl AlgebraSpec {
    /// The unit is the universal key Mono(0,0) for every algebra kind.
    pub fn unit_key(&self) -> BasisKey {
        BasisKey::Mono(0, 0)
    }

    pub fn valid_key(&self, k: BasisKey) -> bool {
        match (self, k) {
            (_, BasisKey::Mono(0, 0)) => true,
            (AlgebraSpec::TrivialConstants, _) => false,
            (AlgebraSpec::LaurentMonomials, BasisKey::Mono(_, _)) => true,
            (AlgebraSpec::UserTable(t), BasisKey::Named(i)) => (i as usize) < t.names.len(),
            _ => false,
        }
    }

    pub fn degree(&self, k: BasisKey) -> Degree {
        match (self, k) {
            (AlgebraSpec::TrivialConstants, _) => Degree::ZERO,
            // U carries degree (0,1) and V degree (1,0); see the shipped
            // deformed-product tests for the resulting commutation phase.
            (AlgebraSpec::LaurentMonomials, BasisKey::Mono(m, n)) => Degree::new(n, m),
            (AlgebraSpec::UserTable(t), BasisKey::Named(i)) => t.degrees[i as usize],
            _ => Degree::ZERO,
        }
    }

    /// Classical structure constants of the product of two basis symbols.
    pub fn key_product(&self, a: BasisKey, b: BasisKey) -> Vec<(BasisKey, Scalar)> {
        if a == BasisKey::Mono(0, 0) && !matches!(self, AlgebraSpec::LaurentMonomials) {
            return vec![(b, Scalar::one())];
        }
        if b == BasisKey::Mono(0, 0) && !matches!(self, AlgebraSpec::LaurentMonomials) {
            return vec![(a, Scalar::one())];
        }
        match (self, a, b) {
            (AlgebraSpec::TrivialConstants, _, _) => vec![(BasisKey::Mono(0, 0), Scalar::one())],
            (AlgebraSpec::LaurentMonomials, BasisKey::Mono(m, n), BasisKey::Mono(p, q)) => {
                vec![(BasisKey::Mono(m + p, n + q), Scalar::one())]
            }
            (AlgebraSpec::UserTable(t), BasisKey::Named(i), BasisKey::Named(j)) => {
                t.products.get(&(i, j)).cloned().unwrap_or_default()
            }
            _ => Vec::new(),
        }
    }

    /// Classical star of a basis symbol: (key, coefficient).
    pub fn key_star(&self, a: BasisKey) -> (BasisKey, Scalar) {
        match (self, a) {
            (AlgebraSpec::TrivialConstants, _) => (BasisKey::Mono(0, 0), Scalar::one()),
            (AlgebraSpec::LaurentMonomials, BasisKey::Mono(m, n)) => {
                (BasisKey::Mono(-m, -n), Scalar::one())
            }
            (AlgebraSpec::UserTable(t), BasisKey::Named(i)) => t.stars[i as usize].clone(),
            _ => (a, Scalar::one()),
        }
    }

    pub fn display_key(&self, k: BasisKey) -> String {
        match (self, k) {
            (AlgebraSpec::UserTable(t), BasisKey::Mono(0, 0)) => t.unit_name.clone(),
            (AlgebraSpec::UserTable(t), BasisKey::Named(i)) => t.names[i as usize].clone(),
            (_, BasisKey::Mono(0, 0)) => "1".into(),
            (_, BasisKey::Mono(m, n)) => {
                let mut s = String::new();
                if m != 0 {
                    s.push_str(&format!("U^{m}"));
                }
                if n != 0 {
                    s.push_str(&format!("V^{n}"));
                }
                s
            }
            _ => k.to_string(),
        }
    }
}

/// Finitely supported linear combination of basis symbols.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct AlgebraElement {
    terms: BTreeMap<BasisKey, Scalar>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement { terms: BTreeMap::new() }
    }

    pub fn unit(spec: &AlgebraSpec) -> Self {
        AlgebraElement::from_key(spec.unit_key())
    }

    pub fn from_key(k: BasisKey) -> Self {
        AlgebraElement::from_term(k, Scalar::one())
    }

    pub fn from_term(k: BasisKey, s: Scalar) -> Self {
        let mut e = AlgebraElement::zero();
        e.add_term(k, s);
        e
    }

    pub fn scalar(spec: &AlgebraSpec, s: Scalar) -> Self {
        AlgebraElement::from_term(spec.unit_key(), s)
    }

    pub fn add_term(&mut self, k: BasisKey, s: Scalar) {
        if s.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(cur) => {
                let sum = &*cur + &s;
                if sum.is_zero() {
                    self.terms.remove(&k);
                } else {
                    *cur = sum;
                }
            }
            None => {
                self.terms.insert(k, s);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisKey, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff_of(&self, k: BasisKey) -> Scalar {
        self.terms.get(&k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add(&self, o: &AlgebraElement) -> AlgebraElement {
        let mut r = self.clone();
        for (k, s) in o.terms.iter() {
            r.add_term(*k, s.clone());
        }
        r
    }

    pub fn sub(&self, o: &AlgebraElement) -> AlgebraElement {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> AlgebraElement {
        AlgebraElement { terms: self.terms.iter().map(|(k, s)| (*k, -s)).collect() }
    }

    pub fn scale(&self, s: &Scalar) -> AlgebraElement {
        if s.is_zero() {
            return AlgebraElement::zero();
        }
        AlgebraElement { terms: self.terms.iter().map(|(k, c)| (*k, c * s)).collect() }
    }

    /// Map each term's scalar; used for twists and conjugations that depend
    /// on the term's degree.
    pub fn map_terms(&self, mut f: impl FnMut(BasisKey, &Scalar) -> Scalar) -> AlgebraElement {
        let mut r = AlgebraElement::zero();
        for (k, s) in self.terms.iter() {
            r.add_term(*k, f(*k, s));
        }
        r
    }

    /// Product in the given mode. Deformed mode multiplies each homogeneous
    /// pair by the phase L^{n2(a) n1(b)} before applying the classical
    /// structure constants.
    pub fn mul(&self, o: &AlgebraElement, spec: &AlgebraSpec, mode: Mode) -> AlgebraElement {
        let mut r = AlgebraElement::zero();
        for (ka, sa) in self.terms.iter() {
            let da = spec.degree(*ka);
            for (kb, sb) in o.terms.iter() {
                let db = spec.degree(*kb);
                let phase = product_phase(mode, da, db);
                let f = &(sa * sb) * &phase;
                for (k, c) in spec.key_product(*ka, *kb) {
                    debug_assert_eq!(spec.degree(k), da + db, "graded product degree bookkeeping");
                    r.add_term(k, &f * &c);
                }
            }
        }
        r
    }

    /// Involution in the given mode: conjugate-linear, key-star, and in the
    /// deformed mode the extra L^{n1 n2} phase of the term's degree.
    pub fn star(&self, spec: &AlgebraSpec, mode: Mode) -> AlgebraElement {
        let mut r = AlgebraElement::zero();
        for (k, s) in self.terms.iter() {
            let ph = star_phase(mode, spec.degree(*k));
            let (k2, c) = spec.key_star(*k);
            r.add_term(k2, &(&s.conj() * &ph) * &c);
        }
        r
    }

    /// Commute this coefficient rightwards past something of degree `x`:
    /// a . x = x . a' with a' the returned element (termwise phases).
    pub fn commuted_past(&self, spec: &AlgebraSpec, x: Degree, mode: Mode) -> AlgebraElement {
        if mode == Mode::Classical || x.is_zero() {
            return self.clone();
        }
        self.map_terms(|k, s| s * &commute_phase(mode, spec.degree(k), x))
    }

    /// Inverse move: x . a = a' . x.
    pub fn commuted_before(&self, spec: &AlgebraSpec, x: Degree, mode: Mode) -> AlgebraElement {
        if mode == Mode::Classical || x.is_zero() {
            return self.clone();
        }
        self.map_terms(|k, s| s * &commute_phase(mode, x, spec.degree(k)))
    }

    pub fn display(&self, spec: &AlgebraSpec) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(k, s)| format!("({})·{}", s, spec.display_key(*k)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Frame-coordinate presentation of a one-form: (frame index, coefficient) pairs.
pub type OneFormCoords = Vec<(usize, AlgebraElement)>;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum DerivationRule {
    Zero,
    /// d(U^m V^n) = w1 (i m U^m V^n) + w2 (i n U^m V^n).
    TorusStandard,
    Table(BTreeMap<BasisKey, OneFormCoords>),
}

/// The derivation a -> [D, a] in frame coordinates.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Derivation {
    pub rule: DerivationRule,
    /// Per-key replacements consulted before the rule; used by the
    /// sabotage fixtures and by file-loaded tables.
    pub overrides: BTreeMap<BasisKey, OneFormCoords>,
}

impl Derivation {
    pub fn zero() -> Self {
        Derivation { rule: DerivationRule::Zero, overrides: BTreeMap::new() }
    }

    pub fn torus() -> Self {
        Derivation { rule: DerivationRule::TorusStandard, overrides: BTreeMap::new() }
    }

    pub fn of_key(&self, k: BasisKey) -> OneFormCoords {
        if let Some(v) = self.overrides.get(&k) {
            return v.clone();
        }
        match &self.rule {
            DerivationRule::Zero => Vec::new(),
            DerivationRule::TorusStandard => {
                let BasisKey::Mono(m, n) = k else { return Vec::new() };
                let im = &Scalar::i() * &Scalar::from_int(m);
                let inn = &Scalar::i() * &Scalar::from_int(n);
                let mut out = Vec::new();
                if !im.is_zero() {
                    out.push((0, AlgebraElement::from_term(k, im)));
                }
                if !inn.is_zero() {
                    out.push((1, AlgebraElement::from_term(k, inn)));
                }
                out
            }
            DerivationRule::Table(t) => t.get(&k).cloned().unwrap_or_default(),
        }
    }

    /// Linear extension to elements. Coefficients scale the table values.
    pub fn of_element(&self, a: &AlgebraElement) -> Vec<(usize, AlgebraElement)> {
        let mut acc: BTreeMap<usize, AlgebraElement> = BTreeMap::new();
        for (k, s) in a.terms() {
            for (j, c) in self.of_key(*k) {
                let entry = acc.entry(j).or_insert_with(AlgebraElement::zero);
                *entry = entry.add(&c.scale(s));
            }
        }
        acc.into_iter().filter(|(_, e)| !e.is_zero()).collect()
    }
}

/// Witnessed outcome of a table check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
}

impl CheckOutcome {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckOutcome { name: name.into(), passed: true, witness: None }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        CheckOutcome { name: name.into(), passed: false, witness: Some(witness.into()) }
    }
}

/// Verify d(ab) = d(a) b + a d(b) on sampled basis pairs. The second term
/// commutes `a` past the frame leg, so the frame degrees are needed.
pub fn check_leibniz(
    spec: &AlgebraSpec,
    deriv: &Derivation,
    frame_degrees: &[Degree],
    mode: Mode,
    samples: usize,
    rng: &mut StdRng,
) -> CheckOutcome {
    let mut pairs: Vec<(BasisKey, BasisKey)> = Vec::new();
    for _ in 0..samples {
        pairs.push((sample_key(spec, rng), sample_key(spec, rng)));
    }
    // Always include the generators; the witness in the corrupted-table
    // fixture is the pair (U, U).
    if matches!(spec, AlgebraSpec::LaurentMonomials) {
        pairs.push((BasisKey::Mono(1, 0), BasisKey::Mono(1, 0)));
        pairs.push((BasisKey::Mono(1, 0), BasisKey::Mono(0, 1)));
    }
    for (ka, kb) in pairs {
        let a = AlgebraElement::from_key(ka);
        let b = AlgebraElement::from_key(kb);
        let ab = a.mul(&b, spec, mode);
        let lhs = deriv.of_element(&ab);
        // d(a) b
        let mut rhs: BTreeMap<usize, AlgebraElement> = BTreeMap::new();
        for (j, c) in deriv.of_element(&a) {
            let e = rhs.entry(j).or_insert_with(AlgebraElement::zero);
            *e = e.add(&c.mul(&b, spec, mode));
        }
        // a d(b): move a past the frame leg
        for (j, c) in deriv.of_element(&b) {
            let moved = a.commuted_past(spec, frame_degrees[j], mode);
            let e = rhs.entry(j).or_insert_with(AlgebraElement::zero);
            *e = e.add(&moved.mul(&c, spec, mode));
        }
        let rhs: Vec<(usize, AlgebraElement)> =
            rhs.into_iter().filter(|(_, e)| !e.is_zero()).collect();
        if lhs != rhs {
            return CheckOutcome::fail(
                "leibniz",
                format!("({}, {})", spec.display_key(ka), spec.display_key(kb)),
            );
        }
    }
    CheckOutcome::pass("leibniz")
}

pub fn sample_key(spec: &AlgebraSpec, rng: &mut StdRng) -> BasisKey {
    match spec {
        AlgebraSpec::TrivialConstants => BasisKey::Mono(0, 0),
        AlgebraSpec::LaurentMonomials => {
            BasisKey::Mono(rng.gen_range(-2..=2), rng.gen_range(-2..=2))
        }
        AlgebraSpec::UserTable(t) => {
            let i = rng.gen_range(0..=t.names.len());
            if i == t.names.len() {
                BasisKey::Mono(0, 0)
            } else {
                BasisKey::Named(i as u16)
            }
        }
    }
}

pub fn sample_element(spec: &AlgebraSpec, rng: &mut StdRng, max_terms: usize) -> AlgebraElement {
    let mut e = AlgebraElement::zero();
    let n = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..n {
        let k = sample_key(spec, rng);
        e.add_term(k, sample_scalar(rng));
    }
    e
}

pub fn sample_scalar(rng: &mut StdRng) -> Scalar {
    use crate::scalar::rat_frac;
    let a = rng.gen_range(-3i64..=3);
    let b = rng.gen_range(1i64..=2);
    let c = rng.gen_range(-2i64..=2);
    let base = &Scalar::from_rat(rat_frac(a, b)) + &(&Scalar::i() * &Scalar::from_int(c));
    let with_r2 = if rng.gen_bool(0.3) {
        &base + &(&Scalar::sqrt2() * &Scalar::from_int(rng.gen_range(-1..=1)))
    } else {
        base
    };
    let e = rng.gen_range(-2i64..=2);
    &with_r2 * &Scalar::lambda_pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn torus() -> AlgebraSpec {
        AlgebraSpec::LaurentMonomials
    }

    #[test]
    fn deformed_torus_commutation() {
        let spec = torus();
        let u = AlgebraElement::from_key(BasisKey::Mono(1, 0));
        let v = AlgebraElement::from_key(BasisKey::Mono(0, 1));
        let uv = u.mul(&v, &spec, Mode::Deformed);
        let vu = v.mul(&u, &spec, Mode::Deformed);
        // U*V = L UV while V*U = UV, hence U*V = L (V*U)
        assert_eq!(uv, AlgebraElement::from_term(BasisKey::Mono(1, 1), Scalar::lambda()));
        assert_eq!(vu, AlgebraElement::from_key(BasisKey::Mono(1, 1)));
        assert_eq!(uv, vu.scale(&Scalar::lambda()));
    }

    #[test]
    fn unit_is_neutral_in_both_modes() {
        let spec = torus();
        let mut rng = StdRng::seed_from_u64(7);
        for mode in [Mode::Classical, Mode::Deformed] {
            for _ in 0..20 {
                let a = sample_element(&spec, &mut rng, 3);
                assert_eq!(AlgebraElement::unit(&spec).mul(&a, &spec, mode), a);
                assert_eq!(a.mul(&AlgebraElement::unit(&spec), &spec, mode), a);
            }
        }
    }

    #[test]
    fn constants_deformed_equals_classical() {
        let spec = AlgebraSpec::TrivialConstants;
        let a = AlgebraElement::scalar(&spec, Scalar::from_int(3));
        let b = AlgebraElement::scalar(&spec, &Scalar::i() + &Scalar::one());
        assert_eq!(a.mul(&b, &spec, Mode::Deformed), a.mul(&b, &spec, Mode::Classical));
    }

    #[test]
    fn star_examples() {
        let spec = torus();
        // U has degree (0,1): n1 n2 = 0, so no phase
        let u = AlgebraElement::from_key(BasisKey::Mono(1, 0));
        assert_eq!(u.star(&spec, Mode::Deformed), AlgebraElement::from_key(BasisKey::Mono(-1, 0)));
        // UV has degree (1,1): phase L
        let uv = AlgebraElement::from_key(BasisKey::Mono(1, 1));
        assert_eq!(
            uv.star(&spec, Mode::Deformed),
            AlgebraElement::from_term(BasisKey::Mono(-1, -1), Scalar::lambda())
        );
    }

    #[test]
    fn star_is_involutive_and_antimultiplicative() {
        let spec = torus();
        let mut rng = StdRng::seed_from_u64(11);
        for mode in [Mode::Classical, Mode::Deformed] {
            for _ in 0..30 {
                let a = sample_element(&spec, &mut rng, 3);
                let b = sample_element(&spec, &mut rng, 3);
                assert_eq!(a.star(&spec, mode).star(&spec, mode), a);
                assert_eq!(
                    a.mul(&b, &spec, mode).star(&spec, mode),
                    b.star(&spec, mode).mul(&a.star(&spec, mode), &spec, mode)
                );
            }
        }
    }

    #[test]
    fn deformed_product_specializes_to_classical_at_lambda_one() {
        let spec = torus();
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let a = sample_element(&spec, &mut rng, 2);
            let b = sample_element(&spec, &mut rng, 2);
            let d = a.mul(&b, &spec, Mode::Deformed);
            let c = a.mul(&b, &spec, Mode::Classical);
            let mut spec_ok = true;
            for (k, s) in d.terms() {
                let lhs = s.at_lambda_one().unwrap();
                let rhs = c.coeff_of(*k).at_lambda_one().unwrap();
                spec_ok &= lhs == rhs;
            }
            assert!(spec_ok);
        }
    }

    #[test]
    fn deformed_product_associative() {
        let spec = torus();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..20 {
            let a = sample_element(&spec, &mut rng, 2);
            let b = sample_element(&spec, &mut rng, 2);
            let c = sample_element(&spec, &mut rng, 2);
            assert_eq!(
                a.mul(&b, &spec, Mode::Deformed).mul(&c, &spec, Mode::Deformed),
                a.mul(&b.mul(&c, &spec, Mode::Deformed), &spec, Mode::Deformed)
            );
        }
    }

    #[test]
    fn torus_leibniz_passes_and_corruption_fails() {
        let spec = torus();
        let deriv = Derivation::torus();
        let degs = [Degree::ZERO, Degree::ZERO];
        let mut rng = StdRng::seed_from_u64(9);
        let ok = check_leibniz(&spec, &deriv, &degs, Mode::Classical, 25, &mut rng);
        assert!(ok.passed);
        let ok_d = check_leibniz(&spec, &deriv, &degs, Mode::Deformed, 25, &mut rng);
        assert!(ok_d.passed, "deformed Leibniz: {:?}", ok_d.witness);

        // double d(U)
        let mut bad = Derivation::torus();
        let doubled: OneFormCoords = vec![(
            0,
            AlgebraElement::from_term(BasisKey::Mono(1, 0), &Scalar::i() * &Scalar::from_int(2)),
        )];
        bad.overrides.insert(BasisKey::Mono(1, 0), doubled);
        let res = check_leibniz(&spec, &bad, &degs, Mode::Classical, 0, &mut rng);
        assert!(!res.passed);
        assert_eq!(res.witness.as_deref(), Some("(U^1, U^1)"));
    }

    #[test]
    fn zero_derivation_passes() {
        let spec = AlgebraSpec::TrivialConstants;
        let mut rng = StdRng::seed_from_u64(2);
        let res = check_leibniz(&spec, &Derivation::zero(), &[Degree::ZERO], Mode::Classical, 5, &mut rng);
        assert!(res.passed);
    }
}
