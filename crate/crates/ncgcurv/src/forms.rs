//! Tensor powers of the frame-presented one-form module: right-standard
//! coordinates, dagger, inner products, line element, braiding, junk
//! projection, exterior derivative and the contraction maps.
//!
//! A rank-k tensor is stored as a finitely supported map from frame
//! multi-indices to coefficients gathered on the right. In deformed mode the
//! same storage denotes the twisted-module decomposition; every operation
//! below takes the mode into account through coefficient-level phases only.

use crate::algebra::{
    bicharacter, star_phase, AlgebraElement, AlgebraSpec, BasisKey, Degree, Derivation, Mode,
};
use crate::matrix::Matrix;
use crate::scalar::{rat_frac, Scalar};
use serde::ser::SerializeStruct;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormsError {
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
}

/// Frame presentation of the one-form module.
#[derive(Clone, PartialEq, Debug)]
pub struct FrameSpec {
    pub size: usize,
    pub degrees: Vec<Degree>,
    /// Star matrix: w_j^dag = sum_k w_k * star[(k,j)].
    pub star: Matrix,
    /// Frame differential table, one rank-2 tensor per index (classical coordinates).
    pub dw: Vec<Tensor>,
}

/// Element of the k-fold tensor power in right-standard form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Tensor {
    rank: usize,
    terms: BTreeMap<Vec<u8>, AlgebraElement>,
}

impl Tensor {
    pub fn zero(rank: usize) -> Self {
        Tensor { rank, terms: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scalar(e: AlgebraElement) -> Self {
        let mut t = Tensor::zero(0);
        t.add_term(Vec::new(), e);
        t
    }

    /// The frame element w_j as a rank-1 tensor.
    pub fn basis1(j: usize) -> Self {
        Tensor::basis(&[j])
    }

    pub fn basis(idx: &[usize]) -> Self {
        let mut t = Tensor::zero(idx.len());
        t.add_term(idx.iter().map(|&i| i as u8).collect(), AlgebraElement::from_key(BasisKey::Mono(0, 0)));
        t
    }

    /// Build from (index, coefficient) pairs; the unit coefficient key is
    /// taken from the coefficients themselves.
    pub fn from_terms(rank: usize, it: impl IntoIterator<Item = (Vec<u8>, AlgebraElement)>) -> Self {
        let mut t = Tensor::zero(rank);
        for (i, e) in it {
            t.add_term(i, e);
        }
        t
    }

    pub fn add_term(&mut self, idx: Vec<u8>, e: AlgebraElement) {
        assert_eq!(idx.len(), self.rank, "index length must equal rank");
        if e.is_zero() {
            return;
        }
        match self.terms.get_mut(&idx) {
            Some(cur) => {
                let s = cur.add(&e);
                if s.is_zero() {
                    self.terms.remove(&idx);
                } else {
                    *cur = s;
                }
            }
            None => {
                self.terms.insert(idx, e);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &AlgebraElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff_of(&self, idx: &[u8]) -> AlgebraElement {
        self.terms.get(idx).cloned().unwrap_or_else(AlgebraElement::zero)
    }

    pub fn add(&self, o: &Tensor) -> Tensor {
        assert_eq!(self.rank, o.rank);
        let mut r = self.clone();
        for (i, e) in o.terms.iter() {
            r.add_term(i.clone(), e.clone());
        }
        r
    }

    pub fn sub(&self, o: &Tensor) -> Tensor {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Tensor {
        Tensor { rank: self.rank, terms: self.terms.iter().map(|(i, e)| (i.clone(), e.neg())).collect() }
    }

    pub fn scalar_mul(&self, s: &Scalar) -> Tensor {
        if s.is_zero() {
            return Tensor::zero(self.rank);
        }
        Tensor { rank: self.rank, terms: self.terms.iter().map(|(i, e)| (i.clone(), e.scale(s))).collect() }
    }

    /// As a rank-0 tensor, the underlying algebra element.
    pub fn as_element(&self) -> Option<AlgebraElement> {
        if self.rank != 0 {
            return None;
        }
        Some(self.coeff_of(&[]))
    }

    /// Sub-tensor of all terms whose first leg equals `j`, with that leg removed.
    pub fn strip_first_leg(&self, j: usize) -> Tensor {
        let mut t = Tensor::zero(self.rank - 1);
        for (i, e) in self.terms.iter() {
            if i[0] == j as u8 {
                t.add_term(i[1..].to_vec(), e.clone());
            }
        }
        t
    }
}

impl Serialize for Tensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term {
            index: Vec<u8>,
            coeff: BTreeMap<String, String>,
        }
        let mut st = s.serialize_struct("Tensor", 2)?;
        st.serialize_field("rank", &self.rank)?;
        let terms: Vec<Term> = self
            .terms
            .iter()
            .map(|(i, e)| Term {
                index: i.clone(),
                coeff: e.terms().map(|(k, c)| (k.to_string(), c.to_string())).collect(),
            })
            .collect();
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// All tensor operations, parameterized by the frame data and the mode.
#[derive(Clone, Copy)]
pub struct Calculus<'g> {
    pub algebra: &'g AlgebraSpec,
    pub frame: &'g FrameSpec,
    pub derivation: &'g Derivation,
    pub mode: Mode,
    /// Sabotage hook: negate the braiding's bicharacter exponent.
    pub sigma_flip: bool,
}

impl<'g> Calculus<'g> {
    pub fn new(
        algebra: &'g AlgebraSpec,
        frame: &'g FrameSpec,
        derivation: &'g Derivation,
        mode: Mode,
    ) -> Self {
        Calculus { algebra, frame, derivation, mode, sigma_flip: false }
    }

    pub fn with_sigma_flip(mut self) -> Self {
        self.sigma_flip = true;
        self
    }

    pub fn n(&self) -> usize {
        self.frame.size
    }

    pub fn leg_degree(&self, j: u8) -> Degree {
        self.frame.degrees[j as usize]
    }

    pub fn idx_degree(&self, idx: &[u8]) -> Degree {
        idx.iter().fold(Degree::ZERO, |d, &j| d + self.leg_degree(j))
    }

    pub fn term_degree(&self, idx: &[u8], key: BasisKey) -> Degree {
        self.idx_degree(idx) + self.algebra.degree(key)
    }

    /// Rewrite a . w_j as w_j . a' (termwise bicharacter phases when deformed).
    pub fn commute_left(&self, a: &AlgebraElement, j: usize) -> AlgebraElement {
        a.commuted_past(self.algebra, self.leg_degree(j as u8), self.mode)
    }

    /// Tensor product of right-standard tensors in the current mode.
    pub fn tensor_mul(&self, s: &Tensor, t: &Tensor) -> Tensor {
        let mut r = Tensor::zero(s.rank + t.rank);
        for (i1, a) in s.terms.iter() {
            for (i2, b) in t.terms.iter() {
                let moved = a.commuted_past(self.algebra, self.idx_degree(i2), self.mode);
                let coeff = moved.mul(b, self.algebra, self.mode);
                let mut idx = i1.clone();
                idx.extend_from_slice(i2);
                r.add_term(idx, coeff);
            }
        }
        r
    }

    /// t . a (right module action).
    pub fn scale_right(&self, t: &Tensor, a: &AlgebraElement) -> Tensor {
        let mut r = Tensor::zero(t.rank);
        for (i, c) in t.terms.iter() {
            r.add_term(i.clone(), c.mul(a, self.algebra, self.mode));
        }
        r
    }

    /// a . t (left module action), re-standardized.
    pub fn scale_left(&self, a: &AlgebraElement, t: &Tensor) -> Tensor {
        let mut r = Tensor::zero(t.rank);
        for (i, c) in t.terms.iter() {
            let moved = a.commuted_past(self.algebra, self.idx_degree(i), self.mode);
            r.add_term(i.clone(), moved.mul(c, self.algebra, self.mode));
        }
        r
    }

    /// Mode-dependent dagger of a single frame leg, as a rank-1 tensor.
    pub fn frame_dagger1(&self, j: u8) -> Tensor {
        let d = self.leg_degree(j);
        let ph = star_phase(self.mode, d);
        let mut t = Tensor::zero(1);
        for k in 0..self.n() {
            let s = self.frame.star.at(k, j as usize);
            if !s.is_zero() {
                t.add_term(vec![k as u8], AlgebraElement::from_term(BasisKey::Mono(0, 0), s * &ph));
            }
        }
        t
    }

    /// Involution on tensors: reverse legs, star each leg and the coefficient.
    pub fn dagger(&self, t: &Tensor) -> Tensor {
        let mut r = Tensor::zero(t.rank);
        for (idx, a) in t.terms.iter() {
            let mut legs = Tensor::scalar(AlgebraElement::unit(self.algebra));
            for &j in idx.iter().rev() {
                legs = self.tensor_mul(&legs, &self.frame_dagger1(j));
            }
            let starred = a.star(self.algebra, self.mode);
            r = r.add(&self.scale_left(&starred, &legs));
        }
        r
    }

    /// Right inner product, conjugate-linear in the first slot. The frame is
    /// orthonormal, so only matching multi-indices contribute.
    pub fn inner_right(&self, s: &Tensor, t: &Tensor) -> Result<AlgebraElement, FormsError> {
        if s.rank != t.rank {
            return Err(FormsError::RankMismatch { expected: s.rank, got: t.rank });
        }
        let mut acc = AlgebraElement::zero();
        for (i, a) in s.terms.iter() {
            if let Some(b) = t.terms.get(i) {
                acc = acc.add(&a.star(self.algebra, self.mode).mul(b, self.algebra, self.mode));
            }
        }
        Ok(acc)
    }

    /// Left inner product through daggers.
    pub fn inner_left(&self, s: &Tensor, t: &Tensor) -> Result<AlgebraElement, FormsError> {
        self.inner_right(&self.dagger(s), &self.dagger(t))
    }

    /// The line element G = sum_j w_j (x) w_j^dag.
    pub fn line_element(&self) -> Tensor {
        let mut g = Tensor::zero(2);
        for j in 0..self.n() {
            g = g.add(&self.tensor_mul(&Tensor::basis1(j), &self.frame_dagger1(j as u8)));
        }
        g
    }

    /// -g(t) = <G | t>_B for rank-2 t; returns +g here, see callers.
    pub fn g_pair(&self, t: &Tensor) -> Result<AlgebraElement, FormsError> {
        Ok(self.inner_right(&self.line_element(), t)?.neg())
    }

    /// e^beta = -g(G); equals dim(M) times the unit for the built-ins.
    pub fn e_beta(&self) -> AlgebraElement {
        self.inner_right(&self.line_element(), &self.line_element()).expect("rank 2")
    }

    fn sigma_phase(&self, a: Degree, b: Degree) -> Scalar {
        if self.mode == Mode::Classical {
            return Scalar::one();
        }
        if self.sigma_flip {
            bicharacter(b, a)
        } else {
            bicharacter(a, b)
        }
    }

    pub fn sigma_phase_pub(&self, a: Degree, b: Degree) -> Scalar {
        self.sigma_phase(a, b)
    }

    /// Braiding on adjacent legs (pos, pos+1); rank-2 callers use pos = 0.
    pub fn sigma_at(&self, t: &Tensor, pos: usize) -> Tensor {
        assert!(pos + 2 <= t.rank, "braiding needs two adjacent legs");
        let mut r = Tensor::zero(t.rank);
        for (idx, a) in t.terms.iter() {
            let (x, y) = (idx[pos], idx[pos + 1]);
            let ph = self.sigma_phase(self.leg_degree(x), self.leg_degree(y));
            let mut ni = idx.clone();
            ni.swap(pos, pos + 1);
            r.add_term(ni, a.scale(&ph));
        }
        r
    }

    pub fn sigma(&self, t: &Tensor) -> Result<Tensor, FormsError> {
        if t.rank != 2 {
            return Err(FormsError::RankMismatch { expected: 2, got: t.rank });
        }
        Ok(self.sigma_at(t, 0))
    }

    /// Junk projection (1 + sigma)/2 on legs (pos, pos+1).
    pub fn junk_at(&self, t: &Tensor, pos: usize) -> Tensor {
        let half = Scalar::from_rat(rat_frac(1, 2));
        t.add(&self.sigma_at(t, pos)).scalar_mul(&half)
    }

    pub fn junk_projection(&self, t: &Tensor) -> Result<Tensor, FormsError> {
        if t.rank != 2 {
            return Err(FormsError::RankMismatch { expected: 2, got: t.rank });
        }
        Ok(self.junk_at(t, 0))
    }

    /// (1 - junk) on legs (pos, pos+1).
    pub fn co_junk_at(&self, t: &Tensor, pos: usize) -> Tensor {
        let half = Scalar::from_rat(rat_frac(1, 2));
        t.sub(&self.sigma_at(t, pos)).scalar_mul(&half)
    }

    /// One-form coordinates of [D, a] in the coordinates of the current mode.
    pub fn derivative_tensor(&self, a: &AlgebraElement) -> Tensor {
        let mut t = Tensor::zero(1);
        for (j, c) in self.derivation.of_element(a) {
            let cm = self.one_form_coeff_to_mode(j, &c);
            t.add_term(vec![j as u8], cm);
        }
        t
    }

    /// Convert the classical right coefficient of leg `j` to the current
    /// mode's coordinates: w_j . c = w_j * c' with the twist phase.
    fn one_form_coeff_to_mode(&self, j: usize, c: &AlgebraElement) -> AlgebraElement {
        if self.mode == Mode::Classical {
            return c.clone();
        }
        let dj = self.leg_degree(j as u8);
        c.map_terms(|k, s| s * &Scalar::lambda_pow(-dj.n2 * self.algebra.degree(k).n1))
    }

    /// The frame differential table in the coordinates of the current mode.
    pub fn dw_mode(&self, j: usize) -> Tensor {
        match self.mode {
            Mode::Classical => self.frame.dw[j].clone(),
            Mode::Deformed => self.twist(&self.frame.dw[j], 1),
        }
    }

    /// Exterior derivative on one-forms: d(w a) = d(w) a - (1 - junk)(w (x) da).
    pub fn exterior_d(&self, t: &Tensor) -> Result<Tensor, FormsError> {
        if t.rank != 1 {
            return Err(FormsError::RankMismatch { expected: 1, got: t.rank });
        }
        let mut out = Tensor::zero(2);
        for (idx, a) in t.terms.iter() {
            let j = idx[0] as usize;
            out = out.add(&self.scale_right(&self.dw_mode(j), a));
            let da = self.derivative_tensor(a);
            if !da.is_zero() {
                let w_da = self.tensor_mul(&Tensor::basis1(j), &da);
                out = out.sub(&self.co_junk_at(&w_da, 0));
            }
        }
        Ok(out)
    }

    /// Right contraction: split each term of `a` after `a.rank - k` legs and
    /// pair the daggered tail against `rho`.
    pub fn alpha_right(&self, a: &Tensor, rho: &Tensor) -> Result<Tensor, FormsError> {
        let k = rho.rank;
        if a.rank < k {
            return Err(FormsError::RankMismatch { expected: k, got: a.rank });
        }
        let n = a.rank - k;
        let mut out = Tensor::zero(n);
        for (idx, c) in a.terms.iter() {
            let head = idx[..n].to_vec();
            let mut tail = Tensor::zero(k);
            tail.add_term(idx[n..].to_vec(), c.clone());
            let v = self.inner_right(&self.dagger(&tail), rho)?;
            out.add_term(head, v);
        }
        Ok(out)
    }

    /// Left contraction: pair rho^dag against the head of each term, multiply
    /// the value onto the remaining legs from the left.
    pub fn alpha_left(&self, a: &Tensor, rho: &Tensor) -> Result<Tensor, FormsError> {
        let k = rho.rank;
        if a.rank < k {
            return Err(FormsError::RankMismatch { expected: k, got: a.rank });
        }
        let n = a.rank - k;
        let rho_dag = self.dagger(rho);
        let mut out = Tensor::zero(n);
        for (idx, c) in a.terms.iter() {
            let head = Tensor::basis(&idx[..k].iter().map(|&x| x as usize).collect::<Vec<_>>());
            let v = self.inner_right(&rho_dag, &head)?;
            if v.is_zero() {
                continue;
            }
            let mut rest = Tensor::zero(n);
            rest.add_term(idx[k..].to_vec(), c.clone());
            out = out.add(&self.scale_left(&v, &rest));
        }
        Ok(out)
    }

    /// Twist comparison map with the split after `split` legs: each term is
    /// scaled by L^{-n2(left) n1(right)}, the coefficient belonging to the
    /// right part.
    pub fn twist(&self, t: &Tensor, split: usize) -> Tensor {
        self.phase_map(t, |idx, key| {
            let left = self.idx_degree(&idx[..split]);
            let right = self.idx_degree(&idx[split..]) + self.algebra.degree(key);
            -left.n2 * right.n1
        })
    }

    pub fn twist_inv(&self, t: &Tensor, split: usize) -> Tensor {
        self.phase_map(t, |idx, key| {
            let left = self.idx_degree(&idx[..split]);
            let right = self.idx_degree(&idx[split..]) + self.algebra.degree(key);
            left.n2 * right.n1
        })
    }

    /// Threefold twist: L^{-n2(x)(n1(y)+n1(z)) - n2(y) n1(z)} on x (x) y (x) z.
    pub fn twist3(&self, t: &Tensor) -> Tensor {
        assert_eq!(t.rank, 3);
        self.phase_map(t, |idx, key| {
            let a = self.leg_degree(idx[0]);
            let b = self.leg_degree(idx[1]);
            let c = self.leg_degree(idx[2]) + self.algebra.degree(key);
            -a.n2 * (b.n1 + c.n1) - b.n2 * c.n1
        })
    }

    pub fn twist3_inv(&self, t: &Tensor) -> Tensor {
        assert_eq!(t.rank, 3);
        self.phase_map(t, |idx, key| {
            let a = self.leg_degree(idx[0]);
            let b = self.leg_degree(idx[1]);
            let c = self.leg_degree(idx[2]) + self.algebra.degree(key);
            a.n2 * (b.n1 + c.n1) + b.n2 * c.n1
        })
    }

    /// Twist applied to an inner span of legs; `range` is (start, end) of the
    /// left factor, the right factor being legs end..tail_end. Used by the
    /// coherence checks.
    pub fn twist_span(
        &self,
        t: &Tensor,
        left: std::ops::Range<usize>,
        right: std::ops::Range<usize>,
        coeff_in_right: bool,
    ) -> Tensor {
        self.phase_map(t, |idx, key| {
            let l = self.idx_degree(&idx[left.clone()]);
            let mut r = self.idx_degree(&idx[right.clone()]);
            if coeff_in_right {
                r = r + self.algebra.degree(key);
            }
            -l.n2 * r.n1
        })
    }

    pub fn phase_map(&self, t: &Tensor, f: impl Fn(&[u8], BasisKey) -> i64) -> Tensor {
        let mut r = Tensor::zero(t.rank);
        for (idx, a) in t.terms.iter() {
            let mut e = AlgebraElement::zero();
            for (k, s) in a.terms() {
                e.add_term(*k, s * &Scalar::lambda_pow(f(idx, *k)));
            }
            r.add_term(idx.clone(), e);
        }
        r
    }

    /// Rank-1 coordinate change from classical to deformed storage.
    pub fn rank1_to_deformed(&self, t: &Tensor) -> Tensor {
        assert_eq!(t.rank, 1);
        self.phase_map(t, |idx, key| {
            let dj = self.leg_degree(idx[0]);
            -dj.n2 * self.algebra.degree(key).n1
        })
    }

    pub fn rank1_to_classical(&self, t: &Tensor) -> Tensor {
        assert_eq!(t.rank, 1);
        self.phase_map(t, |idx, key| {
            let dj = self.leg_degree(idx[0]);
            dj.n2 * self.algebra.degree(key).n1
        })
    }

    /// Frame-reconstruction: rho = sum_j w_j . <w_j | rho>.
    pub fn frame_reconstruct(&self, rho: &Tensor) -> Tensor {
        let mut out = Tensor::zero(1);
        for j in 0..self.n() {
            let c = self.inner_right(&Tensor::basis1(j), rho).expect("rank 1");
            out = out.add(&self.scale_right(&Tensor::basis1(j), &c));
        }
        out
    }
}

/// Pretty-printer for diagnostics.
pub fn display_tensor(t: &Tensor, spec: &AlgebraSpec) -> String {
    if t.is_zero() {
        return "0".into();
    }
    t.terms()
        .map(|(i, e)| {
            let legs = i.iter().map(|j| format!("w{}", j + 1)).collect::<Vec<_>>().join("⊗");
            if i.is_empty() {
                e.display(spec)
            } else {
                format!("{legs}·[{}]", e.display(spec))
            }
        })
        .collect::<Vec<_>>()
        .join("  +  ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    /// Flat two-frame with star = -Id over the torus algebra.
    fn torus_frame() -> (AlgebraSpec, FrameSpec, Derivation) {
        let star = Matrix::from_fn(2, 2, |r, c| {
            if r == c {
                -&Scalar::one()
            } else {
                Scalar::zero()
            }
        });
        (
            AlgebraSpec::LaurentMonomials,
            FrameSpec {
                size: 2,
                degrees: vec![Degree::ZERO, Degree::ZERO],
                star,
                dw: vec![Tensor::zero(2), Tensor::zero(2)],
            },
            Derivation::torus(),
        )
    }

    #[test]
    fn dagger_is_involutive_on_torus() {
        let (alg, frame, deriv) = torus_frame();
        for mode in [Mode::Classical, Mode::Deformed] {
            let c = Calculus::new(&alg, &frame, &deriv, mode);
            let mut rng = StdRng::seed_from_u64(17);
            for _ in 0..25 {
                let t = crate::verify::sample_tensor(&c, 2, &mut rng, 2);
                assert_eq!(c.dagger(&c.dagger(&t)), t, "mode {mode}");
            }
        }
    }

    #[test]
    fn torus_line_element() {
        let (alg, frame, deriv) = torus_frame();
        let c = Calculus::new(&alg, &frame, &deriv, Mode::Classical);
        let g = c.line_element();
        // G = -(w1 (x) w1 + w2 (x) w2)
        let mut expect = Tensor::zero(2);
        expect.add_term(vec![0, 0], AlgebraElement::from_term(BasisKey::Mono(0, 0), -&Scalar::one()));
        expect.add_term(vec![1, 1], AlgebraElement::from_term(BasisKey::Mono(0, 0), -&Scalar::one()));
        assert_eq!(g, expect);
        // e^beta = 2
        assert_eq!(
            c.e_beta(),
            AlgebraElement::from_term(BasisKey::Mono(0, 0), Scalar::from_int(2))
        );
        // g_pair(G) = -e^beta, g_pair(w1 (x) w1) = +1, g_pair(w1 (x) w2) = 0
        assert_eq!(c.g_pair(&g).unwrap(), c.e_beta().neg());
        assert_eq!(
            c.g_pair(&Tensor::basis(&[0, 0])).unwrap(),
            AlgebraElement::unit(&alg)
        );
        assert!(c.g_pair(&Tensor::basis(&[0, 1])).unwrap().is_zero());
    }

    #[test]
    fn junk_projects_symmetric_and_kills_antisymmetric() {
        let (alg, frame, deriv) = torus_frame();
        let c = Calculus::new(&alg, &frame, &deriv, Mode::Classical);
        let sym = Tensor::basis(&[0, 1]).add(&Tensor::basis(&[1, 0]));
        let asym = Tensor::basis(&[0, 1]).sub(&Tensor::basis(&[1, 0]));
        assert_eq!(c.junk_projection(&sym).unwrap(), sym);
        assert!(c.junk_projection(&asym).unwrap().is_zero());
    }

    #[test]
    fn torus_exterior_d() {
        let (alg, frame, deriv) = torus_frame();
        let c = Calculus::new(&alg, &frame, &deriv, Mode::Classical);
        // d(w1) = 0
        assert!(c.exterior_d(&Tensor::basis1(0)).unwrap().is_zero());
        // w1 . U is proportional to [D, U]: d of it must vanish
        let u = AlgebraElement::from_key(BasisKey::Mono(1, 0));
        let mut w1u = Tensor::zero(1);
        w1u.add_term(vec![0], u.clone());
        assert!(c.exterior_d(&w1u).unwrap().is_zero());
        // d(w1 . V) is a nonzero antisymmetric tensor
        let v = AlgebraElement::from_key(BasisKey::Mono(0, 1));
        let mut w1v = Tensor::zero(1);
        w1v.add_term(vec![0], v.clone());
        let d = c.exterior_d(&w1v).unwrap();
        assert!(!d.is_zero());
        assert_eq!(c.sigma(&d).unwrap(), d.neg());
        // d([D, b]) = 0 for monomials b
        for key in [BasisKey::Mono(1, 0), BasisKey::Mono(0, 1), BasisKey::Mono(2, -1)] {
            let db = c.derivative_tensor(&AlgebraElement::from_key(key));
            assert!(c.exterior_d(&db).unwrap().is_zero(), "d^2 via universal calc for {key:?}");
        }
    }

    #[test]
    fn frame_identity_random() {
        let (alg, frame, deriv) = torus_frame();
        for mode in [Mode::Classical, Mode::Deformed] {
            let c = Calculus::new(&alg, &frame, &deriv, mode);
            let mut rng = StdRng::seed_from_u64(5);
            for _ in 0..30 {
                let rho = crate::verify::sample_tensor(&c, 1, &mut rng, 2);
                assert_eq!(c.frame_reconstruct(&rho), rho);
            }
        }
    }

    #[test]
    fn alpha_of_line_element_is_identity() {
        let (alg, frame, deriv) = torus_frame();
        for mode in [Mode::Classical, Mode::Deformed] {
            let c = Calculus::new(&alg, &frame, &deriv, mode);
            let g = c.line_element();
            let mut rng = StdRng::seed_from_u64(23);
            for _ in 0..20 {
                let rho = crate::verify::sample_tensor(&c, 1, &mut rng, 2);
                assert_eq!(c.alpha_right(&g, &rho).unwrap(), rho);
                assert_eq!(c.alpha_left(&g, &rho).unwrap(), rho);
            }
        }
    }

    #[test]
    fn alpha_contract_example() {
        let (alg, frame, deriv) = torus_frame();
        let c = Calculus::new(&alg, &frame, &deriv, Mode::Classical);
        // alpha_right(w1 (x) w2 (x) w1, w1) = w1 (x) w2 . <w1^dag | w1> = -(w1 (x) w2)
        let a = Tensor::basis(&[0, 1, 0]);
        let out = c.alpha_right(&a, &Tensor::basis1(0)).unwrap();
        assert_eq!(out, Tensor::basis(&[0, 1]).neg());
        // contraction against zero
        assert!(c.alpha_right(&a, &Tensor::zero(1)).unwrap().is_zero());
    }
}
