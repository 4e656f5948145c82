//! Dirac modules with Clifford action: the four defining conditions, the
//! connection Laplacian, the Weitzenbock residue and the divergence check.

use crate::algebra::{AlgebraElement, BasisKey, Degree, Mode};
use crate::forms::{Calculus, Tensor};
use crate::levi_civita::Connection;
use crate::matrix::Matrix;
use crate::scalar::{Rat, Scalar};
use std::collections::BTreeMap;

/// Free spinor module data: Clifford matrices represent c(w_j), the spin
/// table holds the connection coefficients nabla(x_a) = sum_j w_j (x) sum_b
/// x_b (Gamma_j)_{ba}. The functional phi is the unit-coefficient state.
#[derive(Clone, PartialEq, Debug)]
pub struct DiracModuleSpec {
    pub spinor_rank: usize,
    pub spinor_degrees: Vec<Degree>,
    pub gamma: Vec<Matrix>,
    pub spin_table: Vec<Matrix>,
}

/// Element of Omega^k (x) X in right-standard form: frame legs, then the
/// spinor basis index, then the algebra coefficient.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpinTensor {
    rank: usize,
    terms: BTreeMap<(Vec<u8>, u8, BasisKey), Scalar>,
}

impl SpinTensor {
    pub fn zero(rank: usize) -> Self {
        SpinTensor { rank, terms: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn basis_spinor(a: usize, unit: BasisKey) -> Self {
        let mut t = SpinTensor::zero(0);
        t.add_term(Vec::new(), a as u8, unit, Scalar::one());
        t
    }

    pub fn add_term(&mut self, legs: Vec<u8>, spinor: u8, key: BasisKey, s: Scalar) {
        assert_eq!(legs.len(), self.rank);
        if s.is_zero() {
            return;
        }
        let k = (legs, spinor, key);
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

    pub fn terms(&self) -> impl Iterator<Item = (&(Vec<u8>, u8, BasisKey), &Scalar)> {
        self.terms.iter()
    }

    pub fn add(&self, o: &SpinTensor) -> SpinTensor {
        assert_eq!(self.rank, o.rank);
        let mut r = self.clone();
        for ((l, a, k), s) in o.terms.iter() {
            r.add_term(l.clone(), *a, *k, s.clone());
        }
        r
    }

    pub fn sub(&self, o: &SpinTensor) -> SpinTensor {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> SpinTensor {
        SpinTensor {
            rank: self.rank,
            terms: self.terms.iter().map(|(k, s)| (k.clone(), -s)).collect(),
        }
    }

    pub fn scalar_mul(&self, c: &Scalar) -> SpinTensor {
        if c.is_zero() {
            return SpinTensor::zero(self.rank);
        }
        SpinTensor {
            rank: self.rank,
            terms: self.terms.iter().map(|(k, s)| (k.clone(), s * c)).collect(),
        }
    }
}

/// The tensor calculus extended by the spinor module.
#[derive(Clone, Copy)]
pub struct DiracCalculus<'g> {
    pub calc: Calculus<'g>,
    pub dirac: &'g DiracModuleSpec,
}

impl<'g> DiracCalculus<'g> {
    pub fn new(calc: Calculus<'g>, dirac: &'g DiracModuleSpec) -> Self {
        DiracCalculus { calc, dirac }
    }

    pub fn mode(&self) -> Mode {
        self.calc.mode
    }

    fn unit(&self) -> BasisKey {
        self.calc.algebra.unit_key()
    }

    pub fn spin_degree(&self, a: u8) -> Degree {
        self.dirac.spinor_degrees[a as usize]
    }

    fn spin_part_degree(&self, spinor: u8, key: BasisKey) -> Degree {
        self.spin_degree(spinor) + self.calc.algebra.degree(key)
    }

    /// Left action of an algebra element on a spin tensor.
    pub fn alg_mul_left(&self, a: &AlgebraElement, t: &SpinTensor) -> SpinTensor {
        let spec = self.calc.algebra;
        let mode = self.mode();
        let mut out = SpinTensor::zero(t.rank);
        for ((legs, b, key), s) in t.terms.iter() {
            let past = self.calc.idx_degree(legs) + self.spin_degree(*b);
            let moved = a.commuted_past(spec, past, mode);
            let coeff = moved.mul(&AlgebraElement::from_term(*key, s.clone()), spec, mode);
            for (k2, s2) in coeff.terms() {
                out.add_term(legs.clone(), *b, *k2, s2.clone());
            }
        }
        out
    }

    /// Graft a form tensor onto a spin tensor (the tensor product over the
    /// algebra, in the current mode).
    pub fn graft(&self, s: &Tensor, t: &SpinTensor) -> SpinTensor {
        let spec = self.calc.algebra;
        let mode = self.mode();
        let mut out = SpinTensor::zero(s.rank() + t.rank);
        for (idx, a) in s.terms() {
            for ((legs, b, key), c) in t.terms.iter() {
                let past = self.calc.idx_degree(legs) + self.spin_degree(*b);
                let moved = a.commuted_past(spec, past, mode);
                let coeff = moved.mul(&AlgebraElement::from_term(*key, c.clone()), spec, mode);
                let mut nl = idx.clone();
                nl.extend_from_slice(legs);
                for (k2, s2) in coeff.terms() {
                    out.add_term(nl.clone(), *b, *k2, s2.clone());
                }
            }
        }
        out
    }

    /// Clifford action consuming the first leg; in the deformed mode the
    /// operator product picks up L^{n2(leg) n1(rest)}.
    pub fn clifford_consume(&self, t: &SpinTensor) -> SpinTensor {
        assert!(t.rank >= 1);
        let s_rank = self.dirac.spinor_rank;
        let mut out = SpinTensor::zero(t.rank - 1);
        for ((legs, b, key), s) in t.terms.iter() {
            let j = legs[0] as usize;
            let rest = legs[1..].to_vec();
            let rest_deg = self.calc.idx_degree(&rest) + self.spin_part_degree(*b, *key);
            let phase = match self.mode() {
                Mode::Classical => Scalar::one(),
                Mode::Deformed => Scalar::lambda_pow(self.calc.leg_degree(legs[0]).n2 * rest_deg.n1),
            };
            for bp in 0..s_rank {
                let entry = self.dirac.gamma[j].at(bp, *b as usize);
                if entry.is_zero() {
                    continue;
                }
                out.add_term(rest.clone(), bp as u8, *key, &(&phase * entry) * s);
            }
        }
        out
    }

    /// c(omega (x) x) for a one-form and a rank-0 spinor.
    pub fn clifford(&self, omega: &Tensor, x: &SpinTensor) -> SpinTensor {
        assert_eq!(omega.rank(), 1);
        assert_eq!(x.rank, 0);
        self.clifford_consume(&self.graft(omega, x))
    }

    /// (1 (x) c): consume the second of two form legs, the first untouched.
    pub fn clifford_consume_second(&self, t: &SpinTensor) -> SpinTensor {
        assert_eq!(t.rank, 2);
        let s_rank = self.dirac.spinor_rank;
        let mut out = SpinTensor::zero(1);
        for ((legs, b, key), s) in t.terms.iter() {
            let j = legs[1] as usize;
            let rest_deg = self.spin_part_degree(*b, *key);
            let phase = match self.mode() {
                Mode::Classical => Scalar::one(),
                Mode::Deformed => Scalar::lambda_pow(self.calc.leg_degree(legs[1]).n2 * rest_deg.n1),
            };
            for bp in 0..s_rank {
                let entry = self.dirac.gamma[j].at(bp, *b as usize);
                if entry.is_zero() {
                    continue;
                }
                out.add_term(vec![legs[0]], bp as u8, *key, &(&phase * entry) * s);
            }
        }
        out
    }

    /// The spin connection in the current mode. Deformed mode transports the
    /// classical table by the twist phases.
    fn spin_table_entry(&self, j: usize, b: usize, a: usize) -> Scalar {
        let e = self.dirac.spin_table[j].at(b, a).clone();
        if e.is_zero() {
            return e;
        }
        match self.mode() {
            Mode::Classical => e,
            Mode::Deformed => {
                let dj = self.calc.leg_degree(j as u8);
                let xb = self.spin_degree(b as u8);
                &e * &Scalar::lambda_pow(-dj.n2 * xb.n1)
            }
        }
    }

    /// Left connection on spinors: Grassmann part plus the table.
    pub fn spin_connection(&self, x: &SpinTensor) -> SpinTensor {
        assert_eq!(x.rank, 0);
        let spec = self.calc.algebra;
        let mode = self.mode();
        let s_rank = self.dirac.spinor_rank;
        let mut out = SpinTensor::zero(1);
        for ((_, a, key), s) in x.terms.iter() {
            // move the coefficient to the left of the spinor basis element
            let f = AlgebraElement::from_term(*key, s.clone());
            let f_left = f.commuted_before(spec, self.spin_degree(*a), mode);
            // Grassmann part: [D, f~] (x) x_a, coefficients re-standardized
            let df = self.calc.derivative_tensor(&f_left);
            for (idx, c) in df.terms() {
                let moved = c.commuted_past(spec, self.spin_degree(*a), mode);
                for (k2, s2) in moved.terms() {
                    out.add_term(idx.clone(), *a, *k2, s2.clone());
                }
            }
            // table part: f~ * sum_j w_j (x) x_b Gamma_j[b][a]
            for j in 0..self.calc.n() {
                for b in 0..s_rank {
                    let gamma = self.spin_table_entry(j, b, *a as usize);
                    if gamma.is_zero() {
                        continue;
                    }
                    let past = self.calc.leg_degree(j as u8) + self.spin_degree(b as u8);
                    let moved = f_left.commuted_past(spec, past, mode);
                    for (k2, s2) in moved.terms() {
                        out.add_term(vec![j as u8], b as u8, *k2, s2 * &gamma);
                    }
                }
            }
        }
        out
    }

    /// D = c . nabla_left.
    pub fn dirac_apply(&self, x: &SpinTensor) -> SpinTensor {
        self.clifford_consume(&self.spin_connection(x))
    }

    /// Braiding on the two form legs of a rank-2 spin tensor.
    pub fn sigma_spin(&self, t: &SpinTensor) -> SpinTensor {
        assert_eq!(t.rank, 2);
        let mut out = SpinTensor::zero(2);
        for ((legs, b, key), s) in t.terms.iter() {
            let ph = self.calc.sigma_phase_pub(
                self.calc.leg_degree(legs[0]),
                self.calc.leg_degree(legs[1]),
            );
            out.add_term(vec![legs[1], legs[0]], *b, *key, s * &ph);
        }
        out
    }

    /// (1 - junk) (x) 1 on the form legs of a rank-2 spin tensor.
    pub fn co_junk_spin(&self, t: &SpinTensor) -> SpinTensor {
        let half = Scalar::from_rat(crate::scalar::rat_frac(1, 2));
        t.sub(&self.sigma_spin(t)).scalar_mul(&half)
    }

    /// c . (m . sigma (x) 1): the Clifford representation of a two-form leg
    /// pair acting on the spinor part. The inner leg's matrix acts first:
    /// m(w_a (x) w_b) = c(w_a) c(w_b) as operators.
    pub fn clifford_of_braided_pair(&self, t: &SpinTensor) -> SpinTensor {
        assert_eq!(t.rank, 2);
        let braided = self.sigma_spin(t);
        self.clifford_consume(&self.clifford_consume_second(&braided))
    }

    /// Matrix of m on a rank-2 tensor with scalar coefficients (used for the
    /// m(G) = dim M check). Returns None when a coefficient is not scalar.
    pub fn m_rep_matrix(&self, t: &Tensor) -> Option<Matrix> {
        assert_eq!(t.rank(), 2);
        let s = self.dirac.spinor_rank;
        let mut m = Matrix::zero(s, s);
        for (idx, e) in t.terms() {
            let mut scalar = Scalar::zero();
            for (k, c) in e.terms() {
                if *k != self.unit() {
                    return None;
                }
                scalar = &scalar + c;
            }
            let (i, j) = (idx[0] as usize, idx[1] as usize);
            let phase = match self.mode() {
                Mode::Classical => Scalar::one(),
                Mode::Deformed => Scalar::lambda_pow(
                    self.calc.leg_degree(idx[0]).n2 * self.calc.leg_degree(idx[1]).n1,
                ),
            };
            let prod = self.dirac.gamma[i].mul(&self.dirac.gamma[j]).scale(&(&scalar * &phase));
            m = m.add(&prod);
        }
        Some(m)
    }

    /// e^{-beta} as an exact scalar (the inverse of the unit coefficient of
    /// e^beta, which the validator pins to dim M).
    pub fn e_beta_inv(&self) -> Scalar {
        let e = self.calc.e_beta();
        let mut s = Scalar::zero();
        for (k, c) in e.terms() {
            assert_eq!(*k, self.unit(), "e^beta must be central scalar");
            s = &s + c;
        }
        s.inv().expect("e^beta invertible")
    }

    /// Apply the constant matrix e^{-beta} m(G) to the spinor index.
    pub fn apply_e_beta_m_g(&self, x: &SpinTensor) -> SpinTensor {
        let g = self.calc.line_element();
        let mg = self.m_rep_matrix(&g).expect("line element has scalar coefficients");
        let scale = self.e_beta_inv();
        let mut out = SpinTensor::zero(x.rank);
        for ((legs, b, key), s) in x.terms.iter() {
            for bp in 0..self.dirac.spinor_rank {
                let entry = mg.at(bp, *b as usize);
                if !entry.is_zero() {
                    out.add_term(legs.clone(), bp as u8, *key, &(&scale * entry) * s);
                }
            }
        }
        out
    }

    /// <G | t>_X for a rank-2 spin tensor: pair the form legs against G, the
    /// resulting algebra element multiplies the spinor part from the left.
    pub fn g_pair_spin(&self, t: &SpinTensor) -> SpinTensor {
        assert_eq!(t.rank, 2);
        let g = self.calc.line_element();
        let mut out = SpinTensor::zero(0);
        for ((legs, b, key), s) in t.terms.iter() {
            let pair = self
                .calc
                .inner_right(&g, &Tensor::basis(&[legs[0] as usize, legs[1] as usize]))
                .expect("rank 2");
            if pair.is_zero() {
                continue;
            }
            let mut x = SpinTensor::zero(0);
            x.add_term(Vec::new(), *b, *key, s.clone());
            out = out.add(&self.alg_mul_left(&pair, &x));
        }
        out
    }

    /// The second covariant derivative (nabla^G (x) 1 + 1 (x) nabla^X) nabla^X.
    pub fn second_derivative(&self, conn: &Connection, x: &SpinTensor) -> SpinTensor {
        let nx = self.spin_connection(x);
        let mut out = SpinTensor::zero(2);
        for ((legs, b, key), s) in nx.terms.iter() {
            let j = legs[0] as usize;
            let mut x1 = SpinTensor::zero(0);
            x1.add_term(Vec::new(), *b, *key, s.clone());
            // nabla^G (x) 1
            out = out.add(&self.graft(&conn.apply_right(&self.calc, &Tensor::basis1(j)), &x1));
            // 1 (x) nabla^X
            out = out.add(&self.graft(&Tensor::basis1(j), &self.spin_connection(&x1)));
        }
        out
    }

    /// Connection Laplacian of the spin connection relative to nabla^G.
    pub fn laplacian(&self, conn: &Connection, x: &SpinTensor) -> SpinTensor {
        let second = self.second_derivative(conn, x);
        self.apply_e_beta_m_g(&self.g_pair_spin(&second))
    }

    /// D^2 x - Laplacian x.
    pub fn weitzenbock_residue(&self, conn: &Connection, x: &SpinTensor) -> SpinTensor {
        let d2 = self.dirac_apply(&self.dirac_apply(x));
        d2.sub(&self.laplacian(conn, x))
    }

    /// Curvature of the spin connection (a left connection):
    /// (1 - junk) (x) 1 . (1 (x) nabla - d (x) 1) . nabla.
    pub fn spin_curvature(&self, x: &SpinTensor) -> SpinTensor {
        let nx = self.spin_connection(x);
        let mut acc = SpinTensor::zero(2);
        for ((legs, b, key), s) in nx.terms.iter() {
            let j = legs[0] as usize;
            let mut x1 = SpinTensor::zero(0);
            x1.add_term(Vec::new(), *b, *key, s.clone());
            acc = acc.add(&self.graft(&Tensor::basis1(j), &self.spin_connection(&x1)));
            acc = acc.sub(&self.graft(&self.calc.dw_mode(j), &x1));
        }
        self.co_junk_spin(&acc)
    }

    /// Left inner product on the spinor module, valued in the algebra.
    pub fn spin_inner_left(&self, x: &SpinTensor, y: &SpinTensor) -> AlgebraElement {
        assert_eq!(x.rank, 0);
        assert_eq!(y.rank, 0);
        let spec = self.calc.algebra;
        let mode = self.mode();
        let mut acc = AlgebraElement::zero();
        for ((_, b, k), s) in x.terms.iter() {
            for ((_, c, l), u) in y.terms.iter() {
                if b != c {
                    continue;
                }
                let f = AlgebraElement::from_term(*k, s.clone())
                    .commuted_before(spec, self.spin_degree(*b), mode);
                let g = AlgebraElement::from_term(*l, u.clone())
                    .commuted_before(spec, self.spin_degree(*c), mode);
                acc = acc.add(&f.mul(&g.star(spec, mode), spec, mode));
            }
        }
        acc
    }

    /// phi: the unit-coefficient state on the algebra.
    pub fn phi(&self, e: &AlgebraElement) -> Scalar {
        e.coeff_of(self.unit())
    }

    /// Hilbert-space pairing <x, y> = phi(left inner product).
    pub fn l2_pairing(&self, x: &SpinTensor, y: &SpinTensor) -> Scalar {
        self.phi(&self.spin_inner_left(x, y))
    }

    /// The one-form w_(0) . <x_(1) | y> from the Sweedler expansion of
    /// nabla^X(x); its nabla^G then pairs against G in the divergence term.
    pub fn sweedler_pair(&self, x: &SpinTensor, y: &SpinTensor) -> Tensor {
        let nx = self.spin_connection(x);
        let mut rho = Tensor::zero(1);
        for ((legs, b, key), s) in nx.terms.iter() {
            let mut x1 = SpinTensor::zero(0);
            x1.add_term(Vec::new(), *b, *key, s.clone());
            let v = self.spin_inner_left(&x1, y);
            if !v.is_zero() {
                let mut t = Tensor::zero(1);
                t.add_term(vec![legs[0]], v);
                rho = rho.add(&t);
            }
        }
        rho
    }

    /// The T^2-valued left pairing of two elements of Omega^1 (x) X.
    pub fn left_pair_x(&self, s: &SpinTensor, t: &SpinTensor) -> Tensor {
        assert_eq!(s.rank, 1);
        assert_eq!(t.rank, 1);
        let mut out = Tensor::zero(2);
        for ((l1, b, k), c1) in s.terms.iter() {
            for ((l2, bb, kk), c2) in t.terms.iter() {
                let mut x1 = SpinTensor::zero(0);
                x1.add_term(Vec::new(), *b, *k, c1.clone());
                let mut x2 = SpinTensor::zero(0);
                x2.add_term(Vec::new(), *bb, *kk, c2.clone());
                let v = self.spin_inner_left(&x1, &x2);
                if v.is_zero() {
                    continue;
                }
                let left = self.calc.scale_right(&Tensor::basis1(l1[0] as usize), &v);
                let contrib = self.calc.tensor_mul(&left, &self.calc.frame_dagger1(l2[0]));
                out = out.add(&contrib);
            }
        }
        out
    }

    /// Coordinate change for rank-0 spin tensors between classical and
    /// deformed storage (the twist between the spinor leg and its coefficient).
    pub fn spin0_to_deformed(&self, x: &SpinTensor) -> SpinTensor {
        assert_eq!(x.rank, 0);
        let mut out = SpinTensor::zero(0);
        for ((_, b, k), s) in x.terms.iter() {
            let ph = Scalar::lambda_pow(-self.spin_degree(*b).n2 * self.calc.algebra.degree(*k).n1);
            out.add_term(Vec::new(), *b, *k, s * &ph);
        }
        out
    }

    pub fn spin0_to_classical(&self, x: &SpinTensor) -> SpinTensor {
        assert_eq!(x.rank, 0);
        let mut out = SpinTensor::zero(0);
        for ((_, b, k), s) in x.terms.iter() {
            let ph = Scalar::lambda_pow(self.spin_degree(*b).n2 * self.calc.algebra.degree(*k).n1);
            out.add_term(Vec::new(), *b, *k, s * &ph);
        }
        out
    }

    /// Twist comparison map on a rank-1 spin tensor (split between the form
    /// leg and the spinor part).
    pub fn twist_spin1(&self, t: &SpinTensor) -> SpinTensor {
        assert_eq!(t.rank, 1);
        let mut out = SpinTensor::zero(1);
        for ((legs, b, k), s) in t.terms.iter() {
            let l = self.calc.leg_degree(legs[0]);
            let r = self.spin_part_degree(*b, *k);
            out.add_term(legs.clone(), *b, *k, s * &Scalar::lambda_pow(-l.n2 * r.n1));
        }
        out
    }

    pub fn twist_spin1_inv(&self, t: &SpinTensor) -> SpinTensor {
        assert_eq!(t.rank, 1);
        let mut out = SpinTensor::zero(1);
        for ((legs, b, k), s) in t.terms.iter() {
            let l = self.calc.leg_degree(legs[0]);
            let r = self.spin_part_degree(*b, *k);
            out.add_term(legs.clone(), *b, *k, s * &Scalar::lambda_pow(l.n2 * r.n1));
        }
        out
    }

    /// Threefold twist on a rank-2 spin tensor.
    pub fn twist3_spin(&self, t: &SpinTensor) -> SpinTensor {
        assert_eq!(t.rank, 2);
        let mut out = SpinTensor::zero(2);
        for ((legs, b, k), s) in t.terms.iter() {
            let a = self.calc.leg_degree(legs[0]);
            let bb = self.calc.leg_degree(legs[1]);
            let c = self.spin_part_degree(*b, *k);
            let exp = -a.n2 * (bb.n1 + c.n1) - bb.n2 * c.n1;
            out.add_term(legs.clone(), *b, *k, s * &Scalar::lambda_pow(exp));
        }
        out
    }

    pub fn twist3_spin_inv(&self, t: &SpinTensor) -> SpinTensor {
        assert_eq!(t.rank, 2);
        let mut out = SpinTensor::zero(2);
        for ((legs, b, k), s) in t.terms.iter() {
            let a = self.calc.leg_degree(legs[0]);
            let bb = self.calc.leg_degree(legs[1]);
            let c = self.spin_part_degree(*b, *k);
            let exp = a.n2 * (bb.n1 + c.n1) + bb.n2 * c.n1;
            out.add_term(legs.clone(), *b, *k, s * &Scalar::lambda_pow(exp));
        }
        out
    }

    /// Numeric evaluation of the worst coefficient at L = e^{2 pi i q}.
    pub fn max_abs_at(&self, x: &SpinTensor, q: &Rat) -> f64 {
        x.terms
            .values()
            .map(|s| s.eval(q).map(|c| c.norm()).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

/// Check that the degrees of the Clifford and spin tables are compatible with
/// the grading (used by the geometry validator).
pub fn degree_compatibility(dc: &DiracCalculus) -> Vec<String> {
    let mut bad = Vec::new();
    for j in 0..dc.calc.n() {
        let dj = dc.calc.leg_degree(j as u8);
        for b in 0..dc.dirac.spinor_rank {
            for a in 0..dc.dirac.spinor_rank {
                if !dc.dirac.gamma[j].at(b, a).is_zero()
                    && dj + dc.spin_degree(a as u8) != dc.spin_degree(b as u8)
                {
                    bad.push(format!("gamma[{j}][{b}][{a}] breaks the grading"));
                }
                if !dc.dirac.spin_table[j].at(b, a).is_zero()
                    && dj + dc.spin_degree(b as u8) != dc.spin_degree(a as u8)
                {
                    bad.push(format!("spin_table[{j}][{b}][{a}] breaks the grading"));
                }
            }
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometries::{builtin_sphere3, builtin_torus};
    use crate::levi_civita::solve_levi_civita;
    use crate::scalar::parse::parse_scalar;

    fn sc(s: &str) -> Scalar {
        parse_scalar(s).unwrap()
    }

    #[test]
    fn torus_dirac_symbol_on_monomials() {
        let geo = builtin_torus();
        let dc = geo.dirac_calculus(Mode::Classical);
        // D(x_a . U) acts by i gamma_1 on the spinor part
        let mut x = SpinTensor::zero(0);
        x.add_term(Vec::new(), 0, BasisKey::Mono(1, 0), Scalar::one());
        let d = dc.dirac_apply(&x);
        let mut expect = SpinTensor::zero(0);
        // i * gamma_1 = i * (-i sigma_1) = sigma_1: moves index 0 to 1
        expect.add_term(Vec::new(), 1, BasisKey::Mono(1, 0), Scalar::one());
        assert_eq!(d, expect);
        // constants are harmonic
        let c = SpinTensor::basis_spinor(0, BasisKey::Mono(0, 0));
        assert!(dc.dirac_apply(&c).is_zero());
        // D^2 is the flat symbol m^2 + n^2
        let mut y = SpinTensor::zero(0);
        y.add_term(Vec::new(), 1, BasisKey::Mono(2, -1), sc("1/2"));
        let d2 = dc.dirac_apply(&dc.dirac_apply(&y));
        assert_eq!(d2, y.scalar_mul(&Scalar::from_int(5)));
    }

    #[test]
    fn sphere_dirac_constants_have_eigenvalue_three_halves() {
        let geo = builtin_sphere3();
        for mode in [Mode::Classical, Mode::Deformed] {
            let dc = geo.dirac_calculus(mode);
            for a in 0..2 {
                let x = SpinTensor::basis_spinor(a, BasisKey::Mono(0, 0));
                assert_eq!(dc.dirac_apply(&x), x.scalar_mul(&sc("3/2")), "{mode}");
            }
        }
    }

    #[test]
    fn clifford_of_zero_vanishes() {
        let geo = builtin_torus();
        let dc = geo.dirac_calculus(Mode::Classical);
        let x = SpinTensor::basis_spinor(0, BasisKey::Mono(0, 0));
        assert!(dc.clifford(&Tensor::zero(1), &x).is_zero());
    }

    #[test]
    fn laplacian_of_constants_vanishes_on_the_torus() {
        let geo = builtin_torus();
        let calc = geo.calculus(Mode::Classical);
        let dc = geo.dirac_calculus(Mode::Classical);
        let conn = solve_levi_civita(&calc).unwrap();
        let x = SpinTensor::basis_spinor(1, BasisKey::Mono(0, 0));
        assert!(dc.laplacian(&conn, &x).is_zero());
    }

    #[test]
    fn sphere_residue_is_r_over_four() {
        let geo = builtin_sphere3();
        let calc = geo.calculus(Mode::Classical);
        let dc = geo.dirac_calculus(Mode::Classical);
        let conn = solve_levi_civita(&calc).unwrap();
        let x = SpinTensor::basis_spinor(0, BasisKey::Mono(0, 0));
        let res = dc.weitzenbock_residue(&conn, &x);
        assert_eq!(res, x.scalar_mul(&sc("3/2")));
        // independent route through the spin curvature
        let rhs = dc.clifford_of_braided_pair(&dc.spin_curvature(&x));
        assert_eq!(res, rhs);
    }

    #[test]
    fn divergence_of_torus_monomials_vanishes_with_flat_energy() {
        let geo = builtin_torus();
        let calc = geo.calculus(Mode::Classical);
        let dc = geo.dirac_calculus(Mode::Classical);
        let conn = solve_levi_civita(&calc).unwrap();
        let mut x = SpinTensor::zero(0);
        x.add_term(Vec::new(), 0, BasisKey::Mono(2, 1), Scalar::one());
        let rho = dc.sweedler_pair(&x, &x);
        let g = calc.line_element();
        let div = dc.phi(&calc.inner_left(&conn.apply_right(&calc, &rho), &g).unwrap());
        assert!(div.is_zero());
        // phi(<Lap x, x>) = m^2 + n^2 = 5
        let lhs = dc.phi(&dc.spin_inner_left(&dc.laplacian(&conn, &x), &x));
        assert_eq!(lhs, Scalar::from_int(5));
    }
}
