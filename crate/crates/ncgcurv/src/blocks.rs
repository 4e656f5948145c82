//! Per-degree block machinery on three-tensors: the projections P = junk (x) 1
//! and Q = 1 (x) junk as exact matrices, the intersection projector, and
//! helpers to move between tensors and block vectors.

use crate::algebra::{AlgebraElement, BasisKey, Degree};
use crate::forms::{Calculus, Tensor};
use crate::matrix::{Matrix, MatrixError};
use crate::scalar::Scalar;
use std::collections::BTreeMap;

/// The frame multi-indices of one total-degree block of T^3.
#[derive(Clone, Debug)]
pub struct Block {
    pub degree: Degree,
    pub indices: Vec<Vec<u8>>,
    pos: BTreeMap<Vec<u8>, usize>,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn position(&self, idx: &[u8]) -> Option<usize> {
        self.pos.get(idx).copied()
    }
}

/// Enumerate the rank-3 blocks for the given degrees (all triples of frame
/// indices grouped by total degree).
pub fn blocks_for_degrees(calc: &Calculus, degrees: &[Degree]) -> Vec<Block> {
    let n = calc.n();
    let mut by_degree: BTreeMap<Degree, Vec<Vec<u8>>> = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let idx = vec![a as u8, b as u8, c as u8];
                let d = calc.idx_degree(&idx);
                by_degree.entry(d).or_default().push(idx);
            }
        }
    }
    degrees
        .iter()
        .filter_map(|d| {
            by_degree.get(d).map(|indices| Block {
                degree: *d,
                indices: indices.clone(),
                pos: indices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect(),
            })
        })
        .collect()
}

/// Degrees met by the terms of a rank-3 tensor (frame part only: the
/// projections are module maps, so coefficients ride along).
pub fn frame_degrees_of(calc: &Calculus, t: &Tensor) -> Vec<Degree> {
    let mut set = std::collections::BTreeSet::new();
    for (idx, _) in t.terms() {
        set.insert(calc.idx_degree(idx));
    }
    set.into_iter().collect()
}

fn unit_scalar_of(e: &AlgebraElement) -> Scalar {
    let mut s = Scalar::zero();
    for (k, c) in e.terms() {
        assert!(matches!(k, BasisKey::Mono(0, 0)) || c.is_zero(), "expected a scalar coefficient");
        s = &s + c;
    }
    s
}

/// Matrix of a frame-level operator on the block, computed by applying it to
/// basis tensors. The operator must be a right-module map with scalar matrix
/// coefficients (which the braiding-built projections are).
pub fn operator_matrix(block: &Block, f: impl Fn(&Tensor) -> Tensor) -> Matrix {
    let d = block.dim();
    let mut m = Matrix::zero(d, d);
    for (col, idx) in block.indices.iter().enumerate() {
        let t = Tensor::basis(&idx.iter().map(|&x| x as usize).collect::<Vec<_>>());
        let ft = f(&t);
        for (oidx, e) in ft.terms() {
            let row = block
                .position(oidx)
                .expect("operator must preserve the degree block");
            *m.at_mut(row, col) = unit_scalar_of(e);
        }
    }
    m
}

/// P = junk (x) 1 on the block.
pub fn p_matrix(calc: &Calculus, block: &Block) -> Matrix {
    operator_matrix(block, |t| calc.junk_at(t, 0))
}

/// Q = 1 (x) junk on the block.
pub fn q_matrix(calc: &Calculus, block: &Block) -> Matrix {
    operator_matrix(block, |t| calc.junk_at(t, 1))
}

/// Data of one block needed by the connection solver and the reports.
pub struct BlockOperators {
    pub block: Block,
    pub p: Matrix,
    pub q: Matrix,
    pub pi: Matrix,
    pub pi_dim: usize,
    /// dim ker(2 - P - Q) + rank [1-P | 1-Q] == dim, the direct-sum check.
    pub decomposition_ok: bool,
}

pub fn block_operators(calc: &Calculus, block: Block) -> Result<BlockOperators, MatrixError> {
    let p = p_matrix(calc, &block);
    let q = q_matrix(calc, &block);
    let d = block.dim();
    let two = Matrix::identity(d).scale(&Scalar::from_int(2));
    let m = two.sub(&p).sub(&q);
    let kernel = m.kernel();
    let pi_dim = kernel.len();
    let pi = Matrix::projector_onto_span(&kernel, d)?;
    // span of the columns of (1-P) and (1-Q)
    let one = Matrix::identity(d);
    let omp = one.sub(&p);
    let omq = one.sub(&q);
    let mut cols = Matrix::zero(d, 2 * d);
    for r in 0..d {
        for c in 0..d {
            *cols.at_mut(r, c) = omp.at(r, c).clone();
            *cols.at_mut(r, d + c) = omq.at(r, c).clone();
        }
    }
    let complement_rank = cols.rank();
    let decomposition_ok = pi_dim + complement_rank == d;
    Ok(BlockOperators { block, p, q, pi, pi_dim, decomposition_ok })
}

/// Extract the block's coefficient vector from a rank-3 tensor.
pub fn tensor_block_vector(t: &Tensor, block: &Block) -> Vec<AlgebraElement> {
    let mut v = vec![AlgebraElement::zero(); block.dim()];
    for (idx, e) in t.terms() {
        if let Some(p) = block.position(idx) {
            v[p] = e.clone();
        }
    }
    v
}

/// Apply a scalar matrix to a vector of algebra elements.
pub fn apply_to_elements(m: &Matrix, v: &[AlgebraElement]) -> Vec<AlgebraElement> {
    assert_eq!(m.cols, v.len());
    (0..m.rows)
        .map(|r| {
            let mut acc = AlgebraElement::zero();
            for c in 0..m.cols {
                if !v[c].is_zero() && !m.at(r, c).is_zero() {
                    acc = acc.add(&v[c].scale(m.at(r, c)));
                }
            }
            acc
        })
        .collect()
}

/// Write a block vector back into a rank-3 tensor.
pub fn accumulate_block(t: &mut Tensor, block: &Block, v: &[AlgebraElement]) {
    for (i, e) in v.iter().enumerate() {
        if !e.is_zero() {
            t.add_term(block.indices[i].clone(), e.clone());
        }
    }
}

impl crate::matrix::LinearValue for AlgebraElement {
    fn scaled(&self, k: &Scalar) -> Self {
        self.scale(k)
    }
    fn sub_val(&self, o: &Self) -> Self {
        self.sub(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraSpec, Derivation, Mode};
    use crate::forms::FrameSpec;
    use crate::scalar::rat_frac;

    fn flat2() -> (AlgebraSpec, FrameSpec, Derivation) {
        let star = Matrix::from_fn(2, 2, |r, c| {
            if r == c {
                -&Scalar::one()
            } else {
                Scalar::zero()
            }
        });
        (
            AlgebraSpec::TrivialConstants,
            FrameSpec {
                size: 2,
                degrees: vec![Degree::ZERO, Degree::ZERO],
                star,
                dw: vec![Tensor::zero(2), Tensor::zero(2)],
            },
            Derivation::zero(),
        )
    }

    #[test]
    fn classical_flip_intersection_is_the_symmetrizer() {
        let (alg, frame, deriv) = flat2();
        let calc = Calculus::new(&alg, &frame, &deriv, Mode::Classical);
        let blocks = blocks_for_degrees(&calc, &[Degree::ZERO]);
        assert_eq!(blocks.len(), 1);
        let ops = block_operators(&calc, blocks.into_iter().next().unwrap()).unwrap();
        assert_eq!(ops.block.dim(), 8);
        // the totally symmetric subspace of (C^2)^{(x)3} has dimension 4
        assert_eq!(ops.pi_dim, 4);
        assert!(ops.decomposition_ok);
        // Pi equals the brute-force symmetrizer: average over the 6 leg permutations
        let perms: [[usize; 3]; 6] =
            [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut sym = Matrix::zero(8, 8);
        for (col, idx) in ops.block.indices.iter().enumerate() {
            for p in perms {
                let permuted: Vec<u8> = vec![idx[p[0]], idx[p[1]], idx[p[2]]];
                let row = ops.block.position(&permuted).unwrap();
                *sym.at_mut(row, col) =
                    sym.at(row, col) + &Scalar::from_rat(rat_frac(1, 6));
            }
        }
        assert_eq!(ops.pi, sym);
        // projector identities
        assert_eq!(ops.pi.mul(&ops.pi), ops.pi);
        assert_eq!(ops.pi.mul(&ops.p), ops.pi);
        assert_eq!(ops.p.mul(&ops.pi), ops.pi);
        assert_eq!(ops.pi.mul(&ops.q), ops.pi);
        assert_eq!(ops.q.mul(&ops.pi), ops.pi);
        // P, Q idempotent and self-adjoint
        assert_eq!(ops.p.mul(&ops.p), ops.p);
        assert_eq!(ops.q.mul(&ops.q), ops.q);
        assert_eq!(ops.p.adjoint(), ops.p);
        assert_eq!(ops.q.adjoint(), ops.q);
    }
}
