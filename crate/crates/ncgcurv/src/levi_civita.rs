//! Construction of the Grassmann connection, the tensor W, the concordance
//! check, the exact per-block solve for the connection form A, and the
//! Hermitian / torsion-free / braided-bimodule postconditions.

use crate::algebra::{CheckOutcome, Mode};
use crate::blocks::{
    accumulate_block, apply_to_elements, block_operators, blocks_for_degrees, frame_degrees_of,
    tensor_block_vector, BlockOperators,
};
use crate::forms::{Calculus, Tensor};
use crate::matrix::{Matrix, MatrixError};
use crate::par::maybe_par_map;
use crate::scalar::Scalar;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("singular block matrix at degree {0}")]
    SingularBlock(String),
    #[error("geometry is not dagger-concordant: difference tensor is nonzero")]
    NotConcordant,
    #[error("solved connection failed postcondition {name}: {witness}")]
    Postcondition { name: String, witness: String },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Chirality {
    Right,
    Left,
}

/// A connection on the one-form module: the Grassmann part (implicit in the
/// frame) plus the connection-form three-tensor A. Left-handed connections
/// act through conjugation by the dagger.
#[derive(Clone, PartialEq, Debug)]
pub struct Connection {
    pub chirality: Chirality,
    pub mode: Mode,
    pub a_form: Tensor,
    /// Dimension of the Im(P) ∩ Im(Q) ambiguity space on each solved block.
    pub pi_dims: BTreeMap<String, usize>,
}

impl Connection {
    pub fn grassmann(mode: Mode) -> Self {
        Connection {
            chirality: Chirality::Right,
            mode,
            a_form: Tensor::zero(3),
            pi_dims: BTreeMap::new(),
        }
    }

    pub fn conjugate(&self) -> Connection {
        let mut c = self.clone();
        c.chirality = match self.chirality {
            Chirality::Right => Chirality::Left,
            Chirality::Left => Chirality::Right,
        };
        c
    }

    /// Action in the connection's own chirality.
    pub fn apply(&self, calc: &Calculus, rho: &Tensor) -> Tensor {
        match self.chirality {
            Chirality::Right => self.apply_right(calc, rho),
            Chirality::Left => self.apply_left(calc, rho),
        }
    }

    /// Right action: Grassmann part plus the contraction against A.
    pub fn apply_right(&self, calc: &Calculus, rho: &Tensor) -> Tensor {
        let mut out = grassmann_apply(calc, rho);
        if !self.a_form.is_zero() {
            out = out.add(&calc.alpha_right(&self.a_form, rho).expect("rank"));
        }
        out
    }

    /// Conjugate left action: -dagger . right action . dagger.
    pub fn apply_left(&self, calc: &Calculus, rho: &Tensor) -> Tensor {
        calc.dagger(&self.apply_right(calc, &calc.dagger(rho))).neg()
    }
}

/// Grassmann connection of the orthonormal frame: w_j a_j -> w_j (x) d(a_j).
pub fn grassmann_apply(calc: &Calculus, rho: &Tensor) -> Tensor {
    assert_eq!(rho.rank(), 1, "the Grassmann connection acts on one-forms");
    let mut out = Tensor::zero(2);
    for (idx, a) in rho.terms() {
        let da = calc.derivative_tensor(a);
        if !da.is_zero() {
            out = out.add(&calc.tensor_mul(&Tensor::basis(&[idx[0] as usize]), &da));
        }
    }
    out
}

/// W = d(w_j) (x) w_j^dag and W^dag = w_j (x) d(w_j^dag), in the current mode.
pub fn w_tensor(calc: &Calculus) -> (Tensor, Tensor) {
    let mut w = Tensor::zero(3);
    let mut wdag = Tensor::zero(3);
    for j in 0..calc.n() {
        let dj = calc.dw_mode(j);
        let fd = calc.frame_dagger1(j as u8);
        w = w.add(&calc.tensor_mul(&dj, &fd));
        let dfd = calc.exterior_d(&fd).expect("rank 1");
        wdag = wdag.add(&calc.tensor_mul(&Tensor::basis1(j), &dfd));
    }
    (w, wdag)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcordanceReport {
    pub concordant: bool,
    pub decomposition_ok: bool,
    pub pi_dims: BTreeMap<String, usize>,
    /// Stringified difference tensor when nonzero.
    pub difference: Option<String>,
}

struct SolvedBlock {
    ops: BlockOperators,
    a_vec: Vec<crate::algebra::AlgebraElement>,
    diff_vec: Vec<crate::algebra::AlgebraElement>,
}

fn solve_blocks(calc: &Calculus) -> Result<Vec<SolvedBlock>, SolveError> {
    let (w, wdag) = w_tensor(calc);
    let mut degrees = frame_degrees_of(calc, &w);
    for d in frame_degrees_of(calc, &wdag) {
        if !degrees.contains(&d) {
            degrees.push(d);
        }
    }
    degrees.sort();
    let blocks = blocks_for_degrees(calc, &degrees);
    maybe_par_map(blocks, |block| -> Result<SolvedBlock, SolveError> {
        let degree = block.degree;
        let ops = block_operators(calc, block)?;
        let d = ops.block.dim();
        let w_v = tensor_block_vector(&w, &ops.block);
        let wd_v = tensor_block_vector(&wdag, &ops.block);
        let one = Matrix::identity(d);
        let m1 = one.add(&ops.pi).sub(&ops.p.mul(&ops.q));
        let m2 = one.add(&ops.pi).sub(&ops.q.mul(&ops.p));
        // rhs1 = W + P W^dag, rhs2 = W^dag + Q W
        let rhs1: Vec<_> = {
            let pwd = apply_to_elements(&ops.p, &wd_v);
            w_v.iter().zip(pwd.iter()).map(|(a, b)| a.add(b)).collect()
        };
        let rhs2: Vec<_> = {
            let qw = apply_to_elements(&ops.q, &w_v);
            wd_v.iter().zip(qw.iter()).map(|(a, b)| a.add(b)).collect()
        };
        let x1 = m1
            .solve(&rhs1)
            .map_err(|_| SolveError::SingularBlock(degree.to_string()))?;
        let x2 = m2
            .solve(&rhs2)
            .map_err(|_| SolveError::SingularBlock(degree.to_string()))?;
        let a_vec: Vec<_> = x1.iter().map(|e| e.neg()).collect();
        let diff_vec: Vec<_> = x1.iter().zip(x2.iter()).map(|(a, b)| a.sub(b)).collect();
        Ok(SolvedBlock { ops, a_vec, diff_vec })
    })
    .into_iter()
    .collect()
}

/// Evaluate both sides of the concordance condition by exact block solves.
pub fn concordance_check(calc: &Calculus) -> Result<ConcordanceReport, SolveError> {
    let solved = solve_blocks(calc)?;
    let mut diff = Tensor::zero(3);
    let mut pi_dims = BTreeMap::new();
    let mut decomposition_ok = true;
    for sb in &solved {
        accumulate_block(&mut diff, &sb.ops.block, &sb.diff_vec);
        pi_dims.insert(sb.ops.block.degree.to_string(), sb.ops.pi_dim);
        decomposition_ok &= sb.ops.decomposition_ok;
    }
    Ok(ConcordanceReport {
        concordant: diff.is_zero(),
        decomposition_ok,
        pi_dims,
        difference: if diff.is_zero() {
            None
        } else {
            Some(crate::forms::display_tensor(&diff, calc.algebra))
        },
    })
}

/// Solve for the Levi-Civita connection. Postconditions are hard checks.
pub fn solve_levi_civita(calc: &Calculus) -> Result<Connection, SolveError> {
    solve_levi_civita_with_pi(calc, None)
}

/// Variant allowing a user-supplied Im(P) ∩ Im(Q) component; the extra tensor
/// is projected onto the intersection before being added to A.
pub fn solve_levi_civita_with_pi(
    calc: &Calculus,
    pi_component: Option<&Tensor>,
) -> Result<Connection, SolveError> {
    let solved = solve_blocks(calc)?;
    let mut a = Tensor::zero(3);
    let mut pi_dims = BTreeMap::new();
    let mut concordant = true;
    for sb in &solved {
        concordant &= sb.diff_vec.iter().all(|e| e.is_zero());
        accumulate_block(&mut a, &sb.ops.block, &sb.a_vec);
        pi_dims.insert(sb.ops.block.degree.to_string(), sb.ops.pi_dim);
    }
    if !concordant {
        return Err(SolveError::NotConcordant);
    }
    if let Some(extra) = pi_component {
        // project the supplied tensor onto Im(P) ∩ Im(Q), block by block
        let degrees = frame_degrees_of(calc, extra);
        for block in blocks_for_degrees(calc, &degrees) {
            let ops = block_operators(calc, block)?;
            let v = tensor_block_vector(extra, &ops.block);
            let proj = apply_to_elements(&ops.pi, &v);
            accumulate_block(&mut a, &ops.block, &proj);
        }
    }
    let conn = Connection {
        chirality: Chirality::Right,
        mode: calc.mode,
        a_form: a,
        pi_dims,
    };
    let checks = check_postconditions(calc, &conn);
    if let Some(bad) = checks.iter().find(|c| !c.passed) {
        return Err(SolveError::Postcondition {
            name: bad.name.clone(),
            witness: bad.witness.clone().unwrap_or_default(),
        });
    }
    Ok(conn)
}

/// The three defining postconditions plus the concordance difference.
pub fn check_postconditions(calc: &Calculus, conn: &Connection) -> Vec<CheckOutcome> {
    let mut out = Vec::new();

    // Hermitian pair: sum_j grad(w_j) (x) w_j^dag + w_j (x) grad_left(w_j^dag) = 0
    let mut herm = Tensor::zero(3);
    for j in 0..calc.n() {
        let wj = Tensor::basis1(j);
        let fd = calc.frame_dagger1(j as u8);
        herm = herm.add(&calc.tensor_mul(&conn.apply_right(calc, &wj), &fd));
        herm = herm.add(&calc.tensor_mul(&wj, &conn.apply_left(calc, &fd)));
    }
    out.push(if herm.is_zero() {
        CheckOutcome::pass("hermitian")
    } else {
        CheckOutcome::fail("hermitian", crate::forms::display_tensor(&herm, calc.algebra))
    });

    // Torsion-free: (1 - junk) . grad = -d on the frame and on coefficient samples
    let mut tf_ok = true;
    let mut tf_witness = String::new();
    let mut samples: Vec<Tensor> = (0..calc.n()).map(Tensor::basis1).collect();
    let mut rng = <rand::rngs::StdRng as rand::SeedableRng>::seed_from_u64(0xC0FFEE);
    for _ in 0..8 {
        samples.push(crate::verify::sample_tensor(calc, 1, &mut rng, 2));
    }
    for rho in &samples {
        let lhs = calc.co_junk_at(&conn.apply_right(calc, rho), 0);
        let rhs = calc.exterior_d(rho).expect("rank 1").neg();
        if lhs != rhs {
            tf_ok = false;
            tf_witness = crate::forms::display_tensor(&lhs.sub(&rhs), calc.algebra);
            break;
        }
    }
    out.push(if tf_ok {
        CheckOutcome::pass("torsion-free")
    } else {
        CheckOutcome::fail("torsion-free", tf_witness)
    });

    // Braided bimodule: sigma . grad_right = grad_left
    let mut bi_ok = true;
    let mut bi_witness = String::new();
    for rho in &samples {
        let lhs = calc.sigma(&conn.apply_right(calc, rho)).expect("rank 2");
        let rhs = conn.apply_left(calc, rho);
        if lhs != rhs {
            bi_ok = false;
            bi_witness = crate::forms::display_tensor(&lhs.sub(&rhs), calc.algebra);
            break;
        }
    }
    out.push(if bi_ok {
        CheckOutcome::pass("sigma-bimodule")
    } else {
        CheckOutcome::fail("sigma-bimodule", bi_witness)
    });

    out
}

/// Left torsion: (1 - junk) . grad_left = +d on samples (sign flip through
/// the dagger).
pub fn check_left_torsion(calc: &Calculus, conn: &Connection) -> CheckOutcome {
    let mut rng = <rand::rngs::StdRng as rand::SeedableRng>::seed_from_u64(0xBEEF);
    let mut samples: Vec<Tensor> = (0..calc.n()).map(Tensor::basis1).collect();
    for _ in 0..8 {
        samples.push(crate::verify::sample_tensor(calc, 1, &mut rng, 2));
    }
    for rho in &samples {
        let lhs = calc.co_junk_at(&conn.apply_left(calc, rho), 0);
        let rhs = calc.exterior_d(rho).expect("rank 1");
        if lhs != rhs {
            return CheckOutcome::fail(
                "left-torsion",
                crate::forms::display_tensor(&lhs.sub(&rhs), calc.algebra),
            );
        }
    }
    CheckOutcome::pass("left-torsion")
}

/// Scale helper used by sabotage fixtures: A -> A + eps * t.
pub fn perturb_connection(conn: &Connection, t: &Tensor, eps: &Scalar) -> Connection {
    let mut c = conn.clone();
    c.a_form = c.a_form.add(&t.scalar_mul(eps));
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraElement, BasisKey};
    use crate::forms::Tensor;
    use crate::geometries::{builtin_sphere3, builtin_torus};
    use crate::scalar::parse::parse_scalar;

    #[test]
    fn torus_connection_form_vanishes() {
        let geo = builtin_torus();
        for mode in [Mode::Classical, Mode::Deformed] {
            let calc = geo.calculus(mode);
            let (w, wdag) = w_tensor(&calc);
            assert!(w.is_zero());
            assert!(wdag.is_zero());
            let conn = solve_levi_civita(&calc).unwrap();
            assert!(conn.a_form.is_zero());
            // grassmann action on a coefficient-bearing one-form
            let mut rho = Tensor::zero(1);
            rho.add_term(vec![0], AlgebraElement::from_key(BasisKey::Mono(1, 0)));
            let out = conn.apply_right(&calc, &rho);
            let mut expect = Tensor::zero(2);
            expect.add_term(
                vec![0, 0],
                AlgebraElement::from_term(BasisKey::Mono(1, 0), parse_scalar("i").unwrap()),
            );
            assert_eq!(out, expect);
        }
    }

    #[test]
    fn grassmann_of_frame_elements_vanishes() {
        let geo = builtin_sphere3();
        let calc = geo.calculus(Mode::Classical);
        for j in 0..3 {
            assert!(grassmann_apply(&calc, &Tensor::basis1(j)).is_zero());
        }
    }

    #[test]
    fn sphere_w_tensor_matches_its_dagger() {
        let geo = builtin_sphere3();
        for mode in [Mode::Classical, Mode::Deformed] {
            let calc = geo.calculus(mode);
            let (w, wdag) = w_tensor(&calc);
            assert!(!w.is_zero());
            assert_eq!(calc.dagger(&w), wdag, "{mode}");
            // every term of W has total degree zero and constant coefficients
            for (idx, e) in w.terms() {
                for (k, _) in e.terms() {
                    assert!(calc.term_degree(idx, *k).is_zero());
                }
            }
        }
    }

    #[test]
    fn sphere_connection_action_on_the_neutral_leg() {
        let geo = builtin_sphere3();
        let calc = geo.calculus(Mode::Classical);
        let conn = solve_levi_civita(&calc).unwrap();
        // nabla(e3) = -i (f+ (x) f- - f- (x) f+), the invariant-frame value
        let out = conn.apply_right(&calc, &Tensor::basis1(2));
        let mut expect = Tensor::zero(2);
        expect.add_term(
            vec![0, 1],
            AlgebraElement::from_term(BasisKey::Mono(0, 0), parse_scalar("-i").unwrap()),
        );
        expect.add_term(
            vec![1, 0],
            AlgebraElement::from_term(BasisKey::Mono(0, 0), parse_scalar("i").unwrap()),
        );
        assert_eq!(out, expect);
    }

    #[test]
    fn conjugate_is_an_involution() {
        let geo = builtin_sphere3();
        let calc = geo.calculus(Mode::Classical);
        let conn = solve_levi_civita(&calc).unwrap();
        assert_eq!(conn.conjugate().conjugate(), conn);
        assert_eq!(conn.conjugate().chirality, Chirality::Left);
    }

    #[test]
    fn left_torsion_sign_flips() {
        let geo = builtin_sphere3();
        let calc = geo.calculus(Mode::Classical);
        let conn = solve_levi_civita(&calc).unwrap();
        assert!(check_left_torsion(&calc, &conn).passed);
    }
}
