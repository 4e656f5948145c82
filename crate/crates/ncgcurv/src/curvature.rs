//! Full Riemann curvature via the frame formula, Ricci via contraction with
//! the line element, and scalar curvature via a second contraction.

use crate::algebra::AlgebraElement;
use crate::forms::{Calculus, FormsError, Tensor};
use crate::levi_civita::{Chirality, Connection};
use crate::scalar::Scalar;

/// Curvature of a connection on the one-form module, stored through its
/// values on the frame: outputs[j] = R(w_j), a rank-3 tensor whose middle two
/// legs form the two-form representative in Im(1 - junk).
#[derive(Clone, PartialEq, Debug)]
pub struct CurvatureTensor {
    pub chirality: Chirality,
    pub outputs: Vec<Tensor>,
}

impl CurvatureTensor {
    /// Right-module endomorphism extension: R(w_j . a) = R(w_j) . a.
    pub fn apply(&self, calc: &Calculus, rho: &Tensor) -> Tensor {
        assert_eq!(rho.rank(), 1);
        let mut out = Tensor::zero(3);
        for (idx, a) in rho.terms() {
            out = out.add(&calc.scale_right(&self.outputs[idx[0] as usize], a));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.outputs.iter().all(|t| t.is_zero())
    }
}

/// Curvature of a right connection by the frame formula: the Grassmann
/// contribution vanishes for orthonormal frames with constant inner products,
/// leaving the wedge and differential terms of the connection form.
pub fn riemann(calc: &Calculus, conn: &Connection) -> CurvatureTensor {
    assert_eq!(conn.chirality, Chirality::Right, "frame formula is for right connections");
    let n = calc.n();
    let nabla: Vec<Tensor> = (0..n).map(|k| conn.apply_right(calc, &Tensor::basis1(k))).collect();
    let outputs = (0..n)
        .map(|i| {
            let mut acc = Tensor::zero(3);
            for k in 0..n {
                // A^i_k = the w_k component of nabla(w_i)
                let a_ik = nabla[i].strip_first_leg(k);
                if a_ik.is_zero() {
                    continue;
                }
                acc = acc.add(&calc.tensor_mul(&nabla[k], &a_ik));
                let d_aik = calc.exterior_d(&a_ik).expect("rank 1");
                acc = acc.add(&calc.tensor_mul(&Tensor::basis1(k), &d_aik));
            }
            calc.co_junk_at(&acc, 1)
        })
        .collect();
    CurvatureTensor { chirality: Chirality::Right, outputs }
}

/// Independent route: the covariant-square definition
/// R(x) = 1 (x) (1 - junk) . (nabla (x) 1 + 1 (x) d) . nabla(x).
pub fn riemann_right_by_definition(calc: &Calculus, conn: &Connection, x: &Tensor) -> Tensor {
    assert_eq!(x.rank(), 1);
    let s = conn.apply_right(calc, x);
    let mut acc = Tensor::zero(3);
    for (idx, a) in s.terms() {
        let first = idx[0] as usize;
        let mut tail = Tensor::zero(1);
        tail.add_term(vec![idx[1]], a.clone());
        // (nabla (x) 1)
        acc = acc.add(&calc.tensor_mul(&conn.apply_right(calc, &Tensor::basis1(first)), &tail));
        // (1 (x) d)
        acc = acc.add(&calc.tensor_mul(
            &Tensor::basis1(first),
            &calc.exterior_d(&tail).expect("rank 1"),
        ));
    }
    calc.co_junk_at(&acc, 1)
}

/// Left-connection curvature by its definition:
/// R(x) = (1 - junk) (x) 1 . (1 (x) nabla_left - d (x) 1) . nabla_left(x).
pub fn riemann_left_apply(calc: &Calculus, conn: &Connection, x: &Tensor) -> Tensor {
    assert_eq!(x.rank(), 1);
    let left = |rho: &Tensor| match conn.chirality {
        Chirality::Left => conn.apply(calc, rho),
        Chirality::Right => conn.apply_left(calc, rho),
    };
    let s = left(x);
    let mut acc = Tensor::zero(3);
    for (idx, a) in s.terms() {
        let first = idx[0] as usize;
        let mut tail = Tensor::zero(1);
        tail.add_term(vec![idx[1]], a.clone());
        // 1 (x) nabla_left
        acc = acc.add(&calc.tensor_mul(&Tensor::basis1(first), &left(&tail)));
        // - d (x) 1
        acc = acc.sub(&calc.tensor_mul(&calc.dw_mode(first), &tail));
    }
    calc.co_junk_at(&acc, 0)
}

/// Ricci contraction: expand R over the frame, re-expand the half-sized
/// two-form representative to wedge coefficients, and pair the trailing two
/// legs against the line element with the worked manifold computation's sign.
pub fn ricci(calc: &Calculus, r: &CurvatureTensor) -> Result<Tensor, FormsError> {
    let g = calc.line_element();
    let minus_two = Scalar::from_int(-2);
    let mut ric = Tensor::zero(2);
    for j in 0..calc.n() {
        let t4 = calc.tensor_mul(&r.outputs[j], &calc.frame_dagger1(j as u8));
        for (idx, e) in t4.terms() {
            let mut tail = Tensor::zero(2);
            tail.add_term(vec![idx[2], idx[3]], e.clone());
            let v = calc.inner_right(&g, &tail)?;
            if !v.is_zero() {
                ric.add_term(vec![idx[0], idx[1]], v.scale(&minus_two));
            }
        }
    }
    Ok(ric)
}

/// r = <G | Ric>_B.
pub fn scalar_curvature(calc: &Calculus, ric: &Tensor) -> Result<AlgebraElement, FormsError> {
    calc.inner_right(&calc.line_element(), ric)
}

/// Rank-4 expansion table R_{ijkl} for constant-coefficient geometries:
/// R(w_l) = sum 1/2 R_{ijkl} w_k (x) (w_i (x) w_j - w_j (x) w_i), i.e. the
/// wedge coefficients with the endomorphism legs (k, l) split off.
/// Returns None when some coefficient is not a scalar multiple of the unit.
pub fn rank4_table(calc: &Calculus, r: &CurvatureTensor) -> Option<Vec<Vec<Vec<Vec<Scalar>>>>> {
    let n = calc.n();
    let mut table = vec![vec![vec![vec![Scalar::zero(); n]; n]; n]; n];
    let two = Scalar::from_int(2);
    for (l, out) in r.outputs.iter().enumerate() {
        for (idx, e) in out.terms() {
            let (k, i, j) = (idx[0] as usize, idx[1] as usize, idx[2] as usize);
            let mut s = Scalar::zero();
            for (key, c) in e.terms() {
                if *key != calc.algebra.unit_key() {
                    return None;
                }
                s = &s + c;
            }
            table[i][j][k][l] = &s * &two;
        }
    }
    Some(table)
}

/// Brute-force double contraction of the rank-4 table: sum_{i,j} R_{ijij}.
/// An independent oracle for the scalar curvature of constant-coefficient
/// geometries presented in a frame with real pairing (see the acceptance
/// suite for the complex-frame change of basis).
pub fn double_contraction_oracle(table: &[Vec<Vec<Vec<Scalar>>>]) -> Scalar {
    let n = table.len();
    let mut acc = Scalar::zero();
    for i in 0..n {
        for j in 0..n {
            acc = &acc + &table[i][j][i][j];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Mode;
    use crate::geometries::{builtin_sphere3, builtin_torus};
    use crate::levi_civita::solve_levi_civita;

    #[test]
    fn torus_curvature_chain_vanishes() {
        let geo = builtin_torus();
        let calc = geo.calculus(Mode::Classical);
        let conn = solve_levi_civita(&calc).unwrap();
        let r = riemann(&calc, &conn);
        assert!(r.is_zero());
        let ric = ricci(&calc, &r).unwrap();
        assert!(ric.is_zero());
        assert!(scalar_curvature(&calc, &ric).unwrap().is_zero());
    }

    #[test]
    fn sphere_is_einstein_with_scalar_six() {
        let geo = builtin_sphere3();
        let calc = geo.calculus(Mode::Classical);
        let conn = solve_levi_civita(&calc).unwrap();
        let r = riemann(&calc, &conn);
        let ric = ricci(&calc, &r).unwrap();
        assert_eq!(ric, calc.line_element().scalar_mul(&Scalar::from_int(2)));
        let s = scalar_curvature(&calc, &ric).unwrap();
        assert_eq!(s, AlgebraElement::scalar(calc.algebra, Scalar::from_int(6)));
        // cross-check: r = <G, 2G> = 2 e^beta
        let two_ebeta = calc.e_beta().scale(&Scalar::from_int(2));
        assert_eq!(s, two_ebeta);
    }

    #[test]
    fn middle_legs_live_in_the_junk_complement() {
        let geo = builtin_sphere3();
        let calc = geo.calculus(Mode::Classical);
        let conn = solve_levi_civita(&calc).unwrap();
        let r = riemann(&calc, &conn);
        for out in &r.outputs {
            assert_eq!(calc.co_junk_at(out, 1), *out);
        }
    }
}
