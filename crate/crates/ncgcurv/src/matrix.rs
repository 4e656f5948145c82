//! Dense exact linear algebra over the scalar field: solve, kernel, rank and
//! orthogonal projections, all by fraction-free-enough Gaussian elimination
//! with exact pivots.

use crate::scalar::{Scalar, ScalarError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular matrix")]
    Singular,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Row-major dense matrix of exact scalars.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for k in 0..n {
            *m.at_mut(k, k) = Scalar::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|v| v.len()).unwrap_or(0);
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| self.at(r, c) + o.at(r, c))
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| self.at(r, c) - o.at(r, c))
    }

    pub fn scale(&self, k: &Scalar) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |r, c| self.at(r, c) * k)
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "matrix product shape");
        Matrix::from_fn(self.rows, o.cols, |r, c| {
            let mut acc = Scalar::zero();
            for k in 0..self.cols {
                acc = &acc + &(self.at(r, k) * o.at(k, c));
            }
            acc
        })
    }

    /// Conjugate transpose for the L -> L^{-1}, i -> -i involution.
    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.at(c, r).conj())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = Scalar::zero();
                for c in 0..self.cols {
                    if !v[c].is_zero() {
                        acc = &acc + &(self.at(r, c) * &v[c]);
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..self.cols {
                    let a = self.at(p, c).clone();
                    let b = self.at(row, c).clone();
                    *self.at_mut(p, c) = b;
                    *self.at_mut(row, c) = a;
                }
            }
            let inv = self.at(row, col).inv().expect("nonzero pivot");
            for c in col..self.cols {
                *self.at_mut(row, c) = self.at(row, c) * &inv;
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let f = self.at(r, col).clone();
                    for c in col..self.cols {
                        *self.at_mut(r, c) = self.at(r, c) - &(&f * self.at(row, c));
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the kernel (as column vectors).
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut basis = Vec::new();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        for free in (0..self.cols).filter(|c| !pivot_set.contains(c)) {
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -&m.at(r, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve M x = rhs for vectors of any value type that forms a module over
    /// the scalar field.
    pub fn solve<V: LinearValue>(&self, rhs: &[V]) -> Result<Vec<V>, MatrixError> {
        if self.rows != self.cols || self.rows != rhs.len() {
            return Err(MatrixError::Dimension(format!(
                "solve expects square {}x{} with matching rhs, got rhs {}",
                self.rows,
                self.cols,
                rhs.len()
            )));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut b: Vec<V> = rhs.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.at(r, col).is_zero()) else {
                return Err(MatrixError::Singular);
            };
            if p != col {
                perm.swap(p, col);
                b.swap(p, col);
                for c in 0..n {
                    let a = m.at(p, c).clone();
                    let d = m.at(col, c).clone();
                    *m.at_mut(p, c) = d;
                    *m.at_mut(col, c) = a;
                }
            }
            let inv = m.at(col, col).inv().expect("nonzero pivot");
            for c in 0..n {
                *m.at_mut(col, c) = m.at(col, c) * &inv;
            }
            b[col] = b[col].scaled(&inv);
            for r in 0..n {
                if r != col && !m.at(r, col).is_zero() {
                    let f = m.at(r, col).clone();
                    for c in 0..n {
                        *m.at_mut(r, c) = m.at(r, c) - &(&f * m.at(col, c));
                    }
                    let upd = b[col].scaled(&f);
                    b[r] = b[r].sub_val(&upd);
                }
            }
        }
        Ok(b)
    }

    pub fn inverse(&self) -> Result<Matrix, MatrixError> {
        let n = self.rows;
        let cols: Vec<Vec<Scalar>> = (0..n)
            .map(|k| {
                let mut e = vec![Scalar::zero(); n];
                e[k] = Scalar::one();
                self.solve(&e)
            })
            .collect::<Result<_, _>>()?;
        Ok(Matrix::from_fn(n, n, |r, c| cols[c][r].clone()))
    }

    /// Orthogonal projection onto the span of the given (independent) columns,
    /// with respect to the standard conj-sesquilinear form.
    pub fn projector_onto_span(vectors: &[Vec<Scalar>], dim: usize) -> Result<Matrix, MatrixError> {
        if vectors.is_empty() {
            return Ok(Matrix::zero(dim, dim));
        }
        let k = vectors.len();
        let b = Matrix::from_fn(dim, k, |r, c| vectors[c][r].clone());
        let bh = b.adjoint();
        let gram = bh.mul(&b);
        let gram_inv = gram.inverse()?;
        Ok(b.mul(&gram_inv).mul(&bh))
    }
}

/// Values that Gaussian elimination may carry on the right-hand side.
pub trait LinearValue: Clone {
    fn scaled(&self, k: &Scalar) -> Self;
    fn sub_val(&self, o: &Self) -> Self;
}

impl LinearValue for Scalar {
    fn scaled(&self, k: &Scalar) -> Self {
        self * k
    }
    fn sub_val(&self, o: &Self) -> Self {
        self - o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_frac;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn solve_small_system() {
        let m = Matrix::from_rows(vec![vec![s(2), s(1)], vec![s(1), s(1)]]);
        let x = m.solve(&[s(3), s(2)]).unwrap();
        assert_eq!(x, vec![s(1), s(1)]);
    }

    #[test]
    fn kernel_and_projector() {
        // M = [[1,1,0],[0,0,1]] has kernel spanned by (1,-1,0)
        let m = Matrix::from_rows(vec![
            vec![s(1), s(1), s(0)],
            vec![s(0), s(0), s(1)],
        ]);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        let p = Matrix::projector_onto_span(&k, 3).unwrap();
        assert_eq!(p.mul(&p), p);
        // projector fixes the kernel vector
        assert_eq!(p.apply(&k[0]), k[0]);
        // and the diagonal entries are 1/2 on the first two slots
        assert_eq!(p.at(0, 0), &Scalar::from_rat(rat_frac(1, 2)));
    }

    #[test]
    fn inverse_with_lambda_entries() {
        let l = Scalar::lambda();
        let m = Matrix::from_rows(vec![vec![s(1), l.clone()], vec![Scalar::zero(), s(1)]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
    }
}
