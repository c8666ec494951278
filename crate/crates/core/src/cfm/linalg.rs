//! Small dense symmetric positive-definite solves for patch systems.

use crate::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest |A - A^T| entry.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Copies the upper triangle into the lower one.
    pub fn symmetrize_from_upper(&mut self) {
        for i in 0..self.n {
            for j in 0..i {
                self.data[i * self.n + j] = self.data[j * self.n + i];
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Cholesky factorization `A = L L^T` of a symmetric positive definite
/// matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    inner: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl Cholesky {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        let n = a.size();
        if a.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverBreakdown("matrix has non-finite entries".into()));
        }
        let m = nalgebra::DMatrix::from_row_slice(n, n, a.as_slice());
        let inner = nalgebra::Cholesky::new(m).ok_or_else(|| Error::SolverBreakdown(format!("{n}x{n} matrix is not positive definite")))?;
        Ok(Self { inner })
    }

    pub fn size(&self) -> usize {
        self.inner.l_dirty().nrows()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let mut v = nalgebra::DVectorViewMut::from_slice(x, x.len());
        self.inner.solve_mut(&mut v);
    }

    /// Crude condition estimate from the factor diagonal: (max L_ii / min L_ii)^2.
    pub fn condition_estimate(&self) -> f64 {
        let diag = self.inner.l_dirty().diagonal();
        (diag.max() / diag.min()).powi(2)
    }
}

/// Numerical rank of a rectangular row-major matrix: singular values below
/// `rel_tol` times the largest one count as zero.
pub fn matrix_rank(rows: usize, cols: usize, data: &[f64], rel_tol: f64) -> usize {
    let m = nalgebra::DMatrix::from_row_slice(rows, cols, data);
    let sv = m.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        let a = DenseMatrix::from_row_major(3, vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let f = Cholesky::factor(&a).unwrap();
        let b = [1.0, -2.0, 0.5];
        let x = f.solve(&b);
        let r = a.mul_vec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-14);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = DenseMatrix::from_row_major(2, vec![1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(Cholesky::factor(&a), Err(Error::SolverBreakdown(_))));
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = [1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0];
        assert_eq!(matrix_rank(3, 3, &m, 1e-12), 2);
    }
}
