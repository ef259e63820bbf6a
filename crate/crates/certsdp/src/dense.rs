//! Row-major dense matrices and the small dense helpers used throughout:
//! symmetric eigendecomposition, PSD square roots, and small products.
//!
//! Everything here is sized for the "small" dimensions of the problem
//! (k x k blocks, m x m Gram matrices, verification copies); the large
//! dimension only ever appears as the row count of tall skinny matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out.data[i * n + i] = 1.0;
        }
        out
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Trace inner product <A, B>.
    pub fn dot(&self, other: &DenseMatrix) -> f64 {
        debug_assert_eq!(self.rows, other.rows);
        debug_assert_eq!(self.cols, other.cols);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// self += alpha * other
    pub fn axpy(&mut self, alpha: f64, other: &DenseMatrix) {
        debug_assert_eq!(self.rows, other.rows);
        debug_assert_eq!(self.cols, other.cols);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.data {
            *a *= alpha;
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// Naive dense product; fine for the small shapes this crate touches.
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for i in 0..self.cols {
                let a = self.get(r, i);
                if a == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(i, c);
                }
            }
        }
        out
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<f64>) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(m.nrows(), m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                out.set(r, c, m[(r, c)]);
            }
        }
        out
    }
}

/// Eigendecomposition of a symmetric matrix. Returns eigenvalues in
/// ascending order and the matrix of matching eigenvectors as columns.
pub fn sym_eigen(a: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    assert_eq!(a.rows(), a.cols(), "sym_eigen needs a square matrix");
    let eig = a.to_nalgebra().symmetric_eigen();
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, c, eig.eigenvectors[(r, i)]);
        }
    }
    (values, vectors)
}

/// Symmetric PSD square root via dense eigendecomposition; eigenvalues
/// slightly below zero (relative to the matrix scale) are clipped to zero.
pub fn sqrtm_psd_small(z: &DenseMatrix) -> Result<DenseMatrix> {
    assert_eq!(z.rows(), z.cols(), "sqrtm needs a square matrix");
    let (values, vectors) = sym_eigen(z);
    let scale = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let floor = -1e-12 * scale.max(1.0);
    if let Some(&min) = values.first() {
        if min < floor {
            return Err(Error::IndefiniteMatrix { min_eig: min });
        }
    }
    let n = z.rows();
    let mut out = DenseMatrix::zeros(n, n);
    for (idx, &lam) in values.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        for r in 0..n {
            let vr = vectors.get(r, idx);
            for c in 0..n {
                out.data[r * n + c] += s * vr * vectors.get(c, idx);
            }
        }
    }
    Ok(out)
}

/// Dense symmetric linear solve, used as an oracle and for small systems.
pub fn solve_sym(a: &DenseMatrix, rhs: &DenseMatrix) -> Result<DenseMatrix> {
    let lu = a.to_nalgebra().lu();
    let b = rhs.to_nalgebra();
    match lu.solve(&b) {
        Some(x) => Ok(DenseMatrix::from_nalgebra(&x)),
        None => Err(Error::InvalidInput("singular matrix in dense solve".into())),
    }
}
