//! Symmetric sparse matrices in upper-triangle coordinate form.
//!
//! Only the upper triangle is stored; the matvec applies the implied
//! symmetric part on the fly, so storage and work are both O(nnz).

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::linop::LinearOperator;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    dim: usize,
    rows: Vec<u32>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseSymMatrix {
    /// Build from upper-triangle entries. Rejects out-of-range indices,
    /// entries below the diagonal, non-finite values, and duplicates.
    pub fn new(dim: usize, mut entries: Vec<(u32, u32, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        for &(r, c, v) in &entries {
            if r as usize >= dim || c as usize >= dim {
                return Err(Error::InvalidInput(format!(
                    "entry ({r}, {c}) out of range for dim {dim}"
                )));
            }
            if r > c {
                return Err(Error::InvalidInput(format!(
                    "entry ({r}, {c}) below the diagonal; store the upper triangle"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite value at ({r}, {c})")));
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::InvalidInput(format!(
                    "duplicate entry ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        let (rows, cols, vals) = entries.into_iter().fold(
            (Vec::new(), Vec::new(), Vec::new()),
            |(mut rs, mut cs, mut vs), (r, c, v)| {
                rs.push(r);
                cs.push(c);
                vs.push(v);
                (rs, cs, vs)
            },
        );
        Ok(Self { dim, rows, cols, vals })
    }

    pub fn identity(dim: usize) -> Self {
        let entries = (0..dim as u32).map(|i| (i, i, 1.0)).collect();
        Self::new(dim, entries).expect("identity is always valid")
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, Vec::new()).expect("empty matrix is always valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.rows
            .iter()
            .zip(&self.cols)
            .zip(&self.vals)
            .map(|((&r, &c), &v)| (r, c, v))
    }

    pub fn scale(&mut self, alpha: f64) {
        for v in &mut self.vals {
            *v *= alpha;
        }
    }

    /// y += alpha * S x for a single vector.
    pub fn apply_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for ((&r, &c), &v) in self.rows.iter().zip(&self.cols).zip(&self.vals) {
            let (r, c) = (r as usize, c as usize);
            y[r] += alpha * v * x[c];
            if r != c {
                y[c] += alpha * v * x[r];
            }
        }
    }

    /// out += alpha * S V for a multi-column V (row-major).
    pub fn spmv_add(&self, alpha: f64, v: &DenseMatrix, out: &mut DenseMatrix) {
        debug_assert_eq!(v.rows(), self.dim);
        debug_assert_eq!(out.rows(), self.dim);
        debug_assert_eq!(out.cols(), v.cols());
        let k = v.cols();
        let vd = v.as_slice();
        let od = out.as_mut_slice();
        for ((&r, &c), &val) in self.rows.iter().zip(&self.cols).zip(&self.vals) {
            let (r, c) = (r as usize, c as usize);
            let s = alpha * val;
            for j in 0..k {
                od[r * k + j] += s * vd[c * k + j];
            }
            if r != c {
                for j in 0..k {
                    od[c * k + j] += s * vd[r * k + j];
                }
            }
        }
    }

    /// S V, exploiting symmetry.
    pub fn spmv(&self, v: &DenseMatrix) -> Result<DenseMatrix> {
        if v.rows() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "spmv: operand has {} rows, matrix dim is {}",
                v.rows(),
                self.dim
            )));
        }
        let mut out = DenseMatrix::zeros(self.dim, v.cols());
        self.spmv_add(1.0, v, &mut out);
        Ok(out)
    }

    /// Dense symmetric realization, for oracles and small verification work.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            out.set(r as usize, c as usize, v);
            if r != c {
                out.set(c as usize, r as usize, v);
            }
        }
        out
    }
}

impl LinearOperator for SparseSymMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        self.apply_add(1.0, x, y);
    }
}

/// Spectral norm, i.e. the largest eigenvalue magnitude, via Lanczos runs
/// at both ends of the spectrum. Deterministic given the seed. Power
/// iteration is not robust here: a near-tied +/- eigenvalue pair, common in
/// sparse Gaussian draws, makes it converge arbitrarily slowly.
pub fn opnorm_estimate(s: &SparseSymMatrix, tol: f64, max_iter: usize, seed: u64) -> Result<f64> {
    let lo = crate::eig::lanczos_extreme(s, crate::eig::Extreme::Min, tol, max_iter, seed)?;
    let hi = crate::eig::lanczos_extreme(s, crate::eig::Extreme::Max, tol, max_iter, seed ^ 0xff)?;
    Ok(lo.value.abs().max(hi.value.abs()))
}

pub const OPNORM_TOL: f64 = 1e-10;
pub const OPNORM_MAX_ITER: usize = 5000;
