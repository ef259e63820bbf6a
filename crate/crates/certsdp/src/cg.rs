//! Conjugate gradient solves against symmetric positive definite operators,
//! one right-hand side column at a time.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::linop::LinearOperator;

/// Solve A X = RHS column by column. Each returned column x satisfies
/// ||A x - b|| <= tol * ||b||; detected negative curvature is reported as a
/// distinct error, signaling that the operator is not positive definite.
pub fn cg_solve_multi(
    op: &dyn LinearOperator,
    rhs: &DenseMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<DenseMatrix> {
    let n = op.dim();
    if rhs.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "cg: rhs has {} rows, operator dim is {n}",
            rhs.rows()
        )));
    }
    let k = rhs.cols();
    let mut out = DenseMatrix::zeros(n, k);
    let mut b = vec![0.0; n];
    for col in 0..k {
        for r in 0..n {
            b[r] = rhs.get(r, col);
        }
        let x = cg_single(op, &b, tol, max_iter)?;
        for r in 0..n {
            out.set(r, col, x[r]);
        }
    }
    Ok(out)
}

fn cg_single(op: &dyn LinearOperator, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = b.len();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = tol * b_norm;

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);

    for iter in 0..max_iter {
        if rr.sqrt() <= target {
            // confirm against the true residual; CG's recurrence can drift
            op.apply(&x, &mut ap);
            let true_res: f64 = ap
                .iter()
                .zip(b)
                .map(|(axi, bi)| (axi - bi) * (axi - bi))
                .sum::<f64>()
                .sqrt();
            if true_res <= target * 1.001 {
                return Ok(x);
            }
            // refresh the recurrence from the true residual and continue
            for i in 0..n {
                r[i] = b[i] - ap[i];
            }
            p.copy_from_slice(&r);
            rr = dot(&r, &r);
            let _ = iter;
        }
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::IndefiniteOperator { curvature: pap });
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
    }
    if rr.sqrt() <= target {
        return Ok(x);
    }
    Err(Error::CgNotConverged {
        iters: max_iter,
        rel_residual: rr.sqrt() / b_norm,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
