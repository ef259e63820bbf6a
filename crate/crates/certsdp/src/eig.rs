//! Extreme eigenpairs of symmetric operators via Lanczos iteration with
//! full reorthogonalization. The subspace dimensions here are small enough
//! that robustness wins over the cost of keeping the whole basis.

use crate::dense::{sym_eigen, DenseMatrix};
use crate::error::{Error, Result};
use crate::linop::LinearOperator;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Min,
    Max,
}

#[derive(Debug, Clone)]
pub struct RitzPair {
    pub value: f64,
    /// Unit eigenvector estimate.
    pub vector: Vec<f64>,
    pub residual: f64,
    pub matvecs: usize,
}

/// Largest Krylov basis kept before restarting from the best Ritz vector.
const BASIS_CAP: usize = 300;

pub fn lanczos_extreme(
    op: &dyn LinearOperator,
    which: Extreme,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<RitzPair> {
    let start = Rng::new(seed).unit_vector(op.dim());
    lanczos_extreme_from(op, which, tol, max_iter, start)
}

/// Same as [`lanczos_extreme`] but with an explicit start vector, used to
/// warm-start repeated eigenvalue solves on slowly drifting operators.
pub fn lanczos_extreme_from(
    op: &dyn LinearOperator,
    which: Extreme,
    tol: f64,
    max_iter: usize,
    start: Vec<f64>,
) -> Result<RitzPair> {
    let n = op.dim();
    assert_eq!(start.len(), n);
    if n == 1 {
        let mut y = vec![0.0];
        op.apply(&[1.0], &mut y);
        return Ok(RitzPair {
            value: y[0],
            vector: vec![1.0],
            residual: 0.0,
            matvecs: 1,
        });
    }

    let mut v = normalized(start).unwrap_or_else(|| Rng::new(0x5eed).unit_vector(n));
    let mut matvecs = 0usize;
    let mut best: Option<RitzPair> = None;
    let mut restart_rng = Rng::new(0xa5a5_5a5a);

    while matvecs < max_iter {
        let mut basis: Vec<Vec<f64>> = vec![v.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let cap = BASIS_CAP.min(n);

        for j in 0..cap {
            if matvecs >= max_iter {
                break;
            }
            let mut w = vec![0.0; n];
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            let alpha = dot(&basis[j], &w);
            alphas.push(alpha);
            // Two Gram-Schmidt sweeps against the whole basis.
            for _ in 0..2 {
                for u in &basis {
                    let h = dot(u, &w);
                    axpy(&mut w, -h, u);
                }
            }
            let beta = norm(&w);
            betas.push(beta);

            let check = beta <= 1e-14 * scale_of(&alphas, &betas)
                || j + 1 == cap
                || j < 32
                || (j + 1) % 8 == 0;
            if check {
                let (theta, s) = tridiag_extreme(&alphas, &betas[..j], which);
                let bound = beta * s[j].abs();
                if bound <= tol * theta.abs().max(1.0) || beta <= 1e-14 * scale_of(&alphas, &betas)
                {
                    let mut ritz = vec![0.0; n];
                    for (c, u) in basis.iter().enumerate() {
                        axpy(&mut ritz, s[c], u);
                    }
                    if let Some(r) = normalized(ritz) {
                        let mut ar = vec![0.0; n];
                        op.apply(&r, &mut ar);
                        matvecs += 1;
                        let theta_true = dot(&r, &ar);
                        axpy(&mut ar, -theta_true, &r);
                        let res = norm(&ar);
                        let pair = RitzPair {
                            value: theta_true,
                            vector: r,
                            residual: res,
                            matvecs,
                        };
                        if res <= tol * theta_true.abs().max(1.0) {
                            return Ok(pair);
                        }
                        best = Some(better(best.take(), pair, which));
                    }
                }
            }

            if beta <= 1e-14 * scale_of(&alphas, &betas) {
                break; // invariant subspace; restart below if not accepted
            }
            let next: Vec<f64> = w.iter().map(|x| x / beta).collect();
            basis.push(next);
        }

        // Restart from the best Ritz vector seen so far, perturbed a little
        // so a stalled direction cannot trap the iteration.
        v = match &best {
            Some(pair) => {
                let mut s = pair.vector.clone();
                let noise = restart_rng.unit_vector(n);
                axpy(&mut s, 1e-8, &noise);
                normalized(s).unwrap()
            }
            None => restart_rng.unit_vector(n),
        };
    }

    match best {
        Some(pair) => Err(Error::EigNotConverged {
            iters: matvecs,
            best_value: pair.value,
            residual: pair.residual,
        }),
        None => Err(Error::EigNotConverged {
            iters: matvecs,
            best_value: f64::NAN,
            residual: f64::NAN,
        }),
    }
}

fn better(best: Option<RitzPair>, candidate: RitzPair, which: Extreme) -> RitzPair {
    match best {
        None => candidate,
        Some(b) => {
            let keep_candidate = match which {
                Extreme::Min => candidate.value < b.value || candidate.residual < b.residual,
                Extreme::Max => candidate.value > b.value || candidate.residual < b.residual,
            };
            if keep_candidate {
                candidate
            } else {
                b
            }
        }
    }
}

/// Extreme eigenpair of the symmetric tridiagonal matrix with diagonal
/// `alphas` and off-diagonal `betas`. Returns (value, eigenvector).
fn tridiag_extreme(alphas: &[f64], betas: &[f64], which: Extreme) -> (f64, Vec<f64>) {
    let j = alphas.len();
    debug_assert_eq!(betas.len(), j - 1);
    let mut t = DenseMatrix::zeros(j, j);
    for (i, &a) in alphas.iter().enumerate() {
        t.set(i, i, a);
    }
    for (i, &b) in betas.iter().enumerate() {
        t.set(i, i + 1, b);
        t.set(i + 1, i, b);
    }
    let (vals, vecs) = sym_eigen(&t);
    let idx = match which {
        Extreme::Min => 0,
        Extreme::Max => j - 1,
    };
    let s: Vec<f64> = (0..j).map(|r| vecs.get(r, idx)).collect();
    (vals[idx], s)
}

fn scale_of(alphas: &[f64], betas: &[f64]) -> f64 {
    let a = alphas.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let b = betas.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    a.max(b).max(1.0)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn normalized(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let n = norm(&v);
    if n <= 1e-300 {
        return None;
    }
    for x in &mut v {
        *x /= n;
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::SparseSymMatrix;

    #[test]
    fn diagonal_extremes() {
        let d =
            SparseSymMatrix::new(3, vec![(0, 0, 1.0), (1, 1, 2.0), (2, 2, 3.0)]).unwrap();
        let lo = lanczos_extreme(&d, Extreme::Min, 1e-10, 1000, 1).unwrap();
        assert!((lo.value - 1.0).abs() < 1e-9);
        assert!((lo.vector[0].abs() - 1.0).abs() < 1e-6);
        let hi = lanczos_extreme(&d, Extreme::Max, 1e-10, 1000, 1).unwrap();
        assert!((hi.value - 3.0).abs() < 1e-9);
        assert!((hi.vector[2].abs() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn matches_dense_on_random_sparse() {
        let mut rng = Rng::new(21);
        let dim = 200;
        let mut entries = std::collections::BTreeMap::new();
        while entries.len() < 800 {
            let r = rng.usize_below(dim) as u32;
            let c = rng.usize_below(dim) as u32;
            let (r, c) = if r <= c { (r, c) } else { (c, r) };
            entries.entry((r, c)).or_insert_with(|| rng.normal());
        }
        let s = SparseSymMatrix::new(
            dim,
            entries.into_iter().map(|((r, c), v)| (r, c, v)).collect(),
        )
        .unwrap();
        let (vals, _) = sym_eigen(&s.to_dense());
        let lo = lanczos_extreme(&s, Extreme::Min, 1e-10, 20_000, 3).unwrap();
        assert!((lo.value - vals[0]).abs() < 1e-8 * vals[0].abs().max(1.0));
        let hi = lanczos_extreme(&s, Extreme::Max, 1e-10, 20_000, 3).unwrap();
        assert!((hi.value - vals[dim - 1]).abs() < 1e-8 * vals[dim - 1].abs().max(1.0));
    }

    #[test]
    fn min_of_negated_equals_negated_max() {
        let mut rng = Rng::new(33);
        let dim = 40;
        let entries: Vec<(u32, u32, f64)> = (0..dim as u32)
            .flat_map(|r| (r..dim as u32).map(move |c| (r, c)))
            .map(|(r, c)| (r, c, 0.0))
            .collect::<Vec<_>>()
            .into_iter()
            .map(|(r, c, _)| (r, c, rng.normal()))
            .collect();
        let s = SparseSymMatrix::new(dim, entries.clone()).unwrap();
        let mut neg = s.clone();
        neg.scale(-1.0);
        let max_s = lanczos_extreme(&s, Extreme::Max, 1e-10, 20_000, 4).unwrap();
        let min_neg = lanczos_extreme(&neg, Extreme::Min, 1e-10, 20_000, 4).unwrap();
        assert!((min_neg.value + max_s.value).abs() < 1e-8 * max_s.value.abs().max(1.0));
    }

    #[test]
    fn non_convergence_reports_best_pair() {
        let d = SparseSymMatrix::new(
            5,
            (0..5).map(|i| (i, i, i as f64)).collect(),
        )
        .unwrap();
        match lanczos_extreme(&d, Extreme::Min, 1e-30, 2, 1) {
            Err(Error::EigNotConverged { iters, .. }) => assert!(iters <= 2),
            other => panic!("expected EigNotConverged, got {other:?}"),
        }
    }
}
