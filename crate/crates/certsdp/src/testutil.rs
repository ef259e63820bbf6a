//! Random small instances for unit tests.

use crate::dense::DenseMatrix;
use crate::qmp::{QmpData, QmpTerm};
use crate::rng::Rng;
use crate::sparse::SparseSymMatrix;

pub fn random_sparse_sym(dim: usize, nnz: usize, rng: &mut Rng) -> SparseSymMatrix {
    let mut entries = std::collections::BTreeMap::new();
    let cap = dim * (dim + 1) / 2;
    while entries.len() < nnz.min(cap) {
        let r = rng.usize_below(dim) as u32;
        let c = rng.usize_below(dim) as u32;
        let (r, c) = if r <= c { (r, c) } else { (c, r) };
        entries.entry((r, c)).or_insert_with(|| rng.normal());
    }
    SparseSymMatrix::new(dim, entries.into_iter().map(|((r, c), v)| (r, c, v)).collect())
        .unwrap()
}

pub fn random_dense(rows: usize, cols: usize, rng: &mut Rng) -> DenseMatrix {
    DenseMatrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.normal()).collect()).unwrap()
}

/// A random instance with no structure beyond conformable shapes.
pub fn random_qmp(n_minus_k: usize, k: usize, m: usize, rng: &mut Rng) -> QmpData {
    let nnz = (n_minus_k * 2).max(1);
    let term = |rng: &mut Rng| QmpTerm {
        a: random_sparse_sym(n_minus_k, nnz, rng),
        b: random_dense(n_minus_k, k, rng),
        c: rng.normal(),
    };
    let objective = term(rng);
    let constraints = (0..m).map(|_| term(rng)).collect();
    QmpData::new(objective, constraints).unwrap()
}

/// A random instance whose A(gamma) is positive definite near gamma = 0:
/// A_obj = diag shift + PSD-ish, constraint blocks kept small.
pub fn random_spd_qmp(n_minus_k: usize, k: usize, m: usize, shift: f64, rng: &mut Rng) -> QmpData {
    let mut data = random_qmp(n_minus_k, k, m, rng);
    // rescale constraint A blocks and add a diagonal shift to the objective
    for t in &mut data.constraints {
        t.a.scale(0.1 / (m as f64).max(1.0));
    }
    let mut entries: Vec<(u32, u32, f64)> = data.objective.a.entries().collect();
    let present: std::collections::BTreeSet<(u32, u32)> =
        entries.iter().map(|&(r, c, _)| (r, c)).collect();
    for i in 0..n_minus_k as u32 {
        if present.contains(&(i, i)) {
            for e in &mut entries {
                if e.0 == i && e.1 == i {
                    e.2 = e.2 * 0.1 + shift;
                }
            }
        } else {
            entries.push((i, i, shift));
        }
    }
    for e in &mut entries {
        if e.0 != e.1 {
            e.2 *= 0.1;
        }
    }
    data.objective.a = SparseSymMatrix::new(n_minus_k, entries).unwrap();
    data
}
