//! Storage-optimal first-order solver for rank-k exact QMP-like
//! semidefinite programs.
//!
//! The SDP is reformulated as a strongly convex quadratic matrix minimax
//! problem over a certificate ball in dual space and solved by an
//! accelerated outer loop with inexact prox-maps. Dual iterates produced by
//! first-order ascent on a penalized dual feed a driver that builds
//! candidate certificate balls and accepts on feasibility of the recovered
//! low-rank factor. Memory stays O(m + nk) throughout: no n x n matrix is
//! ever materialized on the solve path.

pub mod agd;
pub mod cert;
pub mod cg;
pub mod dense;
pub mod dual;
pub mod eig;
pub mod error;
pub mod gen;
pub mod io;
pub mod linop;
pub mod prox;
pub mod qmp;
pub mod rng;
pub mod sparse;

#[cfg(test)]
pub(crate) mod testutil;

pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use qmp::{Ball, QmpData, QmpTerm};
pub use sparse::SparseSymMatrix;
