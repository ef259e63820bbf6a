//! The instance data model: quadratic matrix functions
//! q_i(X) = tr(X^T A_i X)/2 + <B_i, X> + c_i, their affine aggregates over a
//! dual vector, closed-form maximization over a Euclidean ball, conversion
//! from SDP block form, and curvature bounds on a ball.

use crate::dense::{sqrtm_psd_small, sym_eigen, DenseMatrix};
use crate::eig::{lanczos_extreme, Extreme};
use crate::error::{Error, Result};
use crate::linop::FnOperator;
use crate::sparse::{opnorm_estimate, SparseSymMatrix, OPNORM_MAX_ITER, OPNORM_TOL};

/// One quadratic matrix function (A, B, c).
#[derive(Debug, Clone)]
pub struct QmpTerm {
    pub a: SparseSymMatrix,
    pub b: DenseMatrix,
    pub c: f64,
}

#[derive(Debug, Clone)]
pub struct QmpData {
    n_minus_k: usize,
    k: usize,
    pub objective: QmpTerm,
    pub constraints: Vec<QmpTerm>,
}

impl QmpData {
    pub fn new(objective: QmpTerm, constraints: Vec<QmpTerm>) -> Result<Self> {
        let n_minus_k = objective.a.dim();
        let k = objective.b.cols();
        for (idx, term) in std::iter::once(&objective).chain(&constraints).enumerate() {
            if term.a.dim() != n_minus_k || term.b.rows() != n_minus_k || term.b.cols() != k {
                return Err(Error::DimensionMismatch(format!(
                    "term {idx}: expected A dim {n_minus_k} and B shape {n_minus_k}x{k}"
                )));
            }
        }
        Ok(Self {
            n_minus_k,
            k,
            objective,
            constraints,
        })
    }

    pub fn n_minus_k(&self) -> usize {
        self.n_minus_k
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    fn check_x(&self, x: &DenseMatrix) -> Result<()> {
        if x.rows() != self.n_minus_k || x.cols() != self.k {
            return Err(Error::DimensionMismatch(format!(
                "X has shape {}x{}, expected {}x{}",
                x.rows(),
                x.cols(),
                self.n_minus_k,
                self.k
            )));
        }
        Ok(())
    }

    fn check_gamma(&self, gamma: &[f64]) -> Result<()> {
        if gamma.len() != self.num_constraints() {
            return Err(Error::DimensionMismatch(format!(
                "gamma has length {}, expected {}",
                gamma.len(),
                self.num_constraints()
            )));
        }
        Ok(())
    }

    /// Evaluate q_obj and all constraint values at X. Each A_i X is computed
    /// exactly once.
    pub fn eval_all_q(&self, x: &DenseMatrix) -> Result<(f64, Vec<f64>)> {
        self.check_x(x)?;
        let q_obj = eval_term(&self.objective, x)?;
        let q_vec = self
            .constraints
            .iter()
            .map(|t| eval_term(t, x))
            .collect::<Result<Vec<_>>>()?;
        Ok((q_obj, q_vec))
    }

    /// A(gamma) V = A_obj V + sum_i gamma_i A_i V without materializing
    /// A(gamma).
    pub fn apply_a_of_gamma(&self, gamma: &[f64], v: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_gamma(gamma)?;
        if v.rows() != self.n_minus_k {
            return Err(Error::DimensionMismatch(format!(
                "operand has {} rows, expected {}",
                v.rows(),
                self.n_minus_k
            )));
        }
        let mut out = DenseMatrix::zeros(self.n_minus_k, v.cols());
        self.objective.a.spmv_add(1.0, v, &mut out);
        for (g, t) in gamma.iter().zip(&self.constraints) {
            if *g != 0.0 {
                t.a.spmv_add(*g, v, &mut out);
            }
        }
        Ok(out)
    }

    /// Single-vector version of [`apply_a_of_gamma`].
    pub fn apply_a_of_gamma_vec(&self, gamma: &[f64], x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        self.objective.a.apply_add(1.0, x, y);
        for (g, t) in gamma.iter().zip(&self.constraints) {
            if *g != 0.0 {
                t.a.apply_add(*g, x, y);
            }
        }
    }

    /// B(gamma) = B_obj + sum_i gamma_i B_i.
    pub fn b_of_gamma(&self, gamma: &[f64]) -> Result<DenseMatrix> {
        self.check_gamma(gamma)?;
        let mut out = self.objective.b.clone();
        for (g, t) in gamma.iter().zip(&self.constraints) {
            out.axpy(*g, &t.b);
        }
        Ok(out)
    }

    /// c(gamma) = c_obj + sum_i gamma_i c_i.
    pub fn c_of_gamma(&self, gamma: &[f64]) -> Result<f64> {
        self.check_gamma(gamma)?;
        Ok(self.objective.c
            + gamma
                .iter()
                .zip(&self.constraints)
                .map(|(g, t)| g * t.c)
                .sum::<f64>())
    }

    /// q(gamma, X) = q_obj(X) + sum_i gamma_i q_i(X).
    pub fn q_of(&self, gamma: &[f64], x: &DenseMatrix) -> Result<f64> {
        let (q_obj, q_vec) = self.eval_all_q(x)?;
        self.check_gamma(gamma)?;
        Ok(q_obj + dot(gamma, &q_vec))
    }

    /// Closed-form maximum of q(gamma, X) over the ball:
    /// Q_U(X) = q_obj(X) + <center, v> + radius * ||v|| with v the constraint
    /// values at X; the argmax sits on the boundary along v (or at the
    /// center when v = 0).
    pub fn max_over_ball(&self, ball: &Ball, x: &DenseMatrix) -> Result<(f64, Vec<f64>)> {
        self.check_gamma(&ball.center)?;
        let (q_obj, v) = self.eval_all_q(x)?;
        Ok(max_over_ball_from_values(q_obj, &v, ball))
    }

    /// sqrt(sum_i ||A_i||_2^2): a sound bound on ||sum_i u_i A_i||_2 over
    /// unit u by the triangle and Cauchy-Schwarz inequalities.
    pub fn rho_hat(&self) -> Result<f64> {
        let mut sum = 0.0;
        for (i, t) in self.constraints.iter().enumerate() {
            let norm = opnorm_estimate(&t.a, OPNORM_TOL, OPNORM_MAX_ITER, 0x10_0000 + i as u64)?;
            sum += norm * norm;
        }
        Ok(sum.sqrt())
    }

    /// Uniform strong convexity / smoothness bounds of A(gamma) over a ball:
    /// mu = lambda_min(A(center)) - r * rho_hat, L = lambda_max + r * rho_hat.
    /// Fails when mu <= 0, i.e. the ball is not certified.
    pub fn curvature_on_ball(&self, ball: &Ball, rho_hat: f64) -> Result<(f64, f64)> {
        self.check_gamma(&ball.center)?;
        let (lo, hi) = self.extreme_eigs_at(&ball.center, 1e-10, 0x20_0000)?;
        let mu = lo - ball.radius * rho_hat;
        let l = hi + ball.radius * rho_hat;
        if mu <= 0.0 {
            return Err(Error::BallNotCertified { mu });
        }
        Ok((mu, l))
    }

    /// Extreme eigenvalues of A(gamma) via Lanczos.
    pub fn extreme_eigs_at(&self, gamma: &[f64], tol: f64, seed: u64) -> Result<(f64, f64)> {
        self.check_gamma(gamma)?;
        let n = self.n_minus_k;
        let op = FnOperator::new(n, |x: &[f64], y: &mut [f64]| {
            self.apply_a_of_gamma_vec(gamma, x, y);
        });
        let max_iter = 200 * n + 2000;
        let lo = lanczos_extreme(&op, Extreme::Min, tol, max_iter, seed)?;
        let hi = lanczos_extreme(&op, Extreme::Max, tol, max_iter, seed ^ 0xff)?;
        Ok((lo.value, hi.value))
    }
}

pub(crate) fn max_over_ball_from_values(q_obj: f64, v: &[f64], ball: &Ball) -> (f64, Vec<f64>) {
    let vnorm = dot(v, v).sqrt();
    let value = q_obj + dot(&ball.center, v) + ball.radius * vnorm;
    let argmax = if vnorm == 0.0 {
        ball.center.clone()
    } else {
        ball.center
            .iter()
            .zip(v)
            .map(|(c, vi)| c + ball.radius * vi / vnorm)
            .collect()
    };
    (value, argmax)
}

fn eval_term(t: &QmpTerm, x: &DenseMatrix) -> Result<f64> {
    let ax = t.a.spmv(x)?;
    Ok(0.5 * x.dot(&ax) + t.b.dot(x) + t.c)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean ball in dual space; the certificate set.
#[derive(Debug, Clone)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if radius < 0.0 || !radius.is_finite() {
            return Err(Error::InvalidInput(format!("ball radius {radius} invalid")));
        }
        if center.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("ball center has non-finite entries".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, gamma: &[f64]) -> bool {
        dist(gamma, &self.center) <= self.radius * (1.0 + 1e-12)
    }

    /// Nearest point of the ball: center + min(1, r/||g - c||)(g - c).
    pub fn project(&self, gamma: &[f64]) -> Vec<f64> {
        let d = dist(gamma, &self.center);
        if d <= self.radius {
            return gamma.to_vec();
        }
        let scale = self.radius / d;
        self.center
            .iter()
            .zip(gamma)
            .map(|(c, g)| c + scale * (g - c))
            .collect()
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// SDP data in block form over the coordinate subspace spanned by the first
/// n-k coordinates: M_i = [A_i/2, Bt_i/2; Bt_i^T/2, C_i] with scalar offset
/// d_i, together with the known positive definite restriction Zstar.
#[derive(Debug, Clone)]
pub struct SdpBlock {
    pub a: SparseSymMatrix,
    pub b_tilde: DenseMatrix,
    pub c: DenseMatrix,
    pub d: f64,
}

#[derive(Debug, Clone)]
pub struct SdpBlocks {
    pub objective: SdpBlock,
    pub constraints: Vec<SdpBlock>,
    pub zstar: DenseMatrix,
}

/// Convert SDP block data to quadratic matrix functions:
/// B_i = Bt_i (Zstar)^{1/2}, c_i = <C_i, Zstar> + d_i.
pub fn sdp_to_qmp(blocks: &SdpBlocks) -> Result<QmpData> {
    let (vals, _) = sym_eigen(&blocks.zstar);
    if vals.first().copied().unwrap_or(0.0) <= 0.0 {
        return Err(Error::IndefiniteMatrix {
            min_eig: vals.first().copied().unwrap_or(0.0),
        });
    }
    let root = sqrtm_psd_small(&blocks.zstar)?;
    let convert = |blk: &SdpBlock| -> QmpTerm {
        QmpTerm {
            a: blk.a.clone(),
            b: blk.b_tilde.matmul(&root),
            c: blk.c.dot(&blocks.zstar) + blk.d,
        }
    };
    QmpData::new(
        convert(&blocks.objective),
        blocks.constraints.iter().map(convert).collect(),
    )
}

/// Dense n x n realization [X X^T, X S; S X^T, Zstar] with S = Zstar^{1/2}.
/// Verification tool for small n only.
pub fn assemble_y(x: &DenseMatrix, zstar: &DenseMatrix) -> Result<DenseMatrix> {
    let root = sqrtm_psd_small(zstar)?;
    let (nk, k) = (x.rows(), x.cols());
    let n = nk + k;
    let xxt = x.matmul(&x.transpose());
    let xs = x.matmul(&root);
    let mut y = DenseMatrix::zeros(n, n);
    for r in 0..nk {
        for c in 0..nk {
            y.set(r, c, xxt.get(r, c));
        }
        for c in 0..k {
            y.set(r, nk + c, xs.get(r, c));
            y.set(nk + c, r, xs.get(r, c));
        }
    }
    for r in 0..k {
        for c in 0..k {
            y.set(nk + r, nk + c, zstar.get(r, c));
        }
    }
    Ok(y)
}
