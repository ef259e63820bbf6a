//! Random distance-minimization instances with exact ground truth. The
//! construction fixes the objective to ||X||_F^2 / 2, draws normalized
//! sparse/dense constraint data, picks a dual direction whose aggregate has
//! a negative minimum eigenvalue, and scales it so the curvature at the
//! planted dual solution is exactly mu_star. The offsets c_i are then set
//! to make the planted primal factor feasible, which makes every optimality
//! quantity available in closed form.

use crate::cg::cg_solve_multi;
use crate::dense::DenseMatrix;
use crate::dual::slack_apply;
use crate::eig::{lanczos_extreme, Extreme};
use crate::error::{Error, Result};
use crate::linop::FnOperator;
use crate::qmp::{QmpData, QmpTerm};
use crate::rng::Rng;
use crate::sparse::{opnorm_estimate, SparseSymMatrix, OPNORM_MAX_ITER, OPNORM_TOL};

#[derive(Debug, Clone)]
pub struct GenSpec {
    pub n_minus_k: usize,
    pub k: usize,
    pub m: usize,
    /// Planted minimum curvature at the dual solution, in (0, 1).
    pub mu_star: f64,
    /// Target number of stored entries per sparse constraint block.
    pub nnz: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_minus_k == 0 || self.k == 0 || self.m == 0 || self.nnz == 0 {
            return Err(Error::InvalidInput(
                "generator sizes must all be positive".into(),
            ));
        }
        if !(self.mu_star > 0.0 && self.mu_star < 1.0) {
            return Err(Error::InvalidInput(format!(
                "mu_star must lie in (0, 1), got {}",
                self.mu_star
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub gamma_star: Vec<f64>,
    pub x_star: DenseMatrix,
    pub t_star: DenseMatrix,
    /// Optimal value ||X*||_F^2 / 2.
    pub opt: f64,
    pub mu_star: f64,
}

/// Number of dual-direction redraws before giving up.
const RESAMPLE_CAP: usize = 100;

pub fn generate(spec: &GenSpec) -> Result<(QmpData, GroundTruth)> {
    spec.validate()?;
    let n = spec.n_minus_k;
    let k = spec.k;
    let m = spec.m;
    let mut rng = Rng::new(spec.seed);

    let objective = QmpTerm {
        a: SparseSymMatrix::identity(n),
        b: DenseMatrix::zeros(n, k),
        c: 0.0,
    };

    // Constraint data: sparse Gaussian A_i scaled to unit operator norm,
    // dense Gaussian B_i scaled to unit Frobenius norm.
    let mut constraints = Vec::with_capacity(m);
    for i in 0..m {
        let draws = spec.nnz.div_ceil(2);
        let mut entries = std::collections::BTreeMap::new();
        for _ in 0..draws {
            let r = rng.usize_below(n) as u32;
            let c = rng.usize_below(n) as u32;
            let (r, c) = if r <= c { (r, c) } else { (c, r) };
            *entries.entry((r, c)).or_insert(0.0) += rng.normal();
        }
        let mut a = SparseSymMatrix::new(
            n,
            entries.into_iter().map(|((r, c), v)| (r, c, v)).collect(),
        )?;
        let norm = opnorm_estimate(&a, OPNORM_TOL, OPNORM_MAX_ITER, spec.seed ^ (i as u64) << 32)?;
        if norm == 0.0 {
            return Err(Error::InvalidInput(
                "degenerate draw: constraint block has zero operator norm".into(),
            ));
        }
        a.scale(1.0 / norm);
        let mut b = DenseMatrix::zeros(n, k);
        for r in 0..n {
            for c in 0..k {
                b.set(r, c, rng.normal());
            }
        }
        let bn = b.norm_fro();
        b.scale(1.0 / bn);
        constraints.push(QmpTerm { a, b, c: 0.0 });
    }

    // Dual direction with negative minimum eigenvalue of the aggregate.
    let mut gamma_hat = Vec::new();
    let mut lambda_min = 0.0;
    let mut found = false;
    for attempt in 0..RESAMPLE_CAP {
        let cand = rng.unit_vector(m);
        let op = FnOperator::new(n, |x: &[f64], y: &mut [f64]| {
            y.fill(0.0);
            for (g, t) in cand.iter().zip(&constraints) {
                t.a.apply_add(*g, x, y);
            }
        });
        let pair = lanczos_extreme(
            &op,
            Extreme::Min,
            1e-10,
            200 * n + 2000,
            spec.seed ^ 0xd1a1 ^ attempt as u64,
        )?;
        if pair.value < -1e-6 {
            gamma_hat = cand;
            lambda_min = pair.value;
            found = true;
            break;
        }
    }
    if !found {
        return Err(Error::InvalidInput(format!(
            "could not draw a dual direction with negative curvature in {RESAMPLE_CAP} tries"
        )));
    }

    // Scale so lambda_min(A(gamma*)) = 1 + r * lambda_min = mu_star.
    let r = (spec.mu_star - 1.0) / lambda_min;
    let gamma_star: Vec<f64> = gamma_hat.iter().map(|g| r * g).collect();

    // Planted primal factor X* = -A(gamma*)^{-1} B(gamma*).
    let data = QmpData::new(objective, constraints)?;
    let b_star = data.b_of_gamma(&gamma_star)?;
    let op = FnOperator::new(n, |x: &[f64], y: &mut [f64]| {
        data.apply_a_of_gamma_vec(&gamma_star, x, y);
    });
    let mut x_star = cg_solve_multi(&op, &b_star, 1e-12, 100 * n + 1000)?;
    x_star.scale(-1.0);

    // Offsets making X* exactly feasible: c_i = -tr(X*' A_i X*)/2 - <B_i, X*>.
    let mut terms = data.constraints.clone();
    for t in &mut terms {
        let ax = t.a.spmv(&x_star)?;
        t.c = -0.5 * x_star.dot(&ax) - t.b.dot(&x_star);
    }
    let data = QmpData::new(data.objective.clone(), terms)?;

    // T* = (c(gamma*)/k) I - B(gamma*)' A(gamma*)^{-1} B(gamma*) / 2
    //    = (c(gamma*)/k) I + B(gamma*)' X* / 2.
    let c_star = data.c_of_gamma(&gamma_star)?;
    let mut t_star = DenseMatrix::identity(k);
    t_star.scale(c_star / k as f64);
    let bx = b_star.transpose().matmul(&x_star);
    t_star.axpy(0.5, &bx);
    // symmetrize to wash out CG asymmetry at roundoff level
    let t_star = {
        let mut s = t_star.clone();
        s.axpy(1.0, &t_star.transpose());
        s.scale(0.5);
        s
    };

    let opt = 0.5 * x_star.dot(&x_star);
    Ok((
        data,
        GroundTruth {
            gamma_star,
            x_star,
            t_star,
            opt,
            mu_star: spec.mu_star,
        },
    ))
}

#[derive(Debug, Clone)]
pub struct VerifyCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Re-derive the ground-truth identities from the instance data alone.
pub fn verify(data: &QmpData, gt: &GroundTruth, tol: f64) -> Result<VerifyReport> {
    let n = data.n_minus_k();
    let k = data.k();
    let mut checks = Vec::new();

    // lambda_min(A(gamma*)) = mu_star
    let (lmin, _) = data.extreme_eigs_at(&gt.gamma_star, 1e-10, 0x50_0000)?;
    checks.push(VerifyCheck {
        name: "curvature_at_gamma_star",
        pass: (lmin - gt.mu_star).abs() <= 1e-8,
        detail: format!("lambda_min = {lmin}, mu_star = {}", gt.mu_star),
    });

    // feasibility of X*
    let (_, q_vec) = data.eval_all_q(&gt.x_star)?;
    let max_abs = q_vec.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    checks.push(VerifyCheck {
        name: "feasibility_of_x_star",
        pass: max_abs <= 1e-9,
        detail: format!("max |q_i(X*)| = {max_abs}"),
    });

    // tr(T*) = Opt = ||X*||^2/2
    let tr_t: f64 = (0..k).map(|i| gt.t_star.get(i, i)).sum();
    let half_norm = 0.5 * gt.x_star.dot(&gt.x_star);
    checks.push(VerifyCheck {
        name: "dual_value_matches_opt",
        pass: (tr_t - gt.opt).abs() <= 1e-8 * gt.opt.abs().max(1.0)
            && (half_norm - gt.opt).abs() <= 1e-12 * gt.opt.abs().max(1.0),
        detail: format!("tr(T*) = {tr_t}, opt = {}", gt.opt),
    });

    // stationarity: A(gamma*) X* + B(gamma*) = 0
    let ax = data.apply_a_of_gamma(&gt.gamma_star, &gt.x_star)?;
    let mut res = data.b_of_gamma(&gt.gamma_star)?;
    res.axpy(1.0, &ax);
    let stat = res.norm_fro();
    checks.push(VerifyCheck {
        name: "stationarity_of_x_star",
        pass: stat <= tol,
        detail: format!("||A(g*) X* + B(g*)||_F = {stat}"),
    });

    // slack PSD at (gamma*, T*): lambda_min(Mbar) >= -1e-8
    let b_gamma = data.b_of_gamma(&gt.gamma_star)?;
    let c_gamma = data.c_of_gamma(&gt.gamma_star)?;
    let op = FnOperator::new(n + k, |x: &[f64], y: &mut [f64]| {
        slack_apply(data, &gt.gamma_star, &b_gamma, c_gamma, &gt.t_star, x, y);
    });
    let pair = lanczos_extreme(&op, Extreme::Min, 1e-9, 500 * (n + k) + 2000, 0x51_0000)?;
    checks.push(VerifyCheck {
        name: "slack_psd_at_ground_truth",
        pass: pair.value >= -1e-8,
        detail: format!("lambda_min(Mbar(g*, T*)) = {}", pair.value),
    });

    Ok(VerifyReport { checks })
}
