//! Dual iterate generation: first-order ascent on the penalized dual
//!
//!   max_{gamma, T} tr(T) + penalty * min(0, lambda_min(Mbar(gamma, T))),
//!
//! where Mbar(gamma, T) = [A(gamma)/2, B(gamma)/2; B(gamma)^T/2,
//! (c(gamma)/k) I_k - T] is the dual slack matrix, applied to vectors by
//! blocks and never materialized. The minimum eigenpair comes from a warm
//! started Lanczos solve; its eigenvector yields a supergradient of the
//! concave penalized objective. Two step rules are available: a decaying
//! step subgradient method and an adaptive accelerated scheme.

use crate::dense::DenseMatrix;
use crate::eig::{lanczos_extreme_from, Extreme};
use crate::error::{Error, Result};
use crate::linop::FnOperator;
use crate::qmp::QmpData;
use crate::rng::Rng;

/// Current dual point plus the cached eigenpair of its slack matrix.
#[derive(Debug, Clone)]
pub struct DualState {
    pub gamma: Vec<f64>,
    /// Dense symmetric k x k block variable.
    pub t: DenseMatrix,
    pub penalty: f64,
    pub last_lambda_min: f64,
    /// Unit eigenvector of the last slack solve, used as a warm start.
    pub last_v: Vec<f64>,
}

impl DualState {
    pub fn new(m: usize, k: usize, penalty: f64) -> Result<Self> {
        if !(penalty > 0.0 && penalty.is_finite()) {
            return Err(Error::InvalidInput(format!("penalty = {penalty}")));
        }
        Ok(Self {
            gamma: vec![0.0; m],
            t: DenseMatrix::zeros(k, k),
            penalty,
            last_lambda_min: f64::NAN,
            last_v: Vec::new(),
        })
    }
}

/// Penalty large enough to make the penalized dual exact: 20 * tr(Y*) with
/// tr(Y*) = ||X*||_F^2 + tr(Z*).
pub fn default_penalty(x_star: &DenseMatrix, zstar: &DenseMatrix) -> f64 {
    let tr_z: f64 = (0..zstar.rows().min(zstar.cols()))
        .map(|i| zstar.get(i, i))
        .sum();
    20.0 * (x_star.dot(x_star) + tr_z)
}

/// Apply the slack matrix Mbar(gamma, T) to a vector of length n, split as
/// x = (x1; x2) with |x1| = n - k:
/// top = A(gamma) x1 / 2 + B(gamma) x2 / 2,
/// bottom = B(gamma)^T x1 / 2 + (c(gamma)/k) x2 - T x2.
/// `b_gamma` and `c_gamma` are the aggregates at gamma, precomputed by the
/// caller so repeated applications cost one sparse pass each.
pub fn slack_apply(
    data: &QmpData,
    gamma: &[f64],
    b_gamma: &DenseMatrix,
    c_gamma: f64,
    t: &DenseMatrix,
    x: &[f64],
    y: &mut [f64],
) {
    let nk = data.n_minus_k();
    let k = data.k();
    debug_assert_eq!(x.len(), nk + k);
    debug_assert_eq!(y.len(), nk + k);
    let (x1, x2) = x.split_at(nk);
    // top: A(gamma) x1 / 2
    {
        let (y1, _) = y.split_at_mut(nk);
        data.apply_a_of_gamma_vec(gamma, x1, y1);
        for v in y1.iter_mut() {
            *v *= 0.5;
        }
        // + B(gamma) x2 / 2
        for r in 0..nk {
            let mut acc = 0.0;
            for c in 0..k {
                acc += b_gamma.get(r, c) * x2[c];
            }
            y1[r] += 0.5 * acc;
        }
    }
    // bottom: B(gamma)^T x1 / 2 + (c(gamma)/k) x2 - T x2
    let scale = c_gamma / k as f64;
    for c in 0..k {
        let mut acc = 0.0;
        for r in 0..nk {
            acc += b_gamma.get(r, c) * x1[r];
        }
        let mut tv = 0.0;
        for j in 0..k {
            tv += t.get(c, j) * x2[j];
        }
        y[nk + c] = 0.5 * acc + scale * x2[c] - tv;
    }
}

/// Penalized dual value and a supergradient at the state's (gamma, T).
/// Returns (value, g_gamma, g_T) and refreshes the cached eigenpair.
pub fn penalized_dual_value_and_supergradient(
    data: &QmpData,
    state: &mut DualState,
    eig_tol: f64,
    eig_max_iter: usize,
) -> Result<(f64, Vec<f64>, DenseMatrix)> {
    let nk = data.n_minus_k();
    let k = data.k();
    let m = data.num_constraints();
    if state.gamma.len() != m || state.t.rows() != k || state.t.cols() != k {
        return Err(Error::DimensionMismatch(format!(
            "dual state shapes (m = {}, T = {}x{}) do not match the instance",
            state.gamma.len(),
            state.t.rows(),
            state.t.cols()
        )));
    }
    let n = nk + k;
    let b_gamma = data.b_of_gamma(&state.gamma)?;
    let c_gamma = data.c_of_gamma(&state.gamma)?;
    let op = FnOperator::new(n, |x: &[f64], y: &mut [f64]| {
        slack_apply(data, &state.gamma, &b_gamma, c_gamma, &state.t, x, y);
    });
    let start = if state.last_v.len() == n {
        state.last_v.clone()
    } else {
        Rng::new(0x40_0000 ^ n as u64).unit_vector(n)
    };
    let pair = lanczos_extreme_from(&op, Extreme::Min, eig_tol, eig_max_iter, start)?;
    let lambda_min = pair.value;
    let v = pair.vector;

    let tr_t: f64 = (0..k).map(|i| state.t.get(i, i)).sum();
    let value = tr_t + state.penalty * lambda_min.min(0.0);

    let (g_gamma, g_t) = if lambda_min >= 0.0 {
        (vec![0.0; m], DenseMatrix::identity(k))
    } else {
        let (v1, v2) = v.split_at(nk);
        let v2_norm_sq: f64 = v2.iter().map(|x| x * x).sum();
        let mut g_gamma = Vec::with_capacity(m);
        let mut av1 = vec![0.0; nk];
        for term in &data.constraints {
            // v1' A_i v1 / 2 + v1' B_i v2 + (c_i / k) ||v2||^2
            av1.fill(0.0);
            term.a.apply_add(1.0, v1, &mut av1);
            let quad: f64 = v1.iter().zip(&av1).map(|(a, b)| a * b).sum();
            let mut cross = 0.0;
            for r in 0..nk {
                for c in 0..k {
                    cross += v1[r] * term.b.get(r, c) * v2[c];
                }
            }
            g_gamma.push(state.penalty * (0.5 * quad + cross + term.c / k as f64 * v2_norm_sq));
        }
        let mut g_t = DenseMatrix::identity(k);
        for r in 0..k {
            for c in 0..k {
                let val = g_t.get(r, c) - state.penalty * v2[r] * v2[c];
                g_t.set(r, c, val);
            }
        }
        (g_gamma, g_t)
    };

    state.last_lambda_min = lambda_min;
    state.last_v = v;
    Ok((value, g_gamma, g_t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualMethod {
    Subgradient,
    Accelegrad,
}

#[derive(Debug, Clone)]
pub struct DualConfig {
    pub method: DualMethod,
    pub penalty: f64,
    /// Lanczos tolerance for the slack eigensolve.
    pub eig_tol: f64,
    pub eig_max_iter: usize,
    /// First-move length of the subgradient rule: step_i = c/sqrt(i) with
    /// c = step_scale / ||g_1||.
    pub step_scale: f64,
    /// Diameter guess for the adaptive accelerated rule.
    pub diameter: f64,
}

impl DualConfig {
    pub fn new(method: DualMethod, penalty: f64) -> Self {
        Self {
            method,
            penalty,
            eig_tol: 1e-10,
            eig_max_iter: 500_000,
            step_scale: 1.0,
            diameter: 10.0,
        }
    }
}

/// Trace payload for one dual step.
#[derive(Debug, Clone)]
pub struct DualTraceRecord {
    pub i: usize,
    pub value: f64,
    pub lambda_min: f64,
    pub step: f64,
}

/// Accelerated-rule bookkeeping over the stacked variable (gamma, T).
struct AccelState {
    z_gamma: Vec<f64>,
    z_t: DenseMatrix,
    y_gamma: Vec<f64>,
    y_t: DenseMatrix,
    grad_sq_sum: f64,
}

/// The dual iterate stream: each `step` performs one eigensolve and one
/// ascent update and reports the trace record. The `Iterator` impl yields
/// the post-step gamma; a failed eigensolve ends the stream and parks the
/// error in `self.error`.
pub struct DualAscent<'a> {
    data: &'a QmpData,
    cfg: DualConfig,
    pub state: DualState,
    i: usize,
    calibrated_c: Option<f64>,
    accel: Option<AccelState>,
    pub error: Option<Error>,
    /// Best penalized dual value seen so far.
    pub best_value: f64,
}

impl<'a> DualAscent<'a> {
    pub fn new(data: &'a QmpData, cfg: DualConfig) -> Result<Self> {
        let state = DualState::new(data.num_constraints(), data.k(), cfg.penalty)?;
        Ok(Self {
            data,
            cfg,
            state,
            i: 0,
            calibrated_c: None,
            accel: None,
            error: None,
            best_value: f64::NEG_INFINITY,
        })
    }

    pub fn step(&mut self) -> Result<DualTraceRecord> {
        self.i += 1;
        let i = self.i;
        match self.cfg.method {
            DualMethod::Subgradient => {
                let (value, g_gamma, g_t) = penalized_dual_value_and_supergradient(
                    self.data,
                    &mut self.state,
                    self.cfg.eig_tol,
                    self.cfg.eig_max_iter,
                )?;
                self.best_value = self.best_value.max(value);
                let g_norm = grad_norm(&g_gamma, &g_t);
                let c = *self
                    .calibrated_c
                    .get_or_insert(if g_norm > 0.0 {
                        self.cfg.step_scale / g_norm
                    } else {
                        self.cfg.step_scale
                    });
                let step = c / (i as f64).sqrt();
                axpy_pair(&mut self.state.gamma, &mut self.state.t, step, &g_gamma, &g_t);
                Ok(DualTraceRecord {
                    i,
                    value,
                    lambda_min: self.state.last_lambda_min,
                    step,
                })
            }
            DualMethod::Accelegrad => {
                let k = self.data.k();
                if self.accel.is_none() {
                    self.accel = Some(AccelState {
                        z_gamma: self.state.gamma.clone(),
                        z_t: self.state.t.clone(),
                        y_gamma: self.state.gamma.clone(),
                        y_t: self.state.t.clone(),
                        grad_sq_sum: 0.0,
                    });
                }
                // alpha_t per the adaptive accelerated rule: 1 for the first
                // few steps, then t/4.
                let t_idx = i - 1;
                let alpha = if t_idx <= 2 { 1.0 } else { t_idx as f64 / 4.0 };
                let tau = 1.0 / alpha;

                // query point x = tau z + (1 - tau) y
                let acc = self.accel.as_mut().unwrap();
                let mut x_gamma = vec![0.0; self.state.gamma.len()];
                for (xg, (zg, yg)) in x_gamma
                    .iter_mut()
                    .zip(acc.z_gamma.iter().zip(&acc.y_gamma))
                {
                    *xg = tau * zg + (1.0 - tau) * yg;
                }
                let mut x_t = DenseMatrix::zeros(k, k);
                for r in 0..k {
                    for c in 0..k {
                        x_t.set(r, c, tau * acc.z_t.get(r, c) + (1.0 - tau) * acc.y_t.get(r, c));
                    }
                }
                self.state.gamma = x_gamma;
                self.state.t = x_t;
                let (value, g_gamma, g_t) = penalized_dual_value_and_supergradient(
                    self.data,
                    &mut self.state,
                    self.cfg.eig_tol,
                    self.cfg.eig_max_iter,
                )?;
                self.best_value = self.best_value.max(value);
                let acc = self.accel.as_mut().unwrap();
                let g_sq = grad_norm(&g_gamma, &g_t).powi(2);
                acc.grad_sq_sum += alpha * alpha * g_sq;
                let eta = 2.0 * self.cfg.diameter / (1e-12 + acc.grad_sq_sum.sqrt());

                // ascent: z += alpha * eta * g; y = x + eta * g
                axpy_pair(&mut acc.z_gamma, &mut acc.z_t, alpha * eta, &g_gamma, &g_t);
                acc.y_gamma = self.state.gamma.clone();
                acc.y_t = self.state.t.clone();
                axpy_pair(&mut acc.y_gamma, &mut acc.y_t, eta, &g_gamma, &g_t);

                // export y as the iterate
                self.state.gamma = acc.y_gamma.clone();
                self.state.t = acc.y_t.clone();
                Ok(DualTraceRecord {
                    i,
                    value,
                    lambda_min: self.state.last_lambda_min,
                    step: eta,
                })
            }
        }
    }
}

impl Iterator for DualAscent<'_> {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        if self.error.is_some() {
            return None;
        }
        match self.step() {
            Ok(_) => Some(self.state.gamma.clone()),
            Err(e) => {
                self.error = Some(e);
                None
            }
        }
    }
}

fn grad_norm(g_gamma: &[f64], g_t: &DenseMatrix) -> f64 {
    let a: f64 = g_gamma.iter().map(|x| x * x).sum();
    (a + g_t.dot(g_t)).sqrt()
}

fn axpy_pair(gamma: &mut [f64], t: &mut DenseMatrix, step: f64, g_gamma: &[f64], g_t: &DenseMatrix) {
    for (g, d) in gamma.iter_mut().zip(g_gamma) {
        *g += step * d;
    }
    t.axpy(step, g_t);
}
