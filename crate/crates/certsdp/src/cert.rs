//! The certificate-driven driver: consume a stream of dual vectors, build
//! candidate certificate balls around scheduled iterates, run the
//! accelerated loop inside each certified ball, and accept the first
//! recovered factor whose constraint residual is small enough. Memory use
//! stays O(m + nk) throughout.

use std::time::Instant;

use crate::agd::{
    estimate_gap0, run_cautious_agd, AbortPolicy, AgdBudget, AgdStatus, IterRecord, StepParams,
};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::qmp::{Ball, QmpData};

/// Problem regularity constants; enable the theoretical ball radius and the
/// accuracy-to-tolerance conversion.
#[derive(Debug, Clone, Copy)]
pub struct RegularityParams {
    pub mu_hat: f64,
    pub l_hat: f64,
    /// Primal radius bound R_p >= max(1, ||X*||_F).
    pub r_p: f64,
    /// Dual radius bound R_d >= max(1, ||gamma*||).
    pub r_d: f64,
    /// Bound on ||sum_i u_i A_i||_2 over unit u.
    pub rho_hat: f64,
}

impl RegularityParams {
    pub fn new(mu_hat: f64, l_hat: f64, r_p: f64, r_d: f64, rho_hat: f64) -> Result<Self> {
        if !(mu_hat > 0.0 && l_hat >= mu_hat && r_p > 0.0 && r_d >= 1.0 && rho_hat > 0.0) {
            return Err(Error::InvalidInput(format!(
                "regularity params out of range: mu={mu_hat}, L={l_hat}, \
                 R_p={r_p}, R_d={r_d}, rho={rho_hat}"
            )));
        }
        if mu_hat / r_d > rho_hat * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "regularity params need mu/R_d <= rho, got {} > {rho_hat}",
                mu_hat / r_d
            )));
        }
        Ok(Self {
            mu_hat,
            l_hat,
            r_p,
            r_d,
            rho_hat,
        })
    }
}

/// Which dual iterates get a ball attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// Indices 1, 2, 4, 8, ...
    GuessAndDouble,
    /// Indices N, 2N, 3N, ...
    Linear(usize),
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Linear(250)
    }
}

impl Schedule {
    /// Whether the 1-based stream index is scheduled for a ball attempt.
    pub fn is_scheduled(&self, index: usize) -> bool {
        match self {
            Schedule::GuessAndDouble => index.is_power_of_two(),
            Schedule::Linear(n) => *n > 0 && index % n == 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusMode {
    Practical,
    Theoretical,
}

#[derive(Debug, Clone)]
pub struct CertConfig {
    /// Target accuracy for the tolerance conversion when regularity
    /// parameters are present.
    pub eps: f64,
    /// Optimality target handed to the inner accelerated loop; overridden
    /// by the eps-derived value when regularity parameters are present.
    pub delta_target: f64,
    /// Acceptance threshold on ||q_vec(X)||_2; overridden like delta.
    pub eta: f64,
    /// Per-constraint feasibility tolerance inside the accelerated loop.
    pub feas_tol: f64,
    pub schedule: Schedule,
    pub radius_mode: RadiusMode,
    pub regularity: Option<RegularityParams>,
    pub abort: AbortPolicy,
    /// Wall-clock budget in seconds; None = unbounded.
    pub max_seconds: Option<f64>,
    /// Cap on dual iterates consumed.
    pub max_dual_iters: usize,
    /// Relative tolerance for the CG solve inside the gap estimate.
    pub cg_tol: f64,
}

impl Default for CertConfig {
    fn default() -> Self {
        Self {
            eps: 1e-6,
            delta_target: 1e-13,
            eta: 1e-13,
            feas_tol: 1e-13,
            schedule: Schedule::default(),
            radius_mode: RadiusMode::Practical,
            regularity: None,
            abort: AbortPolicy::default(),
            max_seconds: None,
            max_dual_iters: 1_000_000,
            cg_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Solved,
    BudgetExhausted,
    InfeasibleStream,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Solved => "solved",
            SolveStatus::BudgetExhausted => "budget_exhausted",
            SolveStatus::InfeasibleStream => "infeasible_stream",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub x: DenseMatrix,
    pub gamma: Vec<f64>,
    pub objective: f64,
    /// ||q_vec(X)||_2.
    pub residual: f64,
    pub max_abs_q: f64,
    pub dual_iterates: usize,
    pub balls_attempted: usize,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub time_total_sec: f64,
    pub time_agd_sec: f64,
    pub status: SolveStatus,
    /// ||X - X*||_F^2 when a reference factor is supplied.
    pub dist_sq: Option<f64>,
    /// Whether the eps-optimality guarantee applies (regularity supplied).
    pub certified: bool,
}

/// Events emitted during a solve for external logging.
#[derive(Debug, Clone)]
pub enum TraceEvent {
    BallAttempt {
        stream_index: usize,
        radius: f64,
        mu: f64,
        l: f64,
        gap0: f64,
    },
    BallResult {
        stream_index: usize,
        status: &'static str,
        residual: f64,
        outer_iters: usize,
    },
    AgdIter(IterRecord),
}

/// Largest ball at gamma certified by the extreme eigenvalues of A(gamma):
/// r = (1/rho) * lmax*lmin/(lmax+lmin) when lmin > 0, else 0. At this
/// radius both lmin - r*rho > 0 and the resulting condition number is
/// balanced between the two ends of the spectrum.
pub fn radius_practical(data: &QmpData, gamma: &[f64], rho_hat: f64) -> Result<f64> {
    if !(rho_hat > 0.0) {
        return Err(Error::InvalidInput(format!("rho_hat = {rho_hat}")));
    }
    let (lmin, lmax) = data.extreme_eigs_at(gamma, 1e-10, 0x30_0000)?;
    if lmin <= 1e-10 {
        return Ok(0.0);
    }
    Ok(lmax * lmin / ((lmax + lmin) * rho_hat))
}

/// Radius prescribed by the regularity constants: the minimum of five
/// safeguards keeping the ball inside the region where curvature, dual
/// norm, and primal norm bounds all hold. May be <= 0, in which case the
/// caller skips this iterate.
pub fn radius_theoretical(data: &QmpData, gamma: &[f64], p: &RegularityParams) -> Result<f64> {
    let (lmin, lmax) = data.extreme_eigs_at(gamma, 1e-10, 0x31_0000)?;
    let gamma_norm = gamma.iter().map(|x| x * x).sum::<f64>().sqrt();
    let b_norm = data.b_of_gamma(gamma)?.norm_fro();
    let candidates = [
        p.mu_hat / (2.0 * p.rho_hat),
        2.0 * p.r_d - gamma_norm,
        (lmin - p.mu_hat / 2.0) / p.rho_hat,
        (2.0 * p.l_hat - lmax) / p.rho_hat,
        (2.0 * p.l_hat * p.r_p - b_norm) / (p.rho_hat * p.r_p),
    ];
    Ok(candidates.into_iter().fold(f64::INFINITY, f64::min))
}

/// Inner tolerances achieving eps-optimality and eps-feasibility of the
/// implicit lifted solution: delta = mu*eps^2/(9 rho R_d R_p)^2 and
/// eta = 4 eps / (9 R_d), valid for 0 < eps <= 9 rho R_d R_p^2.
pub fn tolerances_from_eps(eps: f64, p: &RegularityParams) -> Result<(f64, f64)> {
    let limit = 9.0 * p.rho_hat * p.r_d * p.r_p * p.r_p;
    if !(eps > 0.0 && eps <= limit) {
        return Err(Error::InvalidInput(format!(
            "eps = {eps} outside (0, {limit}]"
        )));
    }
    let denom = 9.0 * p.rho_hat * p.r_d * p.r_p;
    let delta = p.mu_hat * eps * eps / (denom * denom);
    let eta = 4.0 * eps / (9.0 * p.r_d);
    Ok((delta, eta))
}

pub fn run_certsdp(
    data: &QmpData,
    stream: &mut dyn Iterator<Item = Vec<f64>>,
    cfg: &CertConfig,
    x_star: Option<&DenseMatrix>,
    mut trace: Option<&mut dyn FnMut(&TraceEvent)>,
) -> Result<SolveReport> {
    let start = Instant::now();
    let deadline = cfg.max_seconds.map(|s| start + std::time::Duration::from_secs_f64(s));
    let m = data.num_constraints();

    let (delta_target, eta) = match &cfg.regularity {
        Some(p) => tolerances_from_eps(cfg.eps, p)?,
        None => (cfg.delta_target, cfg.eta),
    };
    let rho_hat = data.rho_hat()?;

    let mut balls_attempted = 0usize;
    let mut dual_iterates = 0usize;
    let mut outer_iters = 0usize;
    let mut inner_iters = 0usize;
    let mut time_agd = 0.0f64;

    // Warm starts threaded across ball attempts.
    let mut x_warm = DenseMatrix::zeros(data.n_minus_k(), data.k());
    let mut gamma_warm = vec![0.0; m];

    // Best candidate so far, for partial reports.
    let mut best_x = x_warm.clone();
    let mut best_gamma = vec![0.0; m];
    let mut best_residual = f64::INFINITY;

    let finish = |status: SolveStatus,
                  x: DenseMatrix,
                  gamma: Vec<f64>,
                  dual_iterates: usize,
                  balls_attempted: usize,
                  outer_iters: usize,
                  inner_iters: usize,
                  time_agd: f64|
     -> Result<SolveReport> {
        let (q_obj, q_vec) = data.eval_all_q(&x)?;
        let residual = q_vec.iter().map(|v| v * v).sum::<f64>().sqrt();
        let max_abs_q = q_vec.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let dist_sq = x_star.map(|xs| {
            let d = x.sub(xs);
            d.dot(&d)
        });
        Ok(SolveReport {
            objective: q_obj,
            residual,
            max_abs_q,
            x,
            gamma,
            dual_iterates,
            balls_attempted,
            outer_iters,
            inner_iters,
            time_total_sec: start.elapsed().as_secs_f64(),
            time_agd_sec: time_agd,
            status,
            dist_sq,
            certified: cfg.regularity.is_some(),
        })
    };

    let over_budget = |dual_iterates: usize| -> bool {
        dual_iterates >= cfg.max_dual_iters
            || deadline.is_some_and(|d| Instant::now() >= d)
    };

    loop {
        if over_budget(dual_iterates) {
            return finish(
                SolveStatus::BudgetExhausted,
                best_x,
                best_gamma,
                dual_iterates,
                balls_attempted,
                outer_iters,
                inner_iters,
                time_agd,
            );
        }
        let gamma = match stream.next() {
            Some(g) => g,
            None => {
                return finish(
                    SolveStatus::InfeasibleStream,
                    best_x,
                    best_gamma,
                    dual_iterates,
                    balls_attempted,
                    outer_iters,
                    inner_iters,
                    time_agd,
                )
            }
        };
        dual_iterates += 1;
        if gamma.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "dual stream produced a vector of length {}, expected {m}",
                gamma.len()
            )));
        }
        if !cfg.schedule.is_scheduled(dual_iterates) {
            continue;
        }

        let radius = match cfg.radius_mode {
            RadiusMode::Practical => radius_practical(data, &gamma, rho_hat)?,
            RadiusMode::Theoretical => {
                let p = cfg.regularity.as_ref().ok_or_else(|| {
                    Error::InvalidInput(
                        "theoretical radius mode requires regularity parameters".into(),
                    )
                })?;
                radius_theoretical(data, &gamma, p)?
            }
        };
        if radius <= 0.0 {
            continue;
        }
        let ball = Ball::new(gamma.clone(), radius)?;
        let (mu, l) = match data.curvature_on_ball(&ball, rho_hat) {
            Ok(pair) => pair,
            Err(Error::BallNotCertified { .. }) => continue,
            Err(e) => return Err(e),
        };
        let params = StepParams::new(mu, l)?;
        let gap0 = estimate_gap0(data, &ball, &x_warm, cfg.cg_tol)?;
        balls_attempted += 1;
        if let Some(cb) = trace.as_deref_mut() {
            cb(&TraceEvent::BallAttempt {
                stream_index: dual_iterates,
                radius,
                mu,
                l,
                gap0,
            });
        }

        let budget = AgdBudget {
            max_outer: 10_000_000,
            deadline,
        };
        let mut agd_trace_cb = trace.as_deref_mut().map(|cb| {
            move |rec: &IterRecord| cb(&TraceEvent::AgdIter(rec.clone()))
        });
        let agd_start = Instant::now();
        let outcome = run_cautious_agd(
            data,
            &ball,
            x_warm.clone(),
            gamma_warm.clone(),
            params,
            gap0,
            delta_target,
            cfg.feas_tol,
            cfg.abort,
            budget,
            agd_trace_cb
                .as_mut()
                .map(|f| f as &mut dyn FnMut(&IterRecord)),
        )?;
        drop(agd_trace_cb);
        time_agd += agd_start.elapsed().as_secs_f64();
        outer_iters += outcome.state.t;
        inner_iters += outcome
            .state
            .history
            .iter()
            .map(|r| r.prox_iters)
            .sum::<usize>();

        // Acceptance: eta-feasibility of the recovered factor. Check both
        // the final iterate and the best-Q_U iterate.
        let mut accepted: Option<(DenseMatrix, f64)> = None;
        for cand in [&outcome.state.x, &outcome.x_best] {
            let (_, q_vec) = data.eval_all_q(cand)?;
            let res = q_vec.iter().map(|v| v * v).sum::<f64>().sqrt();
            if res < best_residual {
                best_residual = res;
                best_x = (*cand).clone();
                best_gamma = outcome.state.gamma_warm.clone();
            }
            if res <= eta && accepted.is_none() {
                accepted = Some(((*cand).clone(), res));
            }
        }
        if let Some(cb) = trace.as_deref_mut() {
            cb(&TraceEvent::BallResult {
                stream_index: dual_iterates,
                status: match outcome.status {
                    AgdStatus::Optimal => "optimal",
                    AgdStatus::AbortedStagnation => "aborted_stagnation",
                    AgdStatus::BudgetExhausted => "budget_exhausted",
                },
                residual: best_residual,
                outer_iters: outcome.state.t,
            });
        }
        if let Some((x, _)) = accepted {
            return finish(
                SolveStatus::Solved,
                x,
                outcome.state.gamma_warm,
                dual_iterates,
                balls_attempted,
                outer_iters,
                inner_iters,
                time_agd,
            );
        }

        // Warm-start the next attempt from this one.
        x_warm = outcome.state.x;
        gamma_warm = outcome.state.gamma_warm;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{solve_sym, sym_eigen};
    use crate::rng::Rng;
    use crate::testutil::random_spd_qmp;

    fn params() -> RegularityParams {
        RegularityParams::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn schedule_membership() {
        let g = Schedule::GuessAndDouble;
        let hits: Vec<usize> = (1..=20).filter(|i| g.is_scheduled(*i)).collect();
        assert_eq!(hits, vec![1, 2, 4, 8, 16]);
        let l = Schedule::Linear(5);
        let hits: Vec<usize> = (1..=20).filter(|i| l.is_scheduled(*i)).collect();
        assert_eq!(hits, vec![5, 10, 15, 20]);
    }

    #[test]
    fn regularity_invariants_enforced() {
        assert!(RegularityParams::new(1.0, 0.5, 1.0, 1.0, 1.0).is_err()); // mu > L
        assert!(RegularityParams::new(1.0, 1.0, 1.0, 0.5, 1.0).is_err()); // R_d < 1
        assert!(RegularityParams::new(2.0, 2.0, 1.0, 1.0, 1.0).is_err()); // mu/R_d > rho
        assert!(RegularityParams::new(1.0, 2.0, 1.0, 2.0, 1.0).is_ok());
    }

    #[test]
    fn radius_practical_identity_and_indefinite() {
        // A(gamma) = I at gamma = 0 for an instance with identity objective
        // block and no constraint contribution at the center.
        let id = crate::sparse::SparseSymMatrix::identity(20);
        let term = crate::qmp::QmpTerm {
            a: id.clone(),
            b: DenseMatrix::zeros(20, 2),
            c: 0.0,
        };
        let mut neg = id.clone();
        neg.scale(-3.0);
        let con = crate::qmp::QmpTerm {
            a: neg,
            b: DenseMatrix::zeros(20, 2),
            c: 0.0,
        };
        let data = QmpData::new(term, vec![con]).unwrap();
        let r = radius_practical(&data, &[0.0], 1.0).unwrap();
        assert!((r - 0.5).abs() < 1e-8, "r = {r}");
        // gamma = 1: A = I - 3I = -2I, indefinite
        let r = radius_practical(&data, &[1.0], 1.0).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn radius_practical_matches_dense_formula() {
        let mut rng = Rng::new(60);
        let data = random_spd_qmp(40, 2, 3, 2.0, &mut rng);
        let gamma: Vec<f64> = (0..3).map(|_| 0.1 * rng.normal()).collect();
        let rho = data.rho_hat().unwrap();
        let r = radius_practical(&data, &gamma, rho).unwrap();
        let mut agg = data.objective.a.to_dense();
        for (g, t) in gamma.iter().zip(&data.constraints) {
            agg.axpy(*g, &t.a.to_dense());
        }
        let (vals, _) = sym_eigen(&agg);
        let (lmin, lmax) = (vals[0], vals[vals.len() - 1]);
        let expect = lmax * lmin / ((lmax + lmin) * rho);
        assert!((r - expect).abs() < 1e-6 * expect.abs().max(1.0));
    }

    #[test]
    fn radius_theoretical_kill_switches() {
        let mut rng = Rng::new(61);
        let data = random_spd_qmp(20, 2, 2, 2.0, &mut rng);
        let p = RegularityParams::new(0.5, 50.0, 10.0, 1.0, 5.0).unwrap();
        // ||gamma|| = 2 R_d: second term <= 0
        let gamma = vec![2.0 * p.r_d, 0.0];
        let r = radius_theoretical(&data, &gamma, &p).unwrap();
        assert!(r <= 0.0);
        // lmin(A(gamma)) <= mu/2 forces the third term <= 0
        let p2 = RegularityParams::new(10.0, 50.0, 10.0, 2.0, 5.0).unwrap();
        let r = radius_theoretical(&data, &[0.0, 0.0], &p2).unwrap();
        assert!(r <= 0.0);
    }

    #[test]
    fn tolerance_conversion_values() {
        let p = params();
        let (delta, eta) = tolerances_from_eps(1.0, &p).unwrap();
        assert!((delta - 1.0 / 81.0).abs() < 1e-16);
        assert!((eta - 4.0 / 9.0).abs() < 1e-16);
        // homogeneity: doubling eps quadruples delta and doubles eta
        let (d2, e2) = tolerances_from_eps(2.0, &p).unwrap();
        assert!((d2 - 4.0 * delta).abs() < 1e-15);
        assert!((e2 - 2.0 * eta).abs() < 1e-15);
        // boundary: eps = 9 rho R_d R_p^2 gives delta = mu R_p^2
        let (d3, _) = tolerances_from_eps(9.0, &p).unwrap();
        assert!((d3 - 1.0).abs() < 1e-12);
        assert!(tolerances_from_eps(9.0 + 1e-9, &p).is_err());
        assert!(tolerances_from_eps(0.0, &p).is_err());
    }

    #[test]
    fn constant_stream_at_good_gamma_solves() {
        let mut rng = Rng::new(62);
        let data = random_spd_qmp(25, 2, 3, 3.0, &mut rng);
        // Make a feasible target: pick gamma_t, X_t = -A(gamma_t)^{-1}B(gamma_t),
        // then shift the c_i so q_i(X_t) = 0, mirroring how exact instances
        // are calibrated.
        let gamma_t: Vec<f64> = (0..3).map(|_| 0.05 * rng.normal()).collect();
        let mut agg = data.objective.a.to_dense();
        for (g, t) in gamma_t.iter().zip(&data.constraints) {
            agg.axpy(*g, &t.a.to_dense());
        }
        let b = data.b_of_gamma(&gamma_t).unwrap();
        let mut xt = solve_sym(&agg, &b).unwrap();
        xt.scale(-1.0);
        let (_, q_vec) = data.eval_all_q(&xt).unwrap();
        let mut terms = data.constraints.clone();
        for (t, q) in terms.iter_mut().zip(&q_vec) {
            t.c -= q;
        }
        let data = QmpData::new(data.objective.clone(), terms).unwrap();

        let mut stream = std::iter::repeat(gamma_t.clone());
        let cfg = CertConfig {
            schedule: Schedule::Linear(1),
            delta_target: 1e-16,
            eta: 1e-9,
            feas_tol: 1e-10,
            max_dual_iters: 50,
            ..CertConfig::default()
        };
        let report = run_certsdp(&data, &mut stream, &cfg, Some(&xt), None).unwrap();
        assert_eq!(report.status, SolveStatus::Solved);
        assert!(report.residual <= 1e-9);
        assert!(report.dist_sq.unwrap() < 1e-12, "dist {}", report.dist_sq.unwrap());
        assert!(report.balls_attempted >= 1);
    }

    #[test]
    fn indefinite_stream_exhausts_budget_with_no_balls() {
        let mut rng = Rng::new(63);
        let data = random_spd_qmp(15, 2, 2, 2.0, &mut rng);
        // Push gamma far enough that A(gamma) is indefinite: scale the
        // first constraint direction hard.
        let bad = vec![-1e6, 0.0];
        let mut stream = std::iter::repeat(bad);
        let cfg = CertConfig {
            schedule: Schedule::Linear(1),
            max_dual_iters: 20,
            ..CertConfig::default()
        };
        let report = run_certsdp(&data, &mut stream, &cfg, None, None).unwrap();
        assert_eq!(report.status, SolveStatus::BudgetExhausted);
        assert_eq!(report.balls_attempted, 0);
        assert_eq!(report.dual_iterates, 20);
    }

    #[test]
    fn finite_stream_reports_infeasible() {
        let mut rng = Rng::new(64);
        let data = random_spd_qmp(10, 2, 2, 2.0, &mut rng);
        let mut stream = vec![vec![-1e6, 0.0]; 3].into_iter();
        let cfg = CertConfig {
            schedule: Schedule::Linear(1),
            ..CertConfig::default()
        };
        let report = run_certsdp(&data, &mut stream, &cfg, None, None).unwrap();
        assert_eq!(report.status, SolveStatus::InfeasibleStream);
    }

    #[test]
    fn zero_second_budget_exits_immediately() {
        let mut rng = Rng::new(65);
        let data = random_spd_qmp(10, 2, 2, 2.0, &mut rng);
        let mut stream = std::iter::repeat(vec![0.0, 0.0]);
        let cfg = CertConfig {
            max_seconds: Some(0.0),
            ..CertConfig::default()
        };
        let report = run_certsdp(&data, &mut stream, &cfg, None, None).unwrap();
        assert_eq!(report.status, SolveStatus::BudgetExhausted);
        assert_eq!(report.dual_iterates, 0);
    }

    #[test]
    fn guess_and_double_attempts_only_powers_of_two() {
        let mut rng = Rng::new(66);
        let data = random_spd_qmp(12, 2, 2, 3.0, &mut rng);
        let mut stream = std::iter::repeat(vec![0.01, -0.01]);
        let mut attempts = Vec::new();
        let mut cb = |ev: &TraceEvent| {
            if let TraceEvent::BallAttempt { stream_index, .. } = ev {
                attempts.push(*stream_index);
            }
        };
        let cfg = CertConfig {
            schedule: Schedule::GuessAndDouble,
            max_dual_iters: 40,
            // unreachable targets so no acceptance interferes
            delta_target: 1e-300,
            eta: 1e-300,
            feas_tol: 1e-300,
            ..CertConfig::default()
        };
        let _ = run_certsdp(&data, &mut stream, &cfg, None, Some(&mut cb)).unwrap();
        assert!(!attempts.is_empty());
        assert!(attempts.iter().all(|i| i.is_power_of_two()), "{attempts:?}");
    }

    #[test]
    fn unused_x_field_compiles() {
        // silence dead-code analysis for report fields exercised by the CLI
        let r = SolveStatus::Solved;
        assert_eq!(r.as_str(), "solved");
    }
}
