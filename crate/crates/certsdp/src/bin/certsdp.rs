//! Command-line harness: generate instances, solve them, verify data and
//! solutions, and run benchmark sweeps with CSV output.
//!
//! Exit codes: 0 success (solved / verified), 1 usage or I/O error,
//! 2 budget exhaustion or verification failure.

use std::cell::RefCell;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::rc::Rc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use certsdp::cert::{
    run_certsdp, CertConfig, RadiusMode, RegularityParams, Schedule, SolveReport, SolveStatus,
    TraceEvent,
};
use certsdp::dual::{default_penalty, DualAscent, DualConfig, DualMethod};
use certsdp::gen::{generate, verify, GenSpec, GroundTruth};
use certsdp::io::{
    load_instance, load_solution, save_instance, save_solution, SolutionJson, SolutionMetrics,
};
use certsdp::qmp::QmpData;
use certsdp::DenseMatrix;

#[derive(Parser)]
#[command(name = "certsdp", version, about = "Storage-optimal solver for rank-k exact SDPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance with planted ground truth.
    Generate(GenerateArgs),
    /// Solve an instance file.
    Solve(SolveArgs),
    /// Verify an instance file, or a solution against its instance.
    Verify(VerifyArgs),
    /// Solve every instance in a directory and write a CSV of metrics.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Factor rows n - k of the generated instance.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 10)]
    m: usize,
    #[arg(long = "mu-star", default_value_t = 0.1)]
    mu_star: f64,
    /// Stored entries per sparse constraint block; defaults to n.
    #[arg(long)]
    nnz: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum RadiusArg {
    Practical,
    Theoretical,
}

#[derive(Clone, Copy, ValueEnum)]
enum DualArg {
    Accelegrad,
    Subgradient,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long = "feas-tol", default_value_t = 1e-13)]
    feas_tol: f64,
    #[arg(long = "delta-target", default_value_t = 1e-13)]
    delta_target: f64,
    #[arg(long, default_value_t = 1e-13)]
    eta: f64,
    /// Ball schedule: `double` or `linear:N`.
    #[arg(long, default_value = "linear:250")]
    schedule: String,
    #[arg(long, value_enum, default_value_t = RadiusArg::Practical)]
    radius: RadiusArg,
    #[arg(long, value_enum, default_value_t = DualArg::Subgradient)]
    dual: DualArg,
    /// Dual penalty parameter; defaults to 20 tr(Y*) when ground truth is
    /// present in the instance file.
    #[arg(long)]
    penalty: Option<f64>,
    #[arg(long = "max-seconds")]
    max_seconds: Option<f64>,
    /// JSON-lines trace output path.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Solution JSON output path; defaults to <instance>.solution.json.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Regularity constants mu,L,R_p,R_d,rho enabling certified tolerances
    /// and the theoretical radius, as five comma-separated numbers.
    #[arg(long)]
    regularity: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solution: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of instance JSON files.
    #[arg(long)]
    instances: PathBuf,
    /// Optional JSON file of solver settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

/// Solver settings for bench runs; mirrors the solve flags.
#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct BenchConfig {
    eps: f64,
    feas_tol: f64,
    delta_target: f64,
    eta: f64,
    schedule: String,
    radius: String,
    dual: String,
    penalty: Option<f64>,
    max_seconds: Option<f64>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            eps: 1e-6,
            feas_tol: 1e-13,
            delta_target: 1e-13,
            eta: 1e-13,
            schedule: "linear:250".into(),
            radius: "practical".into(),
            dual: "subgradient".into(),
            penalty: None,
            max_seconds: None,
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            std::process::exit(1);
        }
    };
    let code = match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Bench(a) => cmd_bench(&a),
    };
    std::process::exit(match code {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    });
}

fn cmd_generate(a: &GenerateArgs) -> Result<i32, Box<dyn std::error::Error>> {
    let spec = GenSpec {
        n_minus_k: a.n,
        k: a.k,
        m: a.m,
        mu_star: a.mu_star,
        nnz: a.nnz.unwrap_or(a.n),
        seed: a.seed,
    };
    let (data, gt) = generate(&spec)?;
    save_instance(&a.out, &data, Some(&gt))?;
    println!(
        "generated {}: n-k={} k={} m={} mu*={} nnz={} seed={} opt={:.6e}",
        a.out.display(),
        spec.n_minus_k,
        spec.k,
        spec.m,
        spec.mu_star,
        spec.nnz,
        spec.seed,
        gt.opt
    );
    Ok(0)
}

fn parse_schedule(s: &str) -> Result<Schedule, String> {
    if s == "double" {
        return Ok(Schedule::GuessAndDouble);
    }
    if let Some(n) = s.strip_prefix("linear:") {
        let n: usize = n.parse().map_err(|_| format!("bad schedule {s:?}"))?;
        if n == 0 {
            return Err("linear schedule period must be positive".into());
        }
        return Ok(Schedule::Linear(n));
    }
    Err(format!("bad schedule {s:?}; expected `double` or `linear:N`"))
}

fn parse_regularity(s: &str) -> Result<RegularityParams, Box<dyn std::error::Error>> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()?;
    if parts.len() != 5 {
        return Err("regularity needs five comma-separated numbers mu,L,R_p,R_d,rho".into());
    }
    Ok(RegularityParams::new(
        parts[0], parts[1], parts[2], parts[3], parts[4],
    )?)
}

struct SolveSettings {
    eps: f64,
    feas_tol: f64,
    delta_target: f64,
    eta: f64,
    schedule: Schedule,
    radius: RadiusMode,
    dual: DualMethod,
    penalty: Option<f64>,
    max_seconds: Option<f64>,
    regularity: Option<RegularityParams>,
    trace: Option<PathBuf>,
}

fn run_solve(
    data: &QmpData,
    gt: Option<&GroundTruth>,
    s: &SolveSettings,
) -> Result<SolveReport, Box<dyn std::error::Error>> {
    let penalty = match s.penalty {
        Some(p) => p,
        None => match gt {
            Some(g) => default_penalty(&g.x_star, &DenseMatrix::identity(data.k())),
            None => return Err("no --penalty given and instance has no ground truth".into()),
        },
    };
    let dual_cfg = DualConfig::new(s.dual, penalty);
    let stream = DualAscent::new(data, dual_cfg)?;

    let cfg = CertConfig {
        eps: s.eps,
        delta_target: s.delta_target,
        eta: s.eta,
        feas_tol: s.feas_tol,
        schedule: s.schedule,
        radius_mode: s.radius,
        regularity: s.regularity,
        max_seconds: s.max_seconds,
        ..CertConfig::default()
    };

    let trace_file = match &s.trace {
        Some(p) => Some(Rc::new(RefCell::new(std::io::BufWriter::new(
            std::fs::File::create(p)?,
        )))),
        None => None,
    };

    // Wrap the dual stream so every iterate also lands in the trace.
    struct TracedStream<'a, W: std::io::Write> {
        inner: DualAscent<'a>,
        sink: Option<Rc<RefCell<W>>>,
    }
    impl<W: std::io::Write> Iterator for TracedStream<'_, W> {
        type Item = Vec<f64>;
        fn next(&mut self) -> Option<Vec<f64>> {
            match self.inner.step() {
                Ok(rec) => {
                    if let Some(sink) = &self.sink {
                        let _ = writeln!(
                            sink.borrow_mut(),
                            r#"{{"event":"dual","i":{},"value":{},"lambda_min":{},"step":{}}}"#,
                            rec.i, rec.value, rec.lambda_min, rec.step
                        );
                    }
                    Some(self.inner.state.gamma.clone())
                }
                Err(e) => {
                    self.inner.error = Some(e);
                    None
                }
            }
        }
    }
    let mut traced = TracedStream {
        inner: stream,
        sink: trace_file.clone(),
    };

    let mut trace_cb = trace_file.clone().map(|sink| {
        move |ev: &TraceEvent| {
            let mut w = sink.borrow_mut();
            let _ = match ev {
                TraceEvent::BallAttempt {
                    stream_index,
                    radius,
                    mu,
                    l,
                    gap0,
                } => writeln!(
                    w,
                    r#"{{"event":"ball_attempt","i":{stream_index},"radius":{radius},"mu":{mu},"L":{l},"gap0":{gap0}}}"#
                ),
                TraceEvent::BallResult {
                    stream_index,
                    status,
                    residual,
                    outer_iters,
                } => writeln!(
                    w,
                    r#"{{"event":"ball_result","i":{stream_index},"status":"{status}","residual":{residual},"outer_iters":{outer_iters}}}"#
                ),
                TraceEvent::AgdIter(rec) => writeln!(
                    w,
                    r#"{{"event":"agd","t":{},"q_u":{},"residual":{},"max_abs_q":{},"eps_t":{},"prox_iters":{},"wall_time_sec":{}}}"#,
                    rec.t, rec.q_u, rec.residual, rec.max_abs_q, rec.eps_t,
                    rec.prox_iters, rec.wall_time_sec
                ),
            };
        }
    });

    let report = run_certsdp(
        data,
        &mut traced,
        &cfg,
        gt.map(|g| &g.x_star),
        trace_cb
            .as_mut()
            .map(|f| f as &mut dyn FnMut(&TraceEvent)),
    )?;
    if let Some(e) = traced.inner.error.take() {
        // stream ended early because the eigensolver failed; surface it
        // unless the solve already succeeded
        if report.status != SolveStatus::Solved {
            return Err(Box::new(e));
        }
    }
    if let Some(sink) = trace_file {
        sink.borrow_mut().flush()?;
    }
    Ok(report)
}

fn solution_from_report(report: &SolveReport) -> SolutionJson {
    SolutionJson {
        x: report.x.as_slice().to_vec(),
        gamma: report.gamma.clone(),
        metrics: SolutionMetrics {
            objective: report.objective,
            residual: report.residual,
            max_abs_q: report.max_abs_q,
            time_sec: report.time_total_sec,
            outer_iters: report.outer_iters,
            inner_iters: report.inner_iters,
        },
        status: report.status.as_str().into(),
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<i32, Box<dyn std::error::Error>> {
    let (data, gt) = load_instance(&a.instance)?;
    let settings = SolveSettings {
        eps: a.eps,
        feas_tol: a.feas_tol,
        delta_target: a.delta_target,
        eta: a.eta,
        schedule: parse_schedule(&a.schedule)?,
        radius: match a.radius {
            RadiusArg::Practical => RadiusMode::Practical,
            RadiusArg::Theoretical => RadiusMode::Theoretical,
        },
        dual: match a.dual {
            DualArg::Accelegrad => DualMethod::Accelegrad,
            DualArg::Subgradient => DualMethod::Subgradient,
        },
        penalty: a.penalty,
        max_seconds: a.max_seconds,
        regularity: a.regularity.as_deref().map(parse_regularity).transpose()?,
        trace: a.trace.clone(),
    };
    let report = run_solve(&data, gt.as_ref(), &settings)?;
    let out = a
        .report
        .clone()
        .unwrap_or_else(|| a.instance.with_extension("solution.json"));
    save_solution(&out, &solution_from_report(&report))?;
    println!(
        "status={} objective={:.6e} residual={:.3e} max|q|={:.3e} time={:.2}s \
         dual_iters={} balls={} outer={} inner={}{}",
        report.status.as_str(),
        report.objective,
        report.residual,
        report.max_abs_q,
        report.time_total_sec,
        report.dual_iterates,
        report.balls_attempted,
        report.outer_iters,
        report.inner_iters,
        match report.dist_sq {
            Some(d) => format!(" dist_sq={d:.3e}"),
            None => String::new(),
        }
    );
    Ok(if report.status == SolveStatus::Solved {
        0
    } else {
        2
    })
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32, Box<dyn std::error::Error>> {
    let (data, gt) = load_instance(&a.instance)?;
    match &a.solution {
        None => {
            let gt = gt.ok_or("instance has no ground truth to verify")?;
            let report = verify(&data, &gt, 1e-7)?;
            for c in &report.checks {
                println!(
                    "{}: {} ({})",
                    c.name,
                    if c.pass { "pass" } else { "FAIL" },
                    c.detail
                );
            }
            Ok(if report.all_pass() { 0 } else { 2 })
        }
        Some(sol_path) => {
            let sol = load_solution(sol_path)?;
            let x = DenseMatrix::from_vec(data.n_minus_k(), data.k(), sol.x.clone())?;
            let (q_obj, q_vec) = data.eval_all_q(&x)?;
            let residual = q_vec.iter().map(|v| v * v).sum::<f64>().sqrt();
            let max_abs_q = q_vec.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            print!(
                "objective={q_obj:.6e} residual={residual:.3e} max|q|={max_abs_q:.3e}"
            );
            if let Some(gt) = &gt {
                let d = x.sub(&gt.x_star);
                print!(" dist_sq={:.3e}", d.dot(&d));
            }
            println!();
            let ok = (q_obj - sol.metrics.objective).abs()
                <= 1e-9 * sol.metrics.objective.abs().max(1.0)
                && (residual - sol.metrics.residual).abs()
                    <= 1e-9 * sol.metrics.residual.max(1e-300);
            if !ok {
                eprintln!("solution metrics do not match recomputation");
            }
            Ok(if ok { 0 } else { 2 })
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_bench(a: &BenchArgs) -> Result<i32, Box<dyn std::error::Error>> {
    let cfg: BenchConfig = match &a.config {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        None => BenchConfig::default(),
    };
    let settings = SolveSettings {
        eps: cfg.eps,
        feas_tol: cfg.feas_tol,
        delta_target: cfg.delta_target,
        eta: cfg.eta,
        schedule: parse_schedule(&cfg.schedule)?,
        radius: match cfg.radius.as_str() {
            "practical" => RadiusMode::Practical,
            "theoretical" => RadiusMode::Theoretical,
            other => return Err(format!("bad radius mode {other:?}").into()),
        },
        dual: match cfg.dual.as_str() {
            "subgradient" => DualMethod::Subgradient,
            "accelegrad" => DualMethod::Accelegrad,
            other => return Err(format!("bad dual method {other:?}").into()),
        },
        penalty: cfg.penalty,
        max_seconds: cfg.max_seconds,
        regularity: None,
        trace: None,
    };

    let mut paths: Vec<PathBuf> = std::fs::read_dir(&a.instances)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();

    let mut out = std::io::BufWriter::new(std::fs::File::create(&a.out)?);
    writeln!(out, "instance,n_minus_k,k,m,time_sec,dist_sq,residual,status")?;
    for path in &paths {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        match bench_one(path, &settings) {
            Ok((data, report)) => {
                writeln!(
                    out,
                    "{},{},{},{},{:.3},{},{:e},{}",
                    csv_escape(&name),
                    data.n_minus_k(),
                    data.k(),
                    data.num_constraints(),
                    report.time_total_sec,
                    report
                        .dist_sq
                        .map(|d| format!("{d:e}"))
                        .unwrap_or_default(),
                    report.residual,
                    report.status.as_str()
                )?;
            }
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                writeln!(out, "{},,,,,,,error", csv_escape(&name))?;
            }
        }
    }
    out.flush()?;
    Ok(0)
}

fn bench_one(
    path: &Path,
    settings: &SolveSettings,
) -> Result<(QmpData, SolveReport), Box<dyn std::error::Error>> {
    let (data, gt) = load_instance(path)?;
    let report = run_solve(&data, gt.as_ref(), settings)?;
    Ok((data, report))
}
