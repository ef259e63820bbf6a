//! C ABI for the certsdp solver. Instances and solve reports are opaque
//! handles; every fallible call returns a `CertsdpStatus` code and the last
//! error message is retrievable per thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use certsdp::cert::{run_certsdp, CertConfig, Schedule, SolveReport, SolveStatus};
use certsdp::dual::{default_penalty, DualAscent, DualConfig, DualMethod};
use certsdp::gen::{generate, GenSpec, GroundTruth};
use certsdp::io::{load_instance, save_instance};
use certsdp::qmp::QmpData;
use certsdp::DenseMatrix;

/// Result codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum CertsdpStatus {
    Ok = 0,
    InvalidArgument = 1,
    IoError = 2,
    NumericalError = 3,
    BudgetExhausted = 4,
}

/// Opaque instance handle.
pub struct CertsdpInstance {
    data: QmpData,
    ground_truth: Option<GroundTruth>,
}

/// Opaque solve-report handle.
pub struct CertsdpReport {
    report: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn classify(err: &certsdp::Error) -> CertsdpStatus {
    use certsdp::Error as E;
    match err {
        E::Io(_) | E::Parse(_) | E::FormatVersion(_) => CertsdpStatus::IoError,
        E::DimensionMismatch(_) | E::InvalidInput(_) => CertsdpStatus::InvalidArgument,
        _ => CertsdpStatus::NumericalError,
    }
}

/// Copy the last error message on this thread into `buf` (NUL-terminated,
/// truncated to `len` bytes). Returns the full message length in bytes,
/// excluding the NUL.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null (queries length).
#[no_mangle]
pub unsafe extern "C" fn certsdp_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            // force terminator even when truncating
            *buf.add(n - 1) = 0;
        }
        bytes.len() - 1
    })
}

unsafe fn path_from_c(path: *const c_char) -> Result<&'static Path, CertsdpStatus> {
    if path.is_null() {
        set_error("null path");
        return Err(CertsdpStatus::InvalidArgument);
    }
    match CStr::from_ptr(path).to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => {
            set_error("path is not valid UTF-8");
            Err(CertsdpStatus::InvalidArgument)
        }
    }
}

/// Load an instance JSON file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid pointer.
/// On success `*out` owns the instance and must be released with
/// `certsdp_instance_free`.
#[no_mangle]
pub unsafe extern "C" fn certsdp_instance_load(
    path: *const c_char,
    out: *mut *mut CertsdpInstance,
) -> CertsdpStatus {
    if out.is_null() {
        set_error("null output pointer");
        return CertsdpStatus::InvalidArgument;
    }
    let path = match path_from_c(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match load_instance(path) {
        Ok((data, ground_truth)) => {
            *out = Box::into_raw(Box::new(CertsdpInstance { data, ground_truth }));
            CertsdpStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            classify(&e)
        }
    }
}

/// Generate a random instance with planted ground truth.
///
/// # Safety
/// `out` must be a valid pointer; the returned handle must be released with
/// `certsdp_instance_free`.
#[no_mangle]
pub unsafe extern "C" fn certsdp_instance_generate(
    n_minus_k: usize,
    k: usize,
    m: usize,
    mu_star: f64,
    nnz: usize,
    seed: u64,
    out: *mut *mut CertsdpInstance,
) -> CertsdpStatus {
    if out.is_null() {
        set_error("null output pointer");
        return CertsdpStatus::InvalidArgument;
    }
    let spec = GenSpec {
        n_minus_k,
        k,
        m,
        mu_star,
        nnz,
        seed,
    };
    match generate(&spec) {
        Ok((data, gt)) => {
            *out = Box::into_raw(Box::new(CertsdpInstance {
                data,
                ground_truth: Some(gt),
            }));
            CertsdpStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            classify(&e)
        }
    }
}

/// Write an instance (with its ground truth, if any) to a JSON file.
///
/// # Safety
/// `inst` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn certsdp_instance_save(
    inst: *const CertsdpInstance,
    path: *const c_char,
) -> CertsdpStatus {
    let Some(inst) = inst.as_ref() else {
        set_error("null instance");
        return CertsdpStatus::InvalidArgument;
    };
    let path = match path_from_c(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match save_instance(path, &inst.data, inst.ground_truth.as_ref()) {
        Ok(()) => CertsdpStatus::Ok,
        Err(e) => {
            set_error(&e.to_string());
            classify(&e)
        }
    }
}

/// Query instance dimensions. Null out-pointers are skipped.
///
/// # Safety
/// `inst` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn certsdp_instance_dims(
    inst: *const CertsdpInstance,
    n_minus_k: *mut usize,
    k: *mut usize,
    m: *mut usize,
) -> CertsdpStatus {
    let Some(inst) = inst.as_ref() else {
        set_error("null instance");
        return CertsdpStatus::InvalidArgument;
    };
    if !n_minus_k.is_null() {
        *n_minus_k = inst.data.n_minus_k();
    }
    if !k.is_null() {
        *k = inst.data.k();
    }
    if !m.is_null() {
        *m = inst.data.num_constraints();
    }
    CertsdpStatus::Ok
}

/// Release an instance handle. Null is a no-op.
///
/// # Safety
/// `inst` must be a handle returned by this library, released once.
#[no_mangle]
pub unsafe extern "C" fn certsdp_instance_free(inst: *mut CertsdpInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Solver options. Zero-initialize and override selectively:
/// zero/negative values select the documented defaults.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct CertsdpOptions {
    /// Feasibility acceptance threshold on the residual norm (default 1e-13).
    pub eta: f64,
    /// Optimality target for the inner accelerated loop (default 1e-13).
    pub delta_target: f64,
    /// Per-constraint feasibility tolerance (default 1e-13).
    pub feas_tol: f64,
    /// Ball schedule period; every `schedule_period`-th dual iterate is
    /// attempted (default 250). Set `guess_and_double` nonzero to use the
    /// doubling schedule instead.
    pub schedule_period: usize,
    pub guess_and_double: i32,
    /// 0 = decaying-step subgradient dual (default), 1 = adaptive
    /// accelerated dual.
    pub use_accelegrad: i32,
    /// Dual penalty parameter; <= 0 uses 20 tr(Y*) from the ground truth
    /// (an error if the instance carries none).
    pub penalty: f64,
    /// Wall-clock budget in seconds; <= 0 means unbounded.
    pub max_seconds: f64,
}

/// Solve an instance.
///
/// # Safety
/// `inst` must be a live handle; `opts` may be null for defaults; `out`
/// must be valid and receives a report handle to release with
/// `certsdp_report_free`. Returns `BudgetExhausted` (with a report still
/// written to `*out`) when the solve ran out of budget or stream.
#[no_mangle]
pub unsafe extern "C" fn certsdp_solve(
    inst: *const CertsdpInstance,
    opts: *const CertsdpOptions,
    out: *mut *mut CertsdpReport,
) -> CertsdpStatus {
    if out.is_null() {
        set_error("null output pointer");
        return CertsdpStatus::InvalidArgument;
    }
    let Some(inst) = inst.as_ref() else {
        set_error("null instance");
        return CertsdpStatus::InvalidArgument;
    };
    let defaults = CertsdpOptions {
        eta: 0.0,
        delta_target: 0.0,
        feas_tol: 0.0,
        schedule_period: 0,
        guess_and_double: 0,
        use_accelegrad: 0,
        penalty: 0.0,
        max_seconds: 0.0,
    };
    let o = opts.as_ref().copied().unwrap_or(defaults);

    let penalty = if o.penalty > 0.0 {
        o.penalty
    } else {
        match &inst.ground_truth {
            Some(gt) => default_penalty(&gt.x_star, &DenseMatrix::identity(inst.data.k())),
            None => {
                set_error("no penalty given and instance has no ground truth");
                return CertsdpStatus::InvalidArgument;
            }
        }
    };
    let method = if o.use_accelegrad != 0 {
        DualMethod::Accelegrad
    } else {
        DualMethod::Subgradient
    };
    let mut stream = match DualAscent::new(&inst.data, DualConfig::new(method, penalty)) {
        Ok(s) => s,
        Err(e) => {
            set_error(&e.to_string());
            return classify(&e);
        }
    };
    let cfg = CertConfig {
        eta: if o.eta > 0.0 { o.eta } else { 1e-13 },
        delta_target: if o.delta_target > 0.0 {
            o.delta_target
        } else {
            1e-13
        },
        feas_tol: if o.feas_tol > 0.0 { o.feas_tol } else { 1e-13 },
        schedule: if o.guess_and_double != 0 {
            Schedule::GuessAndDouble
        } else {
            Schedule::Linear(if o.schedule_period > 0 {
                o.schedule_period
            } else {
                250
            })
        },
        max_seconds: if o.max_seconds > 0.0 {
            Some(o.max_seconds)
        } else {
            None
        },
        ..CertConfig::default()
    };
    match run_certsdp(
        &inst.data,
        &mut stream,
        &cfg,
        inst.ground_truth.as_ref().map(|g| &g.x_star),
        None,
    ) {
        Ok(report) => {
            let solved = report.status == SolveStatus::Solved;
            *out = Box::into_raw(Box::new(CertsdpReport { report }));
            if solved {
                CertsdpStatus::Ok
            } else {
                set_error("solve ended without an accepted solution");
                CertsdpStatus::BudgetExhausted
            }
        }
        Err(e) => {
            set_error(&e.to_string());
            classify(&e)
        }
    }
}

/// Scalar metrics of a report. Null out-pointers are skipped. `dist_sq` is
/// set to a negative value when no ground truth was available.
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn certsdp_report_metrics(
    report: *const CertsdpReport,
    objective: *mut f64,
    residual: *mut f64,
    max_abs_q: *mut f64,
    dist_sq: *mut f64,
    time_sec: *mut f64,
) -> CertsdpStatus {
    let Some(r) = report.as_ref() else {
        set_error("null report");
        return CertsdpStatus::InvalidArgument;
    };
    if !objective.is_null() {
        *objective = r.report.objective;
    }
    if !residual.is_null() {
        *residual = r.report.residual;
    }
    if !max_abs_q.is_null() {
        *max_abs_q = r.report.max_abs_q;
    }
    if !dist_sq.is_null() {
        *dist_sq = r.report.dist_sq.unwrap_or(-1.0);
    }
    if !time_sec.is_null() {
        *time_sec = r.report.time_total_sec;
    }
    CertsdpStatus::Ok
}

/// Copy the recovered factor X (row-major, (n-k) x k) into `buf`. Returns
/// the required length when `buf` is null or too short via `*needed`.
///
/// # Safety
/// `buf`, when non-null, must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn certsdp_report_x(
    report: *const CertsdpReport,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> CertsdpStatus {
    let Some(r) = report.as_ref() else {
        set_error("null report");
        return CertsdpStatus::InvalidArgument;
    };
    let data = r.report.x.as_slice();
    if !needed.is_null() {
        *needed = data.len();
    }
    if buf.is_null() {
        return CertsdpStatus::Ok;
    }
    if len < data.len() {
        set_error("buffer too short");
        return CertsdpStatus::InvalidArgument;
    }
    ptr::copy_nonoverlapping(data.as_ptr(), buf, data.len());
    CertsdpStatus::Ok
}

/// Copy the final dual vector gamma into `buf`; same contract as
/// `certsdp_report_x`.
///
/// # Safety
/// `buf`, when non-null, must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn certsdp_report_gamma(
    report: *const CertsdpReport,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> CertsdpStatus {
    let Some(r) = report.as_ref() else {
        set_error("null report");
        return CertsdpStatus::InvalidArgument;
    };
    let data = &r.report.gamma;
    if !needed.is_null() {
        *needed = data.len();
    }
    if buf.is_null() {
        return CertsdpStatus::Ok;
    }
    if len < data.len() {
        set_error("buffer too short");
        return CertsdpStatus::InvalidArgument;
    }
    ptr::copy_nonoverlapping(data.as_ptr(), buf, data.len());
    CertsdpStatus::Ok
}

/// Release a report handle. Null is a no-op.
///
/// # Safety
/// `report` must be a handle returned by this library, released once.
#[no_mangle]
pub unsafe extern "C" fn certsdp_report_free(report: *mut CertsdpReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
