//! C ABI over `qubo-linsys`.
//!
//! Every fallible function returns a [`QlStatus`] and writes its result
//! through an out-pointer. On failure, [`ql_last_error`] returns a message
//! for the calling thread. Handles are opaque and must be released with
//! their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qubo_linsys::io::CompiledModel;
use qubo_linsys::{
    estimate_cost, export_coordinate, export_vendor_script, load_problem, solve_exhaustive, solve_sa,
    AnnealSchedule, Error, ProblemFile, SampleSet,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Config = 4,
    Dimension = 5,
    Index = 6,
    Unsupported = 7,
    Capacity = 8,
    Empty = 9,
    Io = 10,
    Overflow = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlFormat {
    Coordinate = 0,
    VendorScript = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QlAnnealParams {
    pub sweeps: usize,
    pub reads: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QlCost {
    pub pair_count: u64,
    pub per_pair_total: u64,
    pub grand_total: u64,
}

/// Compiled models of one problem file. An eigen file without a fixed
/// eigenvalue sign compiles to two models.
pub struct QlProblem {
    models: Vec<CompiledModel>,
}

pub struct QlSampleSet {
    set: SampleSet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|e| {
        let mut bytes = e.into_vec();
        bytes.retain(|&b| b != 0);
        CString::new(bytes).expect("nul bytes removed")
    });
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QlStatus {
    match e {
        Error::Dimension(_) => QlStatus::Dimension,
        Error::Config(_) => QlStatus::Config,
        Error::Index(_) => QlStatus::Index,
        Error::UnsupportedDegree(_) => QlStatus::Unsupported,
        Error::Capacity { .. } => QlStatus::Capacity,
        Error::EmptySampleSet => QlStatus::Empty,
        Error::Parse(_) => QlStatus::Parse,
        Error::Io(_) => QlStatus::Io,
        Error::Overflow(_) => QlStatus::Overflow,
    }
}

struct Fail(QlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Fail>;

fn null(what: &str) -> Fail {
    Fail(QlStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any error or panic, and converts the outcome to a status.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> QlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            QlStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            QlStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> FfiResult<&'a str> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Fail(QlStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn model<'a>(p: *const QlProblem, index: usize) -> FfiResult<&'a CompiledModel> {
    let p = p.as_ref().ok_or_else(|| null("problem"))?;
    p.models.get(index).ok_or_else(|| {
        Fail(
            QlStatus::Index,
            format!("model {index} out of range ({} models)", p.models.len()),
        )
    })
}

fn compile(pf: ProblemFile) -> FfiResult<*mut QlProblem> {
    let models = pf.compile()?;
    Ok(Box::into_raw(Box::new(QlProblem { models })))
}

/// Message for the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn ql_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses and compiles a JSON problem description.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_problem_from_json(json: *const c_char, out: *mut *mut QlProblem) -> QlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let pf = ProblemFile::from_json(read_str(json, "json")?)?;
        *out = compile(pf)?;
        Ok(())
    })
}

/// Reads, parses and compiles a JSON problem file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_problem_load(path: *const c_char, out: *mut *mut QlProblem) -> QlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let pf = load_problem(read_str(path, "path")?)?;
        *out = compile(pf)?;
        Ok(())
    })
}

/// # Safety
/// `p` must be NULL or a handle from `ql_problem_from_json`/`ql_problem_load`
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ql_problem_free(p: *mut QlProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live problem handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_problem_num_models(p: *const QlProblem, out: *mut usize) -> QlStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        *out_ref(out, "out")? = p.models.len();
        Ok(())
    })
}

/// Number of unknowns `n`, the length `x_out` must have in [`ql_problem_decode`].
///
/// # Safety
/// `p` must be a live problem handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_problem_num_unknowns(p: *const QlProblem, out: *mut usize) -> QlStatus {
    guard(|| {
        *out_ref(out, "out")? = model(p, 0)?.registry.n();
        Ok(())
    })
}

/// Total qubit count of one model, auxiliaries included.
///
/// # Safety
/// `p` must be a live problem handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_problem_num_qubits(p: *const QlProblem, model_index: usize, out: *mut usize) -> QlStatus {
    guard(|| {
        *out_ref(out, "out")? = model(p, model_index)?.qubo.num_vars();
        Ok(())
    })
}

/// Constant term of one model.
///
/// # Safety
/// `p` must be a live problem handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_problem_offset(p: *const QlProblem, model_index: usize, out: *mut f64) -> QlStatus {
    guard(|| {
        *out_ref(out, "out")? = model(p, model_index)?.qubo.offset();
        Ok(())
    })
}

/// Label of one model as a new string; release it with [`ql_string_free`].
///
/// # Safety
/// `p` must be a live problem handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_problem_label(p: *const QlProblem, model_index: usize, out: *mut *mut c_char) -> QlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let label = &model(p, model_index)?.label;
        *out = CString::new(label.as_str())
            .map_err(|e| Fail(QlStatus::InvalidUtf8, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// Energy of a bitstring, offset included.
///
/// # Safety
/// `p` must be a live problem handle, `bits` must point to `len` bytes and
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_problem_energy(
    p: *const QlProblem,
    model_index: usize,
    bits: *const u8,
    len: usize,
    out: *mut f64,
) -> QlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let m = model(p, model_index)?;
        *out = m.qubo.energy(slice(bits, len, "bits")?)?;
        Ok(())
    })
}

/// Decodes a bitstring into `x_out` (length `x_len`, which must equal the
/// number of unknowns). `lambda_out` receives the eigenvalue for eigen models
/// and NaN otherwise; `residual_out` receives `||Ax - b||` or `||Ax - lambda x||`.
/// Either of the two scalar outputs may be NULL.
///
/// # Safety
/// `p` must be a live problem handle, `bits` must point to `len` bytes,
/// `x_out` to `x_len` writable doubles, and the scalar outputs must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ql_problem_decode(
    p: *const QlProblem,
    model_index: usize,
    bits: *const u8,
    len: usize,
    x_out: *mut f64,
    x_len: usize,
    lambda_out: *mut f64,
    residual_out: *mut f64,
) -> QlStatus {
    guard(|| {
        let m = model(p, model_index)?;
        let d = m.decode(slice(bits, len, "bits")?)?;
        if x_len != d.x.len() {
            return Err(Fail(
                QlStatus::Dimension,
                format!("x_out has length {x_len}, problem has {} unknowns", d.x.len()),
            ));
        }
        if x_len > 0 && x_out.is_null() {
            return Err(null("x_out"));
        }
        if x_len > 0 {
            std::slice::from_raw_parts_mut(x_out, x_len).copy_from_slice(&d.x);
        }
        if let Some(l) = lambda_out.as_mut() {
            *l = d.lambda.unwrap_or(f64::NAN);
        }
        if let Some(r) = residual_out.as_mut() {
            *r = d.residual.unwrap_or(f64::NAN);
        }
        Ok(())
    })
}

/// Exports one model as text; release the result with [`ql_string_free`].
///
/// # Safety
/// `p` must be a live problem handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_problem_export(
    p: *const QlProblem,
    model_index: usize,
    format: QlFormat,
    include_zeros: bool,
    out: *mut *mut c_char,
) -> QlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let q = &model(p, model_index)?.qubo;
        let text = match format {
            QlFormat::Coordinate => export_coordinate(q, include_zeros),
            QlFormat::VendorScript => export_vendor_script(q, include_zeros, 1000),
        };
        *out = CString::new(text)
            .map_err(|e| Fail(QlStatus::InvalidUtf8, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ql_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Every ground state of one model by exhaustive enumeration (at most 25 qubits).
///
/// # Safety
/// `p` must be a live problem handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_solve_exhaustive(p: *const QlProblem, model_index: usize, out: *mut *mut QlSampleSet) -> QlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let set = solve_exhaustive(&model(p, model_index)?.qubo)?;
        *out = Box::into_raw(Box::new(QlSampleSet { set }));
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ql_anneal_params_default() -> QlAnnealParams {
    let d = AnnealSchedule::default();
    QlAnnealParams {
        sweeps: d.sweeps,
        reads: d.reads,
        beta_start: d.beta_start,
        beta_end: d.beta_end,
        seed: d.seed,
    }
}

/// Simulated annealing on one model; identical parameters give identical results.
///
/// # Safety
/// `p` must be a live problem handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_solve_sa(
    p: *const QlProblem,
    model_index: usize,
    params: QlAnnealParams,
    out: *mut *mut QlSampleSet,
) -> QlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let schedule = AnnealSchedule {
            sweeps: params.sweeps,
            reads: params.reads,
            beta_start: params.beta_start,
            beta_end: params.beta_end,
            seed: params.seed,
        };
        let set = solve_sa(&model(p, model_index)?.qubo, &schedule)?;
        *out = Box::into_raw(Box::new(QlSampleSet { set }));
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a sample set handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ql_sampleset_free(s: *mut QlSampleSet) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

unsafe fn record<'a>(s: *const QlSampleSet, index: usize) -> FfiResult<&'a qubo_linsys::Sample> {
    let s = s.as_ref().ok_or_else(|| null("sample set"))?;
    s.set.records.get(index).ok_or_else(|| {
        Fail(
            QlStatus::Index,
            format!("record {index} out of range ({} records)", s.set.len()),
        )
    })
}

/// Number of distinct records, sorted by energy then bitstring.
///
/// # Safety
/// `s` must be a live sample set handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_sampleset_len(s: *const QlSampleSet, out: *mut usize) -> QlStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("sample set"))?;
        *out_ref(out, "out")? = s.set.len();
        Ok(())
    })
}

/// # Safety
/// `s` must be a live sample set handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_sampleset_energy(s: *const QlSampleSet, index: usize, out: *mut f64) -> QlStatus {
    guard(|| {
        *out_ref(out, "out")? = record(s, index)?.energy;
        Ok(())
    })
}

/// # Safety
/// `s` must be a live sample set handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_sampleset_occurrences(s: *const QlSampleSet, index: usize, out: *mut u64) -> QlStatus {
    guard(|| {
        *out_ref(out, "out")? = record(s, index)?.occurrences;
        Ok(())
    })
}

/// Copies the bits of one record into `out`, which must hold exactly the
/// model's qubit count.
///
/// # Safety
/// `s` must be a live sample set handle and `out` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ql_sampleset_bits(s: *const QlSampleSet, index: usize, out: *mut u8, len: usize) -> QlStatus {
    guard(|| {
        let r = record(s, index)?;
        if len != r.bits.len() {
            return Err(Fail(
                QlStatus::Dimension,
                format!("buffer has length {len}, record has {} bits", r.bits.len()),
            ));
        }
        if len > 0 {
            if out.is_null() {
                return Err(null("out"));
            }
            std::slice::from_raw_parts_mut(out, len).copy_from_slice(&r.bits);
        }
        Ok(())
    })
}

/// Assembly cost triple for dimension `n` and exponent half-width `m`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_estimate_cost(n: u64, m: u64, out: *mut QlCost) -> QlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = estimate_cost(n, m)?;
        let narrow = |v: u128| {
            u64::try_from(v).map_err(|_| Fail(QlStatus::Overflow, format!("cost {v} does not fit in 64 bits")))
        };
        *out = QlCost {
            pair_count: narrow(c.pair_count)?,
            per_pair_total: narrow(c.per_pair_total)?,
            grand_total: narrow(c.grand_total)?,
        };
        Ok(())
    })
}
