//! C ABI over the aniso-wf toolkit.
//!
//! Every call returns an `AWF_*` status code; outputs go through pointers. Handles are opaque
//! and owned by the caller until passed to the matching `*_free`. After a failure,
//! `awf_last_error` holds a message for the calling thread.

use aniso_wf::config::{parse_config, RunConfig};
use aniso_wf::detector::{classify, decay_profile, wavefront_map, Label, WavefrontMap};
use aniso_wf::geometry::{anisotropic_decompose, AnisotropicIndex, PhasePoint};
use aniso_wf::presets::run_experiment;
use aniso_wf::stft::{stft_eval, StftEvaluator};
use aniso_wf::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

pub const AWF_OK: i32 = 0;
pub const AWF_ERR_NULL_POINTER: i32 = 1;
pub const AWF_ERR_INVALID_ARGUMENT: i32 = 2;
pub const AWF_ERR_CONFIG: i32 = 3;
pub const AWF_ERR_NUMERIC: i32 = 4;
pub const AWF_ERR_NOT_POINTWISE: i32 = 5;
pub const AWF_ERR_BUFFER_TOO_SMALL: i32 = 6;
pub const AWF_ERR_OUT_OF_RANGE: i32 = 7;
pub const AWF_ERR_PANIC: i32 = 99;

pub const AWF_LABEL_OUT: i32 = 0;
pub const AWF_LABEL_IN: i32 = 1;
pub const AWF_LABEL_OUT_FLOOR: i32 = 2;
pub const AWF_LABEL_INCONCLUSIVE: i32 = 3;

/// A parsed run description together with its STFT evaluator.
pub struct AwfRun {
    cfg: RunConfig,
    ev: StftEvaluator,
}

/// A classified direction sweep.
pub struct AwfMap {
    map: WavefrontMap,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AwfStftValue {
    pub re: f64,
    pub im: f64,
    /// ln|V|, finite where |V| itself underflows.
    pub log_abs: f64,
    pub abs_error: f64,
    /// Nonzero when the value is indistinguishable from noise.
    pub below_floor: u8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AwfVerdict {
    /// One of `AWF_LABEL_*`.
    pub label: i32,
    pub terminal_rate: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AwfMapEntry {
    pub x0: f64,
    pub xi0: f64,
    pub verdict: AwfVerdict,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::UnknownPreset(_) => AWF_ERR_CONFIG,
        Error::NotPointwise(_) => AWF_ERR_NOT_POINTWISE,
        Error::QuadratureNonConvergent { .. }
        | Error::UnderResolved(_)
        | Error::BoundaryMass
        | Error::TooFewPoints { .. }
        | Error::GridTooLarge(_) => AWF_ERR_NUMERIC,
        _ => AWF_ERR_INVALID_ARGUMENT,
    }
}

struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(code_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(AWF_ERR_NULL_POINTER, format!("{what} is null"))
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            AWF_OK
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            AWF_ERR_PANIC
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(AWF_ERR_INVALID_ARGUMENT, format!("{what} is not UTF-8")))
}

fn label_code(l: Label) -> i32 {
    i32::from(l.code())
}

/// Length in bytes of the last error message, without the terminating NUL.
#[no_mangle]
pub extern "C" fn awf_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copies the last error message into `buf` as a NUL-terminated string.
///
/// # Safety
/// `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn awf_last_error(buf: *mut c_char, len: usize) -> i32 {
    if buf.is_null() {
        return AWF_ERR_NULL_POINTER;
    }
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if len < msg.len() + 1 {
            return AWF_ERR_BUFFER_TOO_SMALL;
        }
        ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), msg.len());
        *buf.add(msg.len()) = 0;
        AWF_OK
    })
}

/// Parses a `section.key = value` run description.
///
/// # Safety
/// `config` must be a NUL-terminated string; `out_run` must be writable.
#[no_mangle]
pub unsafe extern "C" fn awf_run_from_config(config: *const c_char, out_run: *mut *mut AwfRun) -> i32 {
    guard(|| {
        let slot = out(out_run, "out_run")?;
        *slot = ptr::null_mut();
        let cfg = parse_config(text(config, "config")?)?;
        let ev = cfg.evaluator()?;
        *slot = Box::into_raw(Box::new(AwfRun { cfg, ev }));
        Ok(())
    })
}

/// # Safety
/// `run` must come from `awf_run_from_config` and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn awf_run_free(run: *mut AwfRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// V_φ f(x, ξ) with the run's signal, window and backend.
///
/// # Safety
/// `run` must be a live handle; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn awf_stft(run: *const AwfRun, x: f64, xi: f64, out_value: *mut AwfStftValue) -> i32 {
    guard(|| {
        let run = run.as_ref().ok_or_else(|| null("run"))?;
        let slot = out(out_value, "out_value")?;
        let v = stft_eval(&run.ev, PhasePoint::new(x, xi))?;
        *slot = AwfStftValue {
            re: v.value.re,
            im: v.value.im,
            log_abs: v.log_abs,
            abs_error: v.abs_error_estimate,
            below_floor: u8::from(v.below_floor),
        };
        Ok(())
    })
}

/// Classifies the direction with parameters (w, σx, σξ) under the run's policy.
///
/// # Safety
/// `run` must be a live handle; `out_verdict` must be writable.
#[no_mangle]
pub unsafe extern "C" fn awf_classify_direction(
    run: *const AwfRun,
    w: f64,
    sigma_x: f64,
    sigma_xi: f64,
    out_verdict: *mut AwfVerdict,
) -> i32 {
    guard(|| {
        let run = run.as_ref().ok_or_else(|| null("run"))?;
        let slot = out(out_verdict, "out_verdict")?;
        let dir = run.cfg.direction_dir((w, sigma_x, sigma_xi))?;
        let p = decay_profile(&run.ev, dir, run.cfg.idx, &run.cfg.policy)?;
        let v = classify(&p, &run.cfg.policy)?;
        *slot = AwfVerdict { label: label_code(v.label), terminal_rate: v.fitted_terminal_rate };
        Ok(())
    })
}

/// Classifies the run's direction sweep.
///
/// # Safety
/// `run` must be a live handle; `out_map` must be writable.
#[no_mangle]
pub unsafe extern "C" fn awf_wavefront_map(run: *const AwfRun, out_map: *mut *mut AwfMap) -> i32 {
    guard(|| {
        let run = run.as_ref().ok_or_else(|| null("run"))?;
        let slot = out(out_map, "out_map")?;
        *slot = ptr::null_mut();
        let map = wavefront_map(&run.ev, run.cfg.idx, run.cfg.sweep, &run.cfg.policy)?;
        *slot = Box::into_raw(Box::new(AwfMap { map }));
        Ok(())
    })
}

/// Number of directions in the map; 0 for a null handle.
///
/// # Safety
/// `map` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn awf_map_len(map: *const AwfMap) -> usize {
    map.as_ref().map_or(0, |m| m.map.entries.len())
}

/// # Safety
/// `map` must be a live handle; `out_entry` must be writable.
#[no_mangle]
pub unsafe extern "C" fn awf_map_entry(map: *const AwfMap, i: usize, out_entry: *mut AwfMapEntry) -> i32 {
    guard(|| {
        let map = map.as_ref().ok_or_else(|| null("map"))?;
        let slot = out(out_entry, "out_entry")?;
        let e = map
            .map
            .entries
            .get(i)
            .ok_or_else(|| Fail(AWF_ERR_OUT_OF_RANGE, format!("entry {i} of {}", map.map.entries.len())))?;
        *slot = AwfMapEntry {
            x0: e.dir.x0,
            xi0: e.dir.xi0,
            verdict: AwfVerdict { label: label_code(e.verdict.label), terminal_rate: e.verdict.fitted_terminal_rate },
        };
        Ok(())
    })
}

/// # Safety
/// `map` must come from `awf_wavefront_map` and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn awf_map_free(map: *mut AwfMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Splits (x, ξ) into a quasi-sphere direction and a scale λ for the index (t, s).
///
/// # Safety
/// The three output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn awf_decompose(
    t: f64,
    s: f64,
    x: f64,
    xi: f64,
    out_x0: *mut f64,
    out_xi0: *mut f64,
    out_lambda: *mut f64,
) -> i32 {
    guard(|| {
        let (a, b, c) = (out(out_x0, "out_x0")?, out(out_xi0, "out_xi0")?, out(out_lambda, "out_lambda")?);
        let d = anisotropic_decompose(PhasePoint::new(x, xi), AnisotropicIndex::new(t, s)?)?;
        (*a, *b, *c) = (d.dir.x0, d.dir.xi0, d.lambda);
        Ok(())
    })
}

/// Runs a named experiment; `out_passed` is set to 1 when every expectation holds.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out_passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn awf_run_preset(name: *const c_char, out_passed: *mut u8) -> i32 {
    guard(|| {
        let slot = out(out_passed, "out_passed")?;
        let report = run_experiment(text(name, "name")?)?;
        *slot = u8::from(report.passed());
        Ok(())
    })
}
