//! C interface to `limitlab`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` / `*_parse`
//! functions and released by the matching `*_free`. Every fallible call
//! returns an [`LlStatus`] and writes its result through an out-pointer; on
//! failure the message is kept per thread and can be fetched with
//! [`ll_last_error`]. Strings returned to the caller are owned by the caller
//! and must be released with [`ll_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use limitlab::measure::DiscreteMeasure;
use limitlab::oracle::{check_identity, IdentityMode};
use limitlab::report::{run_command, OutputFormat, RunConfig};
use limitlab::uncertain::{transmission_range, DigitPrefix};
use limitlab::{parse_rational, tv_distance, BigRational, Error, EventSet, ExtendedReal, Mass, MeasureFamily};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Capacity = 3,
    Parse = 4,
    Domain = 5,
    Unsupported = 6,
    Internal = 7,
}

/// Arithmetic used for the masses of a measure.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LlMode {
    Exact = 0,
    Float = 1,
}

/// A measure family such as `record_index` with its parameters.
pub struct LlFamily(MeasureFamily);

/// A finitely supported probability measure.
pub enum LlMeasure {
    Exact(DiscreteMeasure<BigRational>),
    Float(DiscreteMeasure<f64>),
}

/// A finite union of intervals on the extended line.
pub struct LlEvent(EventSet);

/// A digit prefix and the half-open interval it fixes.
pub struct LlPrefix(DigitPrefix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> LlStatus {
    match err {
        Error::InvalidParameter(_) | Error::InvalidMeasure(_) => LlStatus::InvalidArgument,
        Error::Capacity { .. } => LlStatus::Capacity,
        Error::Parse(_) | Error::Json(_) | Error::Csv(_) => LlStatus::Parse,
        Error::Domain(_) => LlStatus::Domain,
        Error::Unsupported(_) => LlStatus::Unsupported,
        Error::Io(_) => LlStatus::Internal,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Lib(Error::Json(e))
    }
}

/// Runs `f`, records any error or panic, and maps it to a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LlStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LlStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer passed for {what}"));
            LlStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".to_string());
            LlStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Lib(Error::Parse(format!("{what} is not valid UTF-8"))))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn ll_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Free with
/// [`ll_string_free`].
#[no_mangle]
pub extern "C" fn ll_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |c| c.clone().into_raw())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ll_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a family by registry name with a JSON parameter object such as
/// `{"q": "1/2"}`. `params_json` may be NULL for families without parameters.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ll_family_new(
    name: *const c_char,
    params_json: *const c_char,
    out: *mut *mut LlFamily,
) -> LlStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let params: serde_json::Value = if params_json.is_null() {
            serde_json::Value::Object(Default::default())
        } else {
            serde_json::from_str(str_arg(params_json, "params_json")?)?
        };
        let family = MeasureFamily::from_registry(name, &params)?;
        write_out(out, Box::into_raw(Box::new(LlFamily(family))), "out")
    })
}

/// # Safety
/// `family` must come from [`ll_family_new`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn ll_family_free(family: *mut LlFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// The `n`-th measure of a family (`n ≥ 1`).
///
/// # Safety
/// `family` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ll_family_measure(
    family: *const LlFamily,
    n: u64,
    mode: LlMode,
    out: *mut *mut LlMeasure,
) -> LlStatus {
    guard(|| {
        let family = ref_arg(family, "family")?;
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()).into());
        }
        let m = match mode {
            LlMode::Exact => LlMeasure::Exact(family.0.measure(n)),
            LlMode::Float => LlMeasure::Float(family.0.measure(n)),
        };
        write_out(out, Box::into_raw(Box::new(m)), "out")
    })
}

/// Reads a measure from its JSON form; the `mode` field picks the arithmetic.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ll_measure_from_json(json: *const c_char, out: *mut *mut LlMeasure) -> LlStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let value: serde_json::Value = serde_json::from_str(text)?;
        let m = if value.get("mode").and_then(|m| m.as_str()) == Some("float") {
            LlMeasure::Float(serde_json::from_value(value)?)
        } else {
            LlMeasure::Exact(serde_json::from_value(value)?)
        };
        write_out(out, Box::into_raw(Box::new(m)), "out")
    })
}

/// JSON form of a measure. Free the string with [`ll_string_free`].
///
/// # Safety
/// `measure` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ll_measure_to_json(measure: *const LlMeasure, out: *mut *mut c_char) -> LlStatus {
    guard(|| {
        let s = match ref_arg(measure, "measure")? {
            LlMeasure::Exact(m) => serde_json::to_string(m)?,
            LlMeasure::Float(m) => serde_json::to_string(m)?,
        };
        write_out(out, into_c_string(s), "out")
    })
}

/// # Safety
/// `measure` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn ll_measure_free(measure: *mut LlMeasure) {
    if !measure.is_null() {
        drop(Box::from_raw(measure));
    }
}

/// Number of atoms with positive mass.
///
/// # Safety
/// `measure` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ll_measure_atom_count(measure: *const LlMeasure, out: *mut usize) -> LlStatus {
    guard(|| {
        let count = match ref_arg(measure, "measure")? {
            LlMeasure::Exact(m) => m.len(),
            LlMeasure::Float(m) => m.len(),
        };
        write_out(out, count, "out")
    })
}

/// Mass of an event, as a double.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ll_measure_of_event(
    measure: *const LlMeasure,
    event: *const LlEvent,
    out: *mut f64,
) -> LlStatus {
    guard(|| {
        let event = &ref_arg(event, "event")?.0;
        let v = match ref_arg(measure, "measure")? {
            LlMeasure::Exact(m) => Mass::to_f64(&m.measure_of(event)),
            LlMeasure::Float(m) => m.measure_of(event),
        };
        write_out(out, v, "out")
    })
}

/// Total variation distance. Summed in rationals when both measures are
/// exact and rounded once at the end; otherwise summed in floating point.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ll_tv_distance(a: *const LlMeasure, b: *const LlMeasure, out: *mut f64) -> LlStatus {
    guard(|| {
        let (a, b) = (ref_arg(a, "a")?, ref_arg(b, "b")?);
        let float = |m: &LlMeasure| match m {
            LlMeasure::Exact(m) => m.to_float(),
            LlMeasure::Float(m) => m.clone(),
        };
        let d = match (a, b) {
            (LlMeasure::Exact(x), LlMeasure::Exact(y)) => Mass::to_f64(&tv_distance(x, y)),
            _ => tv_distance(&float(a), &float(b)),
        };
        write_out(out, d, "out")
    })
}

/// Parses event syntax such as `"(-inf,3)"`, `"{5}"` or `"[0,1) u {4}"`.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ll_event_parse(text: *const c_char, out: *mut *mut LlEvent) -> LlStatus {
    guard(|| {
        let e: EventSet = str_arg(text, "text")?.parse()?;
        write_out(out, Box::into_raw(Box::new(LlEvent(e))), "out")
    })
}

/// # Safety
/// `event` must come from [`ll_event_parse`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn ll_event_free(event: *mut LlEvent) {
    if !event.is_null() {
        drop(Box::from_raw(event));
    }
}

/// Membership of a point given as text (`"1/2"`, `"-3"`, `"+inf"`).
///
/// # Safety
/// `event` must be live; `point` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ll_event_contains(event: *const LlEvent, point: *const c_char, out: *mut bool) -> LlStatus {
    guard(|| {
        let e = ref_arg(event, "event")?;
        let p: ExtendedReal = str_arg(point, "point")?.parse()?;
        write_out(out, e.0.contains(&p), "out")
    })
}

/// Parses a decimal digit prefix such as `"0.141"`.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ll_prefix_parse(text: *const c_char, out: *mut *mut LlPrefix) -> LlStatus {
    guard(|| {
        let p: DigitPrefix = str_arg(text, "text")?.parse()?;
        write_out(out, Box::into_raw(Box::new(LlPrefix(p))), "out")
    })
}

/// # Safety
/// `prefix` must come from [`ll_prefix_parse`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn ll_prefix_free(prefix: *mut LlPrefix) {
    if !prefix.is_null() {
        drop(Box::from_raw(prefix));
    }
}

/// Exact endpoints of `[lo, hi)` as strings. Free both with
/// [`ll_string_free`].
///
/// # Safety
/// `prefix` must be live; both out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn ll_prefix_bounds(
    prefix: *const LlPrefix,
    lo: *mut *mut c_char,
    hi: *mut *mut c_char,
) -> LlStatus {
    guard(|| {
        let iv = ref_arg(prefix, "prefix")?.0.interval();
        if lo.is_null() || hi.is_null() {
            return Err(Failure::Null("lo/hi"));
        }
        let fmt = limitlab::extreal::format_rational;
        write_out(lo, into_c_string(fmt(&iv.lo)), "lo")?;
        write_out(hi, into_c_string(fmt(&iv.hi)), "hi")
    })
}

/// Range `(lo, hi]` of `cos²θ` over the prefix's interval, in radians.
///
/// # Safety
/// `prefix` must be live; both out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn ll_prefix_transmission_range(prefix: *const LlPrefix, lo: *mut f64, hi: *mut f64) -> LlStatus {
    guard(|| {
        let r = transmission_range(&ref_arg(prefix, "prefix")?.0)?;
        if lo.is_null() || hi.is_null() {
            return Err(Failure::Null("lo/hi"));
        }
        write_out(lo, r.lo, "lo")?;
        write_out(hi, r.hi, "hi")
    })
}

/// `λₙ({0}) − γₙ({0}) − μₙ((−∞, n))` as an exact rational string. With
/// `enumerate` set both sides come from enumerating all trial strings
/// (`n ≤ 20`), otherwise from the closed forms.
///
/// # Safety
/// `q` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ll_identity_residual(
    q: *const c_char,
    n: u64,
    enumerate: bool,
    out: *mut *mut c_char,
) -> LlStatus {
    guard(|| {
        let q = parse_rational(str_arg(q, "q")?)?;
        let mode = if enumerate { IdentityMode::Oracle } else { IdentityMode::ClosedForm };
        let r = check_identity(&q, n, mode)?;
        write_out(out, into_c_string(limitlab::extreal::format_rational(&r)), "out")
    })
}

/// Runs a report command (`"oracle"`, `"example ex2"`, …) with a JSON
/// configuration such as `{"q": "1/2", "N": 200}` (NULL for defaults) and
/// returns the versioned JSON envelope.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ll_report_json(
    command: *const c_char,
    config_json: *const c_char,
    out: *mut *mut c_char,
) -> LlStatus {
    guard(|| {
        let command = str_arg(command, "command")?;
        let cfg: RunConfig = if config_json.is_null() {
            RunConfig::default()
        } else {
            serde_json::from_str(str_arg(config_json, "config_json")?)?
        };
        let text = run_command(command, &cfg)?.render(OutputFormat::Json)?;
        write_out(out, into_c_string(text), "out")
    })
}
