//! C interface to the perdyn library.
//!
//! Functions return a `PerdynStatus`. On failure the message is available
//! from `perdyn_last_error_message` on the same thread. Strings handed out
//! by the library must be released with `perdyn_string_free`; handles with
//! their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use perdyn::catalog::{self, CatalogError};
use perdyn::classify::{classify, ClassifyError, DEFAULT_MAX_EXTENSION};
use perdyn::dynamics::{FieldMap, FunctionalGraph, MapError, RationalMap};
use perdyn::field::{build_field, parse_field_spec, FieldError, DEFAULT_ENUM_BUDGET};
use perdyn::treegroup::{build_level_quotient, ends_fixed_class, Automaton, Budget, TreeError};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerdynStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    BudgetExceeded = 4,
    NotFound = 5,
    Domain = 6,
    Panic = 7,
}

/// A rational map reduced over a finite field.
pub struct PerdynMap {
    map: FieldMap,
}

/// A normalized automaton group.
pub struct PerdynAutomaton {
    aut: Automaton,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(PerdynStatus, String);

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Self {
        let s = match e {
            FieldError::Parse { .. } => PerdynStatus::Parse,
            FieldError::BudgetExceeded { .. } => PerdynStatus::BudgetExceeded,
            _ => PerdynStatus::Domain,
        };
        Failure(s, e.to_string())
    }
}

impl From<MapError> for Failure {
    fn from(e: MapError) -> Self {
        match e {
            MapError::Field(f) => f.into(),
            MapError::Parse { .. } => Failure(PerdynStatus::Parse, e.to_string()),
            _ => Failure(PerdynStatus::Domain, e.to_string()),
        }
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        Failure(PerdynStatus::Domain, e.to_string())
    }
}

impl From<TreeError> for Failure {
    fn from(e: TreeError) -> Self {
        let s = match e {
            TreeError::DegreeBudgetExceeded { .. } | TreeError::NotEnumerated { .. } => PerdynStatus::BudgetExceeded,
            TreeError::Schema(_) | TreeError::BadLetter { .. } => PerdynStatus::Parse,
            TreeError::UnknownState(_) => PerdynStatus::NotFound,
            _ => PerdynStatus::Domain,
        };
        Failure(s, e.to_string())
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Tree(t) => t.into(),
            CatalogError::UnknownEntry(_) | CatalogError::Io { .. } => Failure(PerdynStatus::NotFound, e.to_string()),
            CatalogError::Schema(_) => Failure(PerdynStatus::Parse, e.to_string()),
            _ => Failure(PerdynStatus::Domain, e.to_string()),
        }
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PerdynStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PerdynStatus::Ok
        }
        Ok(Err(Failure(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            PerdynStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(PerdynStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(PerdynStatus::InvalidUtf8, e.to_string()))
}

fn check_out<T>(p: *mut T) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(PerdynStatus::NullPointer, "null output pointer".into()))
    } else {
        Ok(())
    }
}

fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    // SAFETY: callers pass handles obtained from this library
    unsafe { p.as_ref() }.ok_or_else(|| Failure(PerdynStatus::NullPointer, "null handle".into()))
}

fn out_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message of the last failed call on this thread, or NULL. Owned by the
/// library and valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn perdyn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn perdyn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn perdyn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `expr` and reduces it over the field `field` (`GF(p)` or `GF(p^n)`).
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn perdyn_map_new(expr: *const c_char, field: *const c_char, out: *mut *mut PerdynMap) -> PerdynStatus {
    guard(|| {
        check_out(out)?;
        let spec = parse_field_spec(read_str(field)?)?;
        let f = build_field(spec.p, spec.n)?;
        let map = RationalMap::parse(read_str(expr)?)?.reduce(&f)?;
        *out = Box::into_raw(Box::new(PerdynMap { map }));
        Ok(())
    })
}

/// # Safety
/// `map` must come from `perdyn_map_new` and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn perdyn_map_free(map: *mut PerdynMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Number of periodic points of the map on the projective line over its field.
///
/// # Safety
/// `map` must be a live handle; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn perdyn_map_periodic_count(
    map: *const PerdynMap,
    out_periodic: *mut u64,
    out_total: *mut u64,
) -> PerdynStatus {
    guard(|| {
        check_out(out_periodic)?;
        check_out(out_total)?;
        let m = handle(map)?;
        let g = FunctionalGraph::build(&m.map, DEFAULT_ENUM_BUDGET)?;
        *out_periodic = g.periodic_ranks().len() as u64;
        *out_total = g.index().len() as u64;
        Ok(())
    })
}

/// Full classification report as JSON. Free the result with `perdyn_string_free`.
///
/// # Safety
/// `map` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn perdyn_map_classify_json(map: *const PerdynMap, out_json: *mut *mut c_char) -> PerdynStatus {
    guard(|| {
        check_out(out_json)?;
        let c = classify(&handle(map)?.map, DEFAULT_MAX_EXTENSION)?;
        let s = serde_json::to_string(&c).map_err(|e| Failure(PerdynStatus::Domain, e.to_string()))?;
        *out_json = out_string(s);
        Ok(())
    })
}

/// Loads a bundled catalog automaton by name, or an automaton or catalog JSON file.
///
/// # Safety
/// `source` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn perdyn_automaton_load(source: *const c_char, out: *mut *mut PerdynAutomaton) -> PerdynStatus {
    guard(|| {
        check_out(out)?;
        let aut = catalog::load_automaton(read_str(source)?)?;
        *out = Box::into_raw(Box::new(PerdynAutomaton { aut }));
        Ok(())
    })
}

/// Builds an automaton from its JSON description.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn perdyn_automaton_from_json(json: *const c_char, out: *mut *mut PerdynAutomaton) -> PerdynStatus {
    guard(|| {
        check_out(out)?;
        let aut = Automaton::from_json(read_str(json)?)?;
        *out = Box::into_raw(Box::new(PerdynAutomaton { aut }));
        Ok(())
    })
}

/// # Safety
/// `aut` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn perdyn_automaton_free(aut: *mut PerdynAutomaton) {
    if !aut.is_null() {
        drop(Box::from_raw(aut));
    }
}

/// Order of the level-`level` quotient as a decimal string.
///
/// # Safety
/// `aut` must be a live handle; `out_order` must be writable.
#[no_mangle]
pub unsafe extern "C" fn perdyn_automaton_level_order(
    aut: *const PerdynAutomaton,
    level: usize,
    out_order: *mut *mut c_char,
) -> PerdynStatus {
    guard(|| {
        check_out(out_order)?;
        let q = build_level_quotient(&handle(aut)?.aut, level, &Budget::default())?;
        *out_order = out_string(q.order.to_string());
        Ok(())
    })
}

/// Exact fixed-point proportion `num/den` of the level-`level` quotient.
///
/// # Safety
/// `aut` must be a live handle; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn perdyn_automaton_fpp(
    aut: *const PerdynAutomaton,
    level: usize,
    out_num: *mut u64,
    out_den: *mut u64,
) -> PerdynStatus {
    guard(|| {
        check_out(out_num)?;
        check_out(out_den)?;
        let b = Budget::default();
        let q = build_level_quotient(&handle(aut)?.aut, level, &b)?;
        let r = q.fpp_exact(&b)?;
        *out_num = *r.numer();
        *out_den = *r.denom();
        Ok(())
    })
}

/// Classification of the ends fixed by `state` as JSON.
///
/// # Safety
/// `aut` must be a live handle; `state` NUL-terminated; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn perdyn_automaton_ends_json(
    aut: *const PerdynAutomaton,
    state: *const c_char,
    out_json: *mut *mut c_char,
) -> PerdynStatus {
    guard(|| {
        check_out(out_json)?;
        let a = &handle(aut)?.aut;
        let name = read_str(state)?;
        let s = a
            .state_index(name)
            .ok_or_else(|| Failure(PerdynStatus::NotFound, format!("unknown state '{name}'")))?;
        let c = ends_fixed_class(a, s);
        let j = serde_json::to_string(&c).map_err(|e| Failure(PerdynStatus::Domain, e.to_string()))?;
        *out_json = out_string(j);
        Ok(())
    })
}

/// Runs the command-line frontend on `argv` (without the program name).
/// The streams are returned in `out_stdout` and `out_stderr` (free both),
/// the process exit code in `out_code`. A nonzero exit code is not a call
/// failure.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn perdyn_cli_run(
    argc: c_int,
    argv: *const *const c_char,
    out_stdout: *mut *mut c_char,
    out_stderr: *mut *mut c_char,
    out_code: *mut c_int,
) -> PerdynStatus {
    guard(|| {
        check_out(out_stdout)?;
        check_out(out_stderr)?;
        check_out(out_code)?;
        if argc < 0 || (argc > 0 && argv.is_null()) {
            return Err(Failure(PerdynStatus::NullPointer, "bad argument vector".into()));
        }
        let mut args = vec!["perdyn".to_string()];
        for i in 0..argc as usize {
            args.push(read_str(*argv.add(i))?.to_string());
        }
        let o = perdyn::cli::run(args);
        *out_code = o.code;
        *out_stdout = out_string(o.stdout);
        *out_stderr = out_string(o.stderr);
        Ok(())
    })
}
