//! C ABI over the ikc kernel.
//!
//! Objects cross the boundary as opaque heap handles that the caller owns and
//! releases with the matching `*_free`. Every fallible call returns an
//! [`IkcStatus`]; on failure a message is kept per thread and can be read with
//! [`ikc_last_error_message`]. Strings returned to the caller are released
//! with [`ikc_string_free`].

use ikc::deriv::{bounded_typecheck, check_derivation, parse_derivation, Derivation, SearchResult};
use ikc::parse::{parse_env, parse_term, parse_type};
use ikc::reduction::{normalize, ReductionOutcome, Relation};
use ikc::types::subtype;
use ikc::{CanonType, Env, Error, Term};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IkcStatus {
    Ok = 0,
    /// The question was answered in the negative, e.g. a refuted typing.
    No = 1,
    /// Fuel ran out before an answer was reached.
    Unknown = 2,
    NullArgument = 3,
    InvalidUtf8 = 4,
    SyntaxError = 10,
    DegreeError = 11,
    JoinabilityError = 12,
    ShapeError = 13,
    DomainError = 14,
    RuleError = 15,
    ShapeRefutation = 16,
    PreconditionError = 17,
    NotAReduct = 18,
    NotAnExpansion = 19,
    TypeMismatch = 20,
    Panic = 99,
}

/// Reduction relation selector.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IkcRelation {
    Beta = 0,
    Eta = 1,
    BetaEta = 2,
    Head = 3,
}

/// A well-formed term.
pub struct IkcTerm(Term);

/// A canonical type.
pub struct IkcType(CanonType);

/// A derivation tree, not necessarily valid.
pub struct IkcDerivation(Derivation);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

fn status_of(e: &Error) -> IkcStatus {
    match e {
        Error::Syntax { .. } => IkcStatus::SyntaxError,
        Error::Degree(_) => IkcStatus::DegreeError,
        Error::Joinability(_) => IkcStatus::JoinabilityError,
        Error::Shape(_) => IkcStatus::ShapeError,
        Error::Domain(_) => IkcStatus::DomainError,
        Error::Rule { .. } => IkcStatus::RuleError,
        Error::ShapeRefutation(_) => IkcStatus::ShapeRefutation,
        Error::Precondition(_) => IkcStatus::PreconditionError,
        Error::NotAReduct(_) => IkcStatus::NotAReduct,
        Error::NotAnExpansion(_) => IkcStatus::NotAnExpansion,
        Error::TypeMismatch(_) => IkcStatus::TypeMismatch,
    }
}

fn fail(e: Error) -> IkcStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn guard(f: impl FnOnce() -> IkcStatus) -> IkcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(msg);
            IkcStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, IkcStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(IkcStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|e| {
        set_error(e.to_string());
        IkcStatus::InvalidUtf8
    })
}

unsafe fn read_ref<'a, T>(p: *const T) -> Result<&'a T, IkcStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle argument");
        IkcStatus::NullArgument
    })
}

unsafe fn write_out<T>(out: *mut *mut T, v: T) -> IkcStatus {
    *out = Box::into_raw(Box::new(v));
    IkcStatus::Ok
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! need_out {
    ($out:expr) => {
        if $out.is_null() {
            set_error("null output pointer");
            return IkcStatus::NullArgument;
        }
    };
}

/// Message for the last failing call on this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn ikc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ikc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a term from its s-expression form.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ikc_term_parse(src: *const c_char, out: *mut *mut IkcTerm) -> IkcStatus {
    guard(|| {
        need_out!(out);
        let s = try_status!(read_str(src));
        match parse_term(s) {
            Ok(t) => write_out(out, IkcTerm(t)),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `t` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ikc_term_free(t: *mut IkcTerm) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Prints a term; release the result with `ikc_string_free`. Null on a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ikc_term_to_string(t: *const IkcTerm) -> *mut c_char {
    match t.as_ref() {
        Some(t) => to_c_string(t.0.to_string()),
        None => ptr::null_mut(),
    }
}

/// Degree of a term, printed as an index such as `[1 0]`.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ikc_term_degree(t: *const IkcTerm) -> *mut c_char {
    match t.as_ref() {
        Some(t) => to_c_string(t.0.degree().to_string()),
        None => ptr::null_mut(),
    }
}

/// Normalizes by the leftmost-outermost strategy. Returns `Unknown` when
/// `fuel` steps do not reach a normal form; `out` then holds the last term.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ikc_term_normalize(
    t: *const IkcTerm,
    rel: IkcRelation,
    fuel: usize,
    out: *mut *mut IkcTerm,
) -> IkcStatus {
    guard(|| {
        need_out!(out);
        let t = try_status!(read_ref(t));
        let r = match rel {
            IkcRelation::Beta => Relation::Beta,
            IkcRelation::Eta => Relation::Eta,
            IkcRelation::BetaEta => Relation::BetaEta,
            IkcRelation::Head => Relation::H,
        };
        match normalize(&t.0, r, fuel) {
            ReductionOutcome::NormalForm(n) => write_out(out, IkcTerm(n)),
            ReductionOutcome::FuelExhausted { last, steps } => {
                write_out(out, IkcTerm(last));
                set_error(format!("no normal form within {steps} steps"));
                IkcStatus::Unknown
            }
        }
    })
}

/// Parses a type and brings it to canonical form.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ikc_type_parse(src: *const c_char, out: *mut *mut IkcType) -> IkcStatus {
    guard(|| {
        need_out!(out);
        let s = try_status!(read_str(src));
        match parse_type(s) {
            Ok(u) => write_out(out, IkcType(u)),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `u` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ikc_type_free(u: *mut IkcType) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// # Safety
/// `u` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ikc_type_to_string(u: *const IkcType) -> *mut c_char {
    match u.as_ref() {
        Some(u) => to_c_string(u.0.to_string()),
        None => ptr::null_mut(),
    }
}

/// `Ok` when `u` is a subtype of `v`, `No` otherwise.
///
/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn ikc_subtype(u: *const IkcType, v: *const IkcType) -> IkcStatus {
    guard(|| {
        let u = try_status!(read_ref(u));
        let v = try_status!(read_ref(v));
        if subtype(&u.0, &v.0) {
            IkcStatus::Ok
        } else {
            set_error(format!("{} is not a subtype of {}", u.0, v.0));
            IkcStatus::No
        }
    })
}

/// Parses a derivation tree without checking it.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ikc_derivation_parse(src: *const c_char, out: *mut *mut IkcDerivation) -> IkcStatus {
    guard(|| {
        need_out!(out);
        let s = try_status!(read_str(src));
        match parse_derivation(s) {
            Ok(d) => write_out(out, IkcDerivation(d)),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `d` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ikc_derivation_free(d: *mut IkcDerivation) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ikc_derivation_to_string(d: *const IkcDerivation) -> *mut c_char {
    match d.as_ref() {
        Some(d) => to_c_string(d.0.to_string()),
        None => ptr::null_mut(),
    }
}

/// Checks every rule of a derivation. On success, if `judgment` is not null
/// it receives the printed conclusion, to be released with `ikc_string_free`.
///
/// # Safety
/// `d` must be a live handle; `judgment` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ikc_derivation_check(d: *const IkcDerivation, judgment: *mut *mut c_char) -> IkcStatus {
    guard(|| {
        let d = try_status!(read_ref(d));
        match check_derivation(&d.0) {
            Ok(j) => {
                if !judgment.is_null() {
                    *judgment = to_c_string(j.to_string());
                }
                IkcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Searches for a derivation of `env |- t : u` within `fuel`. `env` may be
/// null for the empty environment. Returns `Ok` with the derivation in `out`,
/// `No` when the judgment is refuted, or `Unknown` when fuel runs out.
///
/// # Safety
/// Handles must be live; `env` must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ikc_typecheck(
    t: *const IkcTerm,
    env: *const c_char,
    u: *const IkcType,
    fuel: usize,
    out: *mut *mut IkcDerivation,
) -> IkcStatus {
    guard(|| {
        need_out!(out);
        let t = try_status!(read_ref(t));
        let u = try_status!(read_ref(u));
        let g = if env.is_null() {
            Env::new()
        } else {
            match parse_env(try_status!(read_str(env))) {
                Ok(g) => g,
                Err(e) => return fail(e),
            }
        };
        match bounded_typecheck(&t.0, &g, &u.0, fuel) {
            SearchResult::Found(d) => write_out(out, IkcDerivation(d)),
            SearchResult::Refuted(why) => {
                set_error(why);
                IkcStatus::No
            }
            SearchResult::Unknown => {
                set_error("search fuel exhausted");
                IkcStatus::Unknown
            }
        }
    })
}
