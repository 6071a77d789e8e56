//! C bindings. Handles are opaque heap pointers owned by the caller and
//! released through the matching `_free`; strings returned through out
//! parameters are released with `linkdiag_string_free`. Every fallible call
//! returns a status; on failure the out parameters are nulled or zeroed and
//! `linkdiag_last_error_message` holds a diagnostic until the next call on
//! the same thread.

#![allow(non_camel_case_types)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use linkdiag::diagram::{emit_pd, parse_pd, DiagramJson};
use linkdiag::invariants::{jones, jones_text, kauffman_bracket};
use linkdiag::satellite::{annular_embed, cable, entangle, SatelliteResult};
use linkdiag::structure::{find_companion_disk, is_prime_diagram};
use linkdiag::{census, Diagram, LinkError};

/// Outcome of a call. Zero is success; everything else leaves a message in
/// `linkdiag_last_error_message`.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum linkdiag_status {
    LINKDIAG_OK = 0,
    /// Input text failed to parse or validate as a diagram.
    LINKDIAG_PARSE_ERROR = 1,
    /// Structurally valid input that the operation rejects.
    LINKDIAG_DOMAIN_ERROR = 2,
    /// A crossing or state-sum budget was exceeded.
    LINKDIAG_BUDGET_ERROR = 3,
    /// A required pointer argument was null.
    LINKDIAG_NULL_ARGUMENT = 4,
    /// A text argument was not valid UTF-8.
    LINKDIAG_INVALID_UTF8 = 5,
    /// The library panicked; state is unchanged but the call did nothing.
    LINKDIAG_INTERNAL_PANIC = 6,
}

use linkdiag_status::*;

/// A link diagram. Opaque.
pub struct linkdiag_diagram {
    inner: Diagram,
}

/// Crossing accounting from a satellite construction.
#[repr(C)]
#[derive(Clone, Copy, Default, Debug)]
pub struct linkdiag_satellite_counts {
    pub raw_crossings: u64,
    pub reduced_crossings: u64,
    pub pattern_crossings: u64,
    pub companion_crossings: u64,
    /// Crossings of the writhe-normalized companion that was doubled.
    pub doubled_crossings: u64,
    /// Linking number between the two parallel companion copies.
    pub double_linking: i64,
    pub wrapping: u64,
    pub components: u64,
    /// True when the two copies bound an untwisted band (linking zero).
    pub framing: bool,
    /// True when the pattern wraps at least twice.
    pub reliable: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn set_error(msg: &str) {
    let owned = CString::new(msg.replace('\0', " ")).expect("nul stripped");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(owned));
}

fn status_of(e: &LinkError) -> linkdiag_status {
    match e {
        LinkError::MalformedCode(_) | LinkError::NonPlanar(_) | LinkError::EmptyDiagram => {
            LINKDIAG_PARSE_ERROR
        }
        LinkError::BudgetExceeded(_) => LINKDIAG_BUDGET_ERROR,
        _ => LINKDIAG_DOMAIN_ERROR,
    }
}

fn fail(status: linkdiag_status, msg: &str) -> linkdiag_status {
    set_error(msg);
    status
}

/// Runs a body with panic containment; the body reports its own status.
fn guard(f: impl FnOnce() -> linkdiag_status) -> linkdiag_status {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(LINKDIAG_INTERNAL_PANIC, "internal panic"),
    }
}

/// # Safety
/// `text` must be a readable nul-terminated string or null.
unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, linkdiag_status> {
    if text.is_null() {
        return Err(fail(LINKDIAG_NULL_ARGUMENT, "text argument is null"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|_| fail(LINKDIAG_INVALID_UTF8, "text argument is not UTF-8"))
}

unsafe fn put_diagram(
    out: *mut *mut linkdiag_diagram,
    d: Diagram,
) -> linkdiag_status {
    *out = Box::into_raw(Box::new(linkdiag_diagram { inner: d }));
    LINKDIAG_OK
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> linkdiag_status {
    let owned = CString::new(s.replace('\0', " ")).expect("nul stripped");
    *out = owned.into_raw();
    LINKDIAG_OK
}

/// Library version as a static string; never freed by the caller.
#[no_mangle]
pub extern "C" fn linkdiag_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Diagnostic for the most recent failed call on this thread, or null when
/// that call succeeded. Valid until the next linkdiag call on the thread.
#[no_mangle]
pub extern "C" fn linkdiag_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must have come from a linkdiag out parameter and not been freed.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases a diagram handle. Null is ignored.
///
/// # Safety
/// `d` must have come from a linkdiag out parameter and not been freed.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_diagram_free(d: *mut linkdiag_diagram) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Parses planar diagram text like "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)".
///
/// # Safety
/// `text` is a readable nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_diagram_parse_pd(
    text: *const c_char,
    out: *mut *mut linkdiag_diagram,
) -> linkdiag_status {
    guard(|| {
        if out.is_null() {
            return fail(LINKDIAG_NULL_ARGUMENT, "out argument is null");
        }
        *out = std::ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_pd(text) {
            Ok(d) => put_diagram(out, d),
            Err(e) => fail(status_of(&e), &e.to_string()),
        }
    })
}

/// Parses the JSON diagram form (crossing tuples plus optional checks).
///
/// # Safety
/// `text` is a readable nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_diagram_parse_json(
    text: *const c_char,
    out: *mut *mut linkdiag_diagram,
) -> linkdiag_status {
    guard(|| {
        if out.is_null() {
            return fail(LINKDIAG_NULL_ARGUMENT, "out argument is null");
        }
        *out = std::ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match DiagramJson::from_str(text) {
            Ok(d) => put_diagram(out, d),
            Err(e) => fail(status_of(&e), &e.to_string()),
        }
    })
}

/// Number of crossings, or 0 for a null handle.
///
/// # Safety
/// `d` is a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_diagram_crossings(d: *const linkdiag_diagram) -> u64 {
    d.as_ref().map_or(0, |d| d.inner.n_crossings() as u64)
}

/// Number of link components including free loops, or 0 for null.
///
/// # Safety
/// `d` is a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_diagram_components(d: *const linkdiag_diagram) -> u64 {
    d.as_ref().map_or(0, |d| d.inner.n_components() as u64)
}

/// Number of crossing-free loop components, or 0 for null.
///
/// # Safety
/// `d` is a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_diagram_free_loops(d: *const linkdiag_diagram) -> u64 {
    d.as_ref().map_or(0, |d| d.inner.free_loops() as u64)
}

/// Sum of crossing signs, or 0 for null.
///
/// # Safety
/// `d` is a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_diagram_writhe(d: *const linkdiag_diagram) -> i64 {
    d.as_ref().map_or(0, |d| d.inner.writhe())
}

/// True when the underlying 4-valent graph is connected. Null is false.
///
/// # Safety
/// `d` is a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_diagram_is_connected(d: *const linkdiag_diagram) -> bool {
    d.as_ref().is_some_and(|d| d.inner.is_connected())
}

/// Writes the diagram back out as planar diagram text.
///
/// # Safety
/// `d` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_diagram_pd_text(
    d: *const linkdiag_diagram,
    out: *mut *mut c_char,
) -> linkdiag_status {
    guard(|| {
        if out.is_null() {
            return fail(LINKDIAG_NULL_ARGUMENT, "out argument is null");
        }
        *out = std::ptr::null_mut();
        match d.as_ref() {
            Some(d) => put_string(out, emit_pd(&d.inner)),
            None => fail(LINKDIAG_NULL_ARGUMENT, "diagram handle is null"),
        }
    })
}

/// Writes the diagram as JSON with the derived checks filled in.
///
/// # Safety
/// `d` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_diagram_json_text(
    d: *const linkdiag_diagram,
    out: *mut *mut c_char,
) -> linkdiag_status {
    guard(|| {
        if out.is_null() {
            return fail(LINKDIAG_NULL_ARGUMENT, "out argument is null");
        }
        *out = std::ptr::null_mut();
        match d.as_ref() {
            Some(d) => {
                let json = serde_json::to_string(&DiagramJson::from_diagram(&d.inner))
                    .expect("diagram JSON always serializes");
                put_string(out, json)
            }
            None => fail(LINKDIAG_NULL_ARGUMENT, "diagram handle is null"),
        }
    })
}

/// Mirror image: every crossing sign flipped.
///
/// # Safety
/// `d` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_diagram_mirror(
    d: *const linkdiag_diagram,
    out: *mut *mut linkdiag_diagram,
) -> linkdiag_status {
    guard(|| {
        if out.is_null() {
            return fail(LINKDIAG_NULL_ARGUMENT, "out argument is null");
        }
        *out = std::ptr::null_mut();
        match d.as_ref() {
            Some(d) => put_diagram(out, d.inner.mirror()),
            None => fail(LINKDIAG_NULL_ARGUMENT, "diagram handle is null"),
        }
    })
}

/// True when no circle meeting the diagram in two points separates
/// crossings from crossings.
///
/// # Safety
/// `d` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_diagram_is_prime(
    d: *const linkdiag_diagram,
    out: *mut bool,
) -> linkdiag_status {
    guard(|| {
        if out.is_null() {
            return fail(LINKDIAG_NULL_ARGUMENT, "out argument is null");
        }
        *out = false;
        match d.as_ref() {
            Some(d) => match is_prime_diagram(&d.inner) {
                Ok((prime, _)) => {
                    *out = prime;
                    LINKDIAG_OK
                }
                Err(e) => fail(status_of(&e), &e.to_string()),
            },
            None => fail(LINKDIAG_NULL_ARGUMENT, "diagram handle is null"),
        }
    })
}

/// Kauffman bracket in the variable A, e.g. "-A^-4 - A^4".
///
/// # Safety
/// `d` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_bracket_text(
    d: *const linkdiag_diagram,
    out: *mut *mut c_char,
) -> linkdiag_status {
    guard(|| {
        if out.is_null() {
            return fail(LINKDIAG_NULL_ARGUMENT, "out argument is null");
        }
        *out = std::ptr::null_mut();
        match d.as_ref() {
            Some(d) => match kauffman_bracket(&d.inner) {
                Ok(p) => put_string(out, p.text("A")),
                Err(e) => fail(status_of(&e), &e.to_string()),
            },
            None => fail(LINKDIAG_NULL_ARGUMENT, "diagram handle is null"),
        }
    })
}

/// Jones polynomial in t, half-integer exponents spelled as t^(k/2).
///
/// # Safety
/// `d` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_jones_text(
    d: *const linkdiag_diagram,
    out: *mut *mut c_char,
) -> linkdiag_status {
    guard(|| {
        if out.is_null() {
            return fail(LINKDIAG_NULL_ARGUMENT, "out argument is null");
        }
        *out = std::ptr::null_mut();
        match d.as_ref() {
            Some(d) => match jones(&d.inner) {
                Ok(p) => put_string(out, jones_text(&p)),
                Err(e) => fail(status_of(&e), &e.to_string()),
            },
            None => fail(LINKDIAG_NULL_ARGUMENT, "diagram handle is null"),
        }
    })
}

fn counts_of(r: &SatelliteResult) -> linkdiag_satellite_counts {
    linkdiag_satellite_counts {
        raw_crossings: r.raw_crossings as u64,
        reduced_crossings: r.reduced_crossings as u64,
        pattern_crossings: r.pattern_crossings as u64,
        companion_crossings: r.companion_crossings as u64,
        doubled_crossings: r.doubled_crossings as u64,
        double_linking: r.double_linking,
        wrapping: r.wrapping as u64,
        components: r.output.n_components() as u64,
        framing: r.framing,
        reliable: r.reliable,
    }
}

unsafe fn put_satellite(
    r: SatelliteResult,
    out_diagram: *mut *mut linkdiag_diagram,
    out_counts: *mut linkdiag_satellite_counts,
) -> linkdiag_status {
    if !out_counts.is_null() {
        *out_counts = counts_of(&r);
    }
    if !out_diagram.is_null() {
        return put_diagram(out_diagram, r.output);
    }
    LINKDIAG_OK
}

/// Ties the companion knot into the pattern. The pattern diagram is placed
/// in the annulus automatically; it must wrap at least twice, so two-or-more
/// component patterns work while contained patterns are rejected. Either
/// out parameter may be null when only the other is wanted.
///
/// # Safety
/// Handles are live; non-null out parameters are writable.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_entangle(
    pattern: *const linkdiag_diagram,
    companion: *const linkdiag_diagram,
    reduce: bool,
    out_diagram: *mut *mut linkdiag_diagram,
    out_counts: *mut linkdiag_satellite_counts,
) -> linkdiag_status {
    guard(|| {
        if !out_diagram.is_null() {
            *out_diagram = std::ptr::null_mut();
        }
        if !out_counts.is_null() {
            *out_counts = linkdiag_satellite_counts::default();
        }
        let (Some(pattern), Some(companion)) = (pattern.as_ref(), companion.as_ref()) else {
            return fail(LINKDIAG_NULL_ARGUMENT, "diagram handle is null");
        };
        let embedded = find_companion_disk(&pattern.inner)
            .and_then(|disk| annular_embed(&pattern.inner, &disk));
        let annular = match embedded {
            Ok(a) => a,
            Err(e) => return fail(status_of(&e), &e.to_string()),
        };
        match entangle(&annular, &companion.inner, reduce) {
            Ok(r) => put_satellite(r, out_diagram, out_counts),
            Err(e) => fail(status_of(&e), &e.to_string()),
        }
    })
}

/// The 2-cable with a clasp: doubles the companion as drawn and joins the
/// copies into one strand, 4*cr+1 crossings. Writhe is not normalized, so
/// the framing field reports whether the input happened to have writhe 0.
///
/// # Safety
/// `companion` is a live handle; non-null out parameters are writable.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_cable(
    companion: *const linkdiag_diagram,
    out_diagram: *mut *mut linkdiag_diagram,
    out_counts: *mut linkdiag_satellite_counts,
) -> linkdiag_status {
    guard(|| {
        if !out_diagram.is_null() {
            *out_diagram = std::ptr::null_mut();
        }
        if !out_counts.is_null() {
            *out_counts = linkdiag_satellite_counts::default();
        }
        match companion.as_ref() {
            Some(c) => match cable(&c.inner) {
                Ok(r) => put_satellite(r, out_diagram, out_counts),
                Err(e) => fail(status_of(&e), &e.to_string()),
            },
            None => fail(LINKDIAG_NULL_ARGUMENT, "diagram handle is null"),
        }
    })
}

/// Minimal intersections of the diagram with a spanning arc, after the
/// automatic annulus placement.
///
/// # Safety
/// `d` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_wrapping_number(
    d: *const linkdiag_diagram,
    out: *mut u64,
) -> linkdiag_status {
    guard(|| {
        if out.is_null() {
            return fail(LINKDIAG_NULL_ARGUMENT, "out argument is null");
        }
        *out = 0;
        let Some(d) = d.as_ref() else {
            return fail(LINKDIAG_NULL_ARGUMENT, "diagram handle is null");
        };
        let embedded =
            find_companion_disk(&d.inner).and_then(|disk| annular_embed(&d.inner, &disk));
        match embedded {
            Ok(a) => {
                *out = a.wrapping_number() as u64;
                LINKDIAG_OK
            }
            Err(e) => fail(status_of(&e), &e.to_string()),
        }
    })
}

/// Diagram census up to `max_n` crossings in the text table format.
/// `workers` 0 means one thread per available core; counts are identical
/// for every worker count. `mirror_identified` folds mirror images together.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_census_csk(
    max_n: u64,
    workers: u64,
    mirror_identified: bool,
    out: *mut *mut c_char,
) -> linkdiag_status {
    guard(|| {
        if out.is_null() {
            return fail(LINKDIAG_NULL_ARGUMENT, "out argument is null");
        }
        *out = std::ptr::null_mut();
        let opts = census::CensusOptions {
            workers: workers as usize,
            mirror_identified,
            ..census::CensusOptions::default()
        };
        match census::enumerate_diagrams_opts(max_n as usize, &opts) {
            Ok(table) => put_string(out, table.to_csk()),
            Err(e) => fail(status_of(&e), &e.to_string()),
        }
    })
}

/// Evaluates every built-in growth-constant comparison in exact rational
/// arithmetic and returns the report as JSON.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn linkdiag_bounds_json(out: *mut *mut c_char) -> linkdiag_status {
    guard(|| {
        if out.is_null() {
            return fail(LINKDIAG_NULL_ARGUMENT, "out argument is null");
        }
        *out = std::ptr::null_mut();
        let report = census::evaluate_constants();
        let json = serde_json::to_string(&report).expect("report always serializes");
        put_string(out, json)
    })
}
