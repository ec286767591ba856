//! C ABI for the equality engine.
//!
//! All functions are panic-safe: internal panics surface as
//! `LAMEQ_STATUS_INTERNAL` instead of unwinding across the boundary. Strings
//! returned through out-pointers are NUL-terminated, allocated by this
//! library, and must be released with `lameq_string_free`. Certificates can
//! also be held as opaque handles for repeated verification without
//! re-parsing.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lameq::algo::{check_tm_eq, decide_tm_eq_with_fuel, AlgoError, TmEqDeriv};
use lameq::cert::{parse_decl_derivation, parse_tm_eq_certificate, tm_eq_certificate};
use lameq::decl::check_decl;
use lameq::logrel::completeness;
use lameq::reduction::whnf;
use lameq::syntax::{type_check, EqStatement};
use lameq::text::{parse_ctx, parse_term, parse_type, print_term};

/// Success; for `lameq_eq` the terms are equivalent, for verification the
/// certificate is valid.
pub const LAMEQ_STATUS_OK: i32 = 0;
/// Negative result: terms not equivalent, or a derivation failed to check.
pub const LAMEQ_STATUS_NEGATIVE: i32 = 1;
/// Unparseable or ill-typed input.
pub const LAMEQ_STATUS_BAD_INPUT: i32 = 2;
/// The step budget ran out during normalization.
pub const LAMEQ_STATUS_FUEL: i32 = 3;
/// An internal invariant failed.
pub const LAMEQ_STATUS_INTERNAL: i32 = 4;

/// An equality certificate together with its statement.
pub struct LameqCert {
    names: Vec<String>,
    stmt: EqStatement,
    deriv: TmEqDeriv,
}

unsafe fn read_str<'a>(p: *const c_char) -> Option<&'a str> {
    if p.is_null() {
        return None;
    }
    CStr::from_ptr(p).to_str().ok()
}

fn write_out(out: *mut *mut c_char, s: String) {
    if out.is_null() {
        return;
    }
    let c = CString::new(s).unwrap_or_else(|_| CString::new("invalid string").unwrap());
    unsafe { *out = c.into_raw() };
}

fn clear_out(out: *mut *mut c_char) {
    if !out.is_null() {
        unsafe { *out = ptr::null_mut() };
    }
}

fn guard(out_err: *mut *mut c_char, body: impl FnOnce() -> i32) -> i32 {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(code) => code,
        Err(_) => {
            write_out(out_err, "internal error".to_string());
            LAMEQ_STATUS_INTERNAL
        }
    }
}

/// Decides equivalence of `left` and `right` at `ty` in `ctx` (all in
/// concrete syntax). On equivalence writes the certificate JSON to
/// `cert_out` (when non-NULL) and returns `LAMEQ_STATUS_OK`; otherwise
/// returns a status code and writes a diagnostic to `err_out`.
///
/// # Safety
/// `ctx`, `left`, `right`, and `ty` must be valid NUL-terminated strings.
/// `cert_out` and `err_out` may be NULL; when non-NULL they must point to
/// writable `char*` slots.
#[no_mangle]
pub unsafe extern "C" fn lameq_eq(
    ctx: *const c_char,
    left: *const c_char,
    right: *const c_char,
    ty: *const c_char,
    fuel: u64,
    cert_out: *mut *mut c_char,
    err_out: *mut *mut c_char,
) -> i32 {
    clear_out(cert_out);
    clear_out(err_out);
    let (Some(ctx_src), Some(left_src), Some(right_src), Some(ty_src)) =
        (read_str(ctx), read_str(left), read_str(right), read_str(ty))
    else {
        write_out(err_out, "NULL or non-UTF-8 argument".to_string());
        return LAMEQ_STATUS_BAD_INPUT;
    };
    guard(err_out, || {
        let (names, ctx) = match parse_ctx(ctx_src) {
            Ok(c) => c,
            Err(e) => {
                write_out(err_out, e.to_string());
                return LAMEQ_STATUS_BAD_INPUT;
            }
        };
        let parsed = parse_term(left_src, &names)
            .and_then(|l| parse_term(right_src, &names).map(|r| (l, r)));
        let (left, right) = match parsed {
            Ok(p) => p,
            Err(e) => {
                write_out(err_out, e.to_string());
                return LAMEQ_STATUS_BAD_INPUT;
            }
        };
        let ty = match parse_type(ty_src) {
            Ok(t) => t,
            Err(e) => {
                write_out(err_out, e.to_string());
                return LAMEQ_STATUS_BAD_INPUT;
            }
        };
        if !type_check(&ctx, &left, &ty) || !type_check(&ctx, &right, &ty) {
            write_out(err_out, "term does not have the given type".to_string());
            return LAMEQ_STATUS_BAD_INPUT;
        }
        match decide_tm_eq_with_fuel(&ctx, &left, &right, &ty, fuel as usize) {
            Ok(Some(deriv)) => {
                if !cert_out.is_null() {
                    let stmt = EqStatement::new(ctx, left, right, ty);
                    match tm_eq_certificate(&names, &stmt, &deriv) {
                        Ok(text) => write_out(cert_out, text),
                        Err(e) => {
                            write_out(err_out, e.to_string());
                            return LAMEQ_STATUS_INTERNAL;
                        }
                    }
                }
                LAMEQ_STATUS_OK
            }
            Ok(None) => LAMEQ_STATUS_NEGATIVE,
            Err(AlgoError::FuelExhausted) => LAMEQ_STATUS_FUEL,
            Err(e) => {
                write_out(err_out, e.to_string());
                LAMEQ_STATUS_BAD_INPUT
            }
        }
    })
}

/// Verifies a certificate passed as JSON text.
///
/// # Safety
/// `cert_json` must be a valid NUL-terminated string; `err_out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn lameq_verify(
    cert_json: *const c_char,
    err_out: *mut *mut c_char,
) -> i32 {
    clear_out(err_out);
    let Some(src) = read_str(cert_json) else {
        write_out(err_out, "NULL or non-UTF-8 argument".to_string());
        return LAMEQ_STATUS_BAD_INPUT;
    };
    guard(err_out, || match parse_tm_eq_certificate(src) {
        Ok((_, stmt, deriv)) => {
            if check_tm_eq(&stmt.ctx, &deriv, &stmt.left, &stmt.right, &stmt.ty) {
                LAMEQ_STATUS_OK
            } else {
                LAMEQ_STATUS_NEGATIVE
            }
        }
        Err(e) => {
            write_out(err_out, e.to_string());
            LAMEQ_STATUS_BAD_INPUT
        }
    })
}

/// Translates a declarative derivation (JSON text) into an algorithmic
/// certificate, writing the certificate JSON to `cert_out`.
///
/// # Safety
/// `decl_json` must be a valid NUL-terminated string; `cert_out` and
/// `err_out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn lameq_translate(
    decl_json: *const c_char,
    cert_out: *mut *mut c_char,
    err_out: *mut *mut c_char,
) -> i32 {
    clear_out(cert_out);
    clear_out(err_out);
    let Some(src) = read_str(decl_json) else {
        write_out(err_out, "NULL or non-UTF-8 argument".to_string());
        return LAMEQ_STATUS_BAD_INPUT;
    };
    guard(err_out, || {
        let (names, ctx, deriv) = match parse_decl_derivation(src) {
            Ok(parts) => parts,
            Err(e) => {
                write_out(err_out, e.to_string());
                return LAMEQ_STATUS_BAD_INPUT;
            }
        };
        if !check_decl(&ctx, &deriv, &deriv.left.clone(), &deriv.right.clone(), &deriv.ty.clone())
        {
            write_out(err_out, "invalid declarative derivation".to_string());
            return LAMEQ_STATUS_NEGATIVE;
        }
        let translated = match completeness(&ctx, &deriv) {
            Ok(t) => t,
            Err(e) => {
                write_out(err_out, e.to_string());
                return LAMEQ_STATUS_NEGATIVE;
            }
        };
        let stmt = EqStatement::new(ctx, deriv.left, deriv.right, deriv.ty);
        match tm_eq_certificate(&names, &stmt, &translated) {
            Ok(text) => {
                write_out(cert_out, text);
                LAMEQ_STATUS_OK
            }
            Err(e) => {
                write_out(err_out, e.to_string());
                LAMEQ_STATUS_INTERNAL
            }
        }
    })
}

/// Reduces `term` to weak head normal form; writes a JSON object with the
/// printed normal form and the step trace to `result_out`.
///
/// # Safety
/// `ctx` and `term` must be valid NUL-terminated strings; `result_out` and
/// `err_out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn lameq_whnf(
    ctx: *const c_char,
    term: *const c_char,
    fuel: u64,
    result_out: *mut *mut c_char,
    err_out: *mut *mut c_char,
) -> i32 {
    clear_out(result_out);
    clear_out(err_out);
    let (Some(ctx_src), Some(term_src)) = (read_str(ctx), read_str(term)) else {
        write_out(err_out, "NULL or non-UTF-8 argument".to_string());
        return LAMEQ_STATUS_BAD_INPUT;
    };
    guard(err_out, || {
        let (names, _) = match parse_ctx(ctx_src) {
            Ok(c) => c,
            Err(e) => {
                write_out(err_out, e.to_string());
                return LAMEQ_STATUS_BAD_INPUT;
            }
        };
        let term = match parse_term(term_src, &names) {
            Ok(t) => t,
            Err(e) => {
                write_out(err_out, e.to_string());
                return LAMEQ_STATUS_BAD_INPUT;
            }
        };
        match whnf(&term, fuel as usize) {
            Ok((normal, trace)) => {
                let steps: Vec<String> = trace
                    .steps()
                    .iter()
                    .map(|s| format!("{{\"depth\":{}}}", s.depth()))
                    .collect();
                let printed = print_term(&normal, &names).replace('\\', "\\\\");
                write_out(
                    result_out,
                    format!("{{\"term\":\"{printed}\",\"steps\":[{}]}}", steps.join(",")),
                );
                LAMEQ_STATUS_OK
            }
            Err(_) => LAMEQ_STATUS_FUEL,
        }
    })
}

/// Parses a certificate into an opaque handle for repeated use.
///
/// # Safety
/// `cert_json` must be a valid NUL-terminated string; `out` must point to a
/// writable handle slot; `err_out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn lameq_cert_parse(
    cert_json: *const c_char,
    out: *mut *mut LameqCert,
    err_out: *mut *mut c_char,
) -> i32 {
    clear_out(err_out);
    if out.is_null() {
        write_out(err_out, "NULL output slot".to_string());
        return LAMEQ_STATUS_BAD_INPUT;
    }
    *out = ptr::null_mut();
    let Some(src) = read_str(cert_json) else {
        write_out(err_out, "NULL or non-UTF-8 argument".to_string());
        return LAMEQ_STATUS_BAD_INPUT;
    };
    guard(err_out, || match parse_tm_eq_certificate(src) {
        Ok((names, stmt, deriv)) => {
            let cert = Box::new(LameqCert { names, stmt, deriv });
            unsafe { *out = Box::into_raw(cert) };
            LAMEQ_STATUS_OK
        }
        Err(e) => {
            write_out(err_out, e.to_string());
            LAMEQ_STATUS_BAD_INPUT
        }
    })
}

/// Verifies a parsed certificate handle.
///
/// # Safety
/// `cert` must be a handle from `lameq_cert_parse` that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn lameq_cert_verify(cert: *const LameqCert) -> i32 {
    if cert.is_null() {
        return LAMEQ_STATUS_BAD_INPUT;
    }
    let cert = &*cert;
    match catch_unwind(AssertUnwindSafe(|| {
        check_tm_eq(
            &cert.stmt.ctx,
            &cert.deriv,
            &cert.stmt.left,
            &cert.stmt.right,
            &cert.stmt.ty,
        )
    })) {
        Ok(true) => LAMEQ_STATUS_OK,
        Ok(false) => LAMEQ_STATUS_NEGATIVE,
        Err(_) => LAMEQ_STATUS_INTERNAL,
    }
}

/// Re-serializes a certificate handle to canonical JSON.
///
/// # Safety
/// `cert` must be a live handle from `lameq_cert_parse`; `out` must point to
/// a writable `char*` slot.
#[no_mangle]
pub unsafe extern "C" fn lameq_cert_to_json(
    cert: *const LameqCert,
    out: *mut *mut c_char,
) -> i32 {
    if cert.is_null() || out.is_null() {
        return LAMEQ_STATUS_BAD_INPUT;
    }
    *out = ptr::null_mut();
    let cert = &*cert;
    match catch_unwind(AssertUnwindSafe(|| {
        tm_eq_certificate(&cert.names, &cert.stmt, &cert.deriv)
    })) {
        Ok(Ok(text)) => {
            write_out(out, text);
            LAMEQ_STATUS_OK
        }
        Ok(Err(_)) => LAMEQ_STATUS_BAD_INPUT,
        Err(_) => LAMEQ_STATUS_INTERNAL,
    }
}

/// Releases a certificate handle.
///
/// # Safety
/// `cert` must be NULL or a handle from `lameq_cert_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lameq_cert_free(cert: *mut LameqCert) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a string returned through one of this library's
/// out-pointers, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lameq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
