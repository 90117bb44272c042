//! C ABI for tanaka-kit.
//!
//! Objects are opaque handles created by constructor calls and
//! released by the matching `tk_*_free`. Every fallible call returns a
//! [`TkStatus`]; on failure [`tk_last_error`] describes what went wrong.
//! Strings returned through out-parameters are owned by the caller and must be
//! released with [`tk_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tanaka_kit::crgeom::parse::parse_curve_json;
use tanaka_kit::crgeom::report::{tube_report, TubeOptions};
use tanaka_kit::crgeom::tube::{build_hyperquadric, build_tube, freeman, TubeModel, Variant};
use tanaka_kit::deform::{eliminate, DeformCase, DeformJson, DeformReport, VerdictKind};
use tanaka_kit::liealg::{LieAlgJson, LieAlgebra};
use tanaka_kit::prolong::{tanaka_prolong, Prolongation, SymbolAlgebra};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TkStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input document was malformed or inconsistent.
    InvalidInput = 3,
    /// The computation could not be carried out on valid input.
    Computation = 4,
    /// An output buffer was too small; the required length was written.
    BufferTooSmall = 5,
    /// An internal panic was caught at the boundary.
    Panic = 6,
}

/// Tube model construction.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TkVariant {
    /// `ψ = rγ + sγ'`.
    Tangent = 0,
    /// `ψ = γ + rγ' + sγ''`.
    Osculating = 1,
}

/// Outcome of eliminating a deformation system.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TkVerdict {
    Inconsistent = 0,
    Consistent = 1,
    Residual = 2,
}

/// Ranks of the Freeman filtration of a tube model.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TkFreemanRanks {
    pub bracket_generating: bool,
    pub d10: usize,
    pub k10: usize,
    pub l10: usize,
    pub hol_nondeg: bool,
    pub three_nondegenerate: bool,
}

/// Include bracket inclusion checks in a tube report.
pub const TK_TUBE_INCLUSIONS: u32 = 1;
/// Include normalized sections in a tube report.
pub const TK_TUBE_SECTIONS: u32 = 2;
/// Include symmetry checks in a tube report.
pub const TK_TUBE_SYMMETRIES: u32 = 4;

/// A Lie algebra with a graded or filtered basis.
pub struct TkAlgebra(LieAlgebra);

/// A Tanaka prolongation computed up to some degree.
pub struct TkProlongation(Prolongation);

/// A tube over a curve (or the hyperquadric model).
pub struct TkTube(TubeModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Error(TkStatus, String);

impl Error {
    fn input(e: impl ToString) -> Self {
        Error(TkStatus::InvalidInput, e.to_string())
    }
    fn computation(e: impl ToString) -> Self {
        Error(TkStatus::Computation, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Error>) -> TkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TkStatus::Ok
        }
        Ok(Err(Error(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(p) => {
            let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned()).unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            TkStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Error> {
    if s.is_null() {
        return Err(Error(TkStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Error(TkStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Error> {
    p.as_mut().ok_or_else(|| Error(TkStatus::NullPointer, format!("{what} is null")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Error> {
    p.as_ref().ok_or_else(|| Error(TkStatus::NullPointer, format!("{what} is null")))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

fn to_json(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

/// Message for the last failed call on this thread, or null after a
/// successful one. Valid until the next `tk_*` call on the same thread.
#[no_mangle]
pub extern "C" fn tk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn tk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn tk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a `liealg.v1` JSON document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out_alg` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tk_algebra_from_json(json: *const c_char, out_alg: *mut *mut TkAlgebra) -> TkStatus {
    guard(|| {
        let slot = out(out_alg, "out_alg")?;
        *slot = ptr::null_mut();
        let doc: LieAlgJson = serde_json::from_str(text(json, "json")?).map_err(Error::input)?;
        let alg = LieAlgebra::from_json(&doc).map_err(Error::input)?;
        *slot = Box::into_raw(Box::new(TkAlgebra(alg)));
        Ok(())
    })
}

/// Dimension of the algebra; 0 for a null handle.
///
/// # Safety
/// `alg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tk_algebra_dim(alg: *const TkAlgebra) -> usize {
    alg.as_ref().map_or(0, |a| a.0.dim())
}

/// Whether the bracket table satisfies the Jacobi identity.
///
/// # Safety
/// `alg` must be a live handle; `out_ok` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tk_algebra_check_jacobi(alg: *const TkAlgebra, out_ok: *mut bool) -> TkStatus {
    guard(|| {
        let a = handle(alg, "alg")?;
        *out(out_ok, "out_ok")? = a.0.check_jacobi().passed();
        Ok(())
    })
}

/// Release an algebra. Null is ignored.
///
/// # Safety
/// `alg` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tk_algebra_free(alg: *mut TkAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Tanaka prolongation of the negative part of `alg` up to degree `kmax`.
///
/// # Safety
/// `alg` must be a live handle; `out_prolongation` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tk_prolong(alg: *const TkAlgebra, kmax: usize, out_prolongation: *mut *mut TkProlongation) -> TkStatus {
    guard(|| {
        let slot = out(out_prolongation, "out_prolongation")?;
        *slot = ptr::null_mut();
        let a = handle(alg, "alg")?;
        let sym = SymbolAlgebra::new(a.0.clone()).map_err(Error::input)?;
        let p = tanaka_prolong(&sym, kmax).map_err(Error::computation)?;
        *slot = Box::into_raw(Box::new(TkProlongation(p)));
        Ok(())
    })
}

/// Total dimension of the prolonged algebra; 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tk_prolongation_total(p: *const TkProlongation) -> usize {
    p.as_ref().map_or(0, |p| p.0.total())
}

/// Copy the dimensions of the positive degrees `1..=kmax` into `buf`.
/// `out_len` receives the number of degrees; if `cap` is smaller, nothing is
/// copied and `TK_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `p` must be a live handle; `buf` must hold `cap` elements (may be null
/// when `cap` is 0); `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tk_prolongation_dims(p: *const TkProlongation, buf: *mut usize, cap: usize, out_len: *mut usize) -> TkStatus {
    guard(|| {
        let dims = handle(p, "p")?.0.dims();
        *out(out_len, "out_len")? = dims.len();
        if dims.len() > cap {
            return Err(Error(TkStatus::BufferTooSmall, format!("need {} entries, have {cap}", dims.len())));
        }
        if !dims.is_empty() {
            if buf.is_null() {
                return Err(Error(TkStatus::NullPointer, "buf is null".into()));
            }
            std::slice::from_raw_parts_mut(buf, dims.len()).copy_from_slice(&dims);
        }
        Ok(())
    })
}

/// Whether the prolongation vanished at some degree `<= kmax`.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tk_prolongation_terminated(p: *const TkProlongation) -> bool {
    p.as_ref().is_some_and(|p| p.0.terminated)
}

/// JSON report: dimensions, basis cochains and genericity assumptions.
///
/// # Safety
/// `p` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tk_prolongation_report_json(p: *const TkProlongation, out_json: *mut *mut c_char) -> TkStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = ptr::null_mut();
        *slot = c_string(to_json(&handle(p, "p")?.0.report()));
        Ok(())
    })
}

/// Release a prolongation. Null is ignored.
///
/// # Safety
/// `p` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tk_prolongation_free(p: *mut TkProlongation) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Build a tube model from a `curve.v1` JSON document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out_tube` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tk_tube_from_curve_json(json: *const c_char, variant: TkVariant, out_tube: *mut *mut TkTube) -> TkStatus {
    guard(|| {
        let slot = out(out_tube, "out_tube")?;
        *slot = ptr::null_mut();
        let curve = parse_curve_json(text(json, "json")?).map_err(Error::input)?;
        let v = match variant {
            TkVariant::Tangent => Variant::TangentVariety,
            TkVariant::Osculating => Variant::OsculatingRuled,
        };
        let m = build_tube(&curve, v).map_err(Error::input)?;
        *slot = Box::into_raw(Box::new(TkTube(m)));
        Ok(())
    })
}

/// The tube model of the hyperquadric.
///
/// # Safety
/// `out_tube` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tk_tube_hyperquadric(out_tube: *mut *mut TkTube) -> TkStatus {
    guard(|| {
        *out(out_tube, "out_tube")? = Box::into_raw(Box::new(TkTube(build_hyperquadric())));
        Ok(())
    })
}

/// Freeman filtration ranks of the tube.
///
/// # Safety
/// `tube` must be a live handle; `out_ranks` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tk_tube_ranks(tube: *const TkTube, out_ranks: *mut TkFreemanRanks) -> TkStatus {
    guard(|| {
        let slot = out(out_ranks, "out_ranks")?;
        let r = freeman(&handle(tube, "tube")?.0).map_err(Error::computation)?.ranks();
        *slot = TkFreemanRanks {
            bracket_generating: r.bracket_generating,
            d10: r.d10,
            k10: r.k10,
            l10: r.l10,
            hol_nondeg: r.hol_nondeg,
            three_nondegenerate: r.three_nondegenerate(),
        };
        Ok(())
    })
}

/// JSON tube report; `flags` is a combination of `TK_TUBE_*`.
///
/// # Safety
/// `tube` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tk_tube_report_json(tube: *const TkTube, flags: u32, out_json: *mut *mut c_char) -> TkStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = ptr::null_mut();
        let opts = TubeOptions {
            inclusions: flags & TK_TUBE_INCLUSIONS != 0,
            sections: flags & TK_TUBE_SECTIONS != 0,
            symmetries: flags & TK_TUBE_SYMMETRIES != 0,
        };
        let rep = tube_report(&handle(tube, "tube")?.0, opts).map_err(Error::computation)?;
        *slot = c_string(to_json(&rep));
        Ok(())
    })
}

/// Release a tube. Null is ignored.
///
/// # Safety
/// `tube` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tk_tube_free(tube: *mut TkTube) {
    if !tube.is_null() {
        drop(Box::from_raw(tube));
    }
}

/// Eliminate the deformation system of a `deform.v1` document. Writes the
/// verdict and, if `out_json` is non-null, the full JSON report with branch
/// traces and certificates.
///
/// # Safety
/// `json` must be a nul-terminated string; `out_verdict` must be writable;
/// `out_json` may be null.
#[no_mangle]
pub unsafe extern "C" fn tk_deform_json(json: *const c_char, out_verdict: *mut TkVerdict, out_json: *mut *mut c_char) -> TkStatus {
    guard(|| {
        let verdict = out(out_verdict, "out_verdict")?;
        if let Some(s) = out_json.as_mut() {
            *s = ptr::null_mut();
        }
        let doc: DeformJson = serde_json::from_str(text(json, "json")?).map_err(Error::input)?;
        let case = DeformCase::from_json(&doc).map_err(Error::input)?;
        let ds = case.system().map_err(Error::input)?;
        let el = eliminate(&ds);
        *verdict = match el.verdict {
            VerdictKind::Inconsistent => TkVerdict::Inconsistent,
            VerdictKind::Consistent => TkVerdict::Consistent,
            VerdictKind::Residual => TkVerdict::Residual,
        };
        if let Some(s) = out_json.as_mut() {
            *s = c_string(to_json(&DeformReport::new(&case, &ds, &el)));
        }
        Ok(())
    })
}
