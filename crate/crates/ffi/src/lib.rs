//! C ABI over the patchscope library.
//!
//! Every fallible function returns a [`PsStatus`]; on failure the message is
//! available from [`ps_last_error`] on the same thread.  Handles are opaque
//! and released with their `_free` function; strings returned through
//! `char **` are released with [`ps_string_free`].

use patchscope::body::Body;
use patchscope::face_family::hausdorff;
use patchscope::hyperbolic::{check_hyperbolic, HyperbolicCone};
use patchscope::normal_cycle::{sample_normal_cycle, to_jsonl, NormalCyclePair, Strategy};
use patchscope::patch::{run_pipeline, PipelineParams};
use patchscope::poly::{parse_rational, Rational};
use patchscope::{canonical, gallery, Error, Polynomial};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidInput = 2,
    Parse = 3,
    DimensionMismatch = 4,
    NonConvergence = 5,
    Unbounded = 6,
    /// The point is not where the operation requires it (inside, outside,
    /// singular, higher multiplicity, not supporting).
    Domain = 7,
    Empty = 8,
    Io = 9,
    Panic = 10,
}

/// A convex body.
pub struct PsBody(Body);

/// A hyperbolic polynomial with its direction.
pub struct PsCone(HyperbolicCone);

/// Sampled normal-cycle pairs.
pub struct PsPairs(Vec<NormalCyclePair>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PsStatus {
    match e {
        Error::DimensionMismatch { .. } => PsStatus::DimensionMismatch,
        Error::Parse(_) => PsStatus::Parse,
        Error::NonConvergence(_) => PsStatus::NonConvergence,
        Error::Unbounded(_) => PsStatus::Unbounded,
        Error::InsideBody
        | Error::OriginNotInterior(_)
        | Error::NotOnUnitShell(_)
        | Error::SingularPoint
        | Error::HighMultiplicity(_)
        | Error::OutsideCone
        | Error::NotSupporting(_)
        | Error::Degenerate(_) => PsStatus::Domain,
        Error::Empty(_) => PsStatus::Empty,
        Error::Io(_) => PsStatus::Io,
        _ => PsStatus::InvalidInput,
    }
}

enum Fail {
    Null,
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PsStatus::Ok
        }
        Ok(Err(Fail::Null)) => {
            set_error("null argument");
            PsStatus::NullArgument
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            PsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::Null);
    }
    CStr::from_ptr(s).to_str().map_err(|e| Fail::Lib(Error::Parse(e.to_string())))
}

unsafe fn slice_arg<'a, T>(p: *const T, n: usize) -> Result<&'a [T], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null);
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|e| Fail::Lib(Error::InvalidInput(e.to_string())))?;
    put(out, c.into_raw())
}

unsafe fn points_arg(p: *const f64, n_points: usize, dim: usize) -> Result<Vec<Vec<f64>>, Fail> {
    let flat = slice_arg(p, n_points.checked_mul(dim).ok_or(Fail::Lib(Error::InvalidInput("size overflow".into())))?)?;
    if dim == 0 {
        return Err(Fail::Lib(Error::InvalidInput("dimension must be positive".into())));
    }
    Ok(flat.chunks(dim).map(<[f64]>::to_vec).collect())
}

fn rationals(s: &str) -> Result<Vec<Rational>, Error> {
    s.split(',').map(|t| parse_rational(t.trim()).ok_or_else(|| Error::Parse(format!("not a rational number: {t:?}")))).collect()
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn ps_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn ps_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` is null or came from this library and was not freed before.
#[no_mangle]
pub unsafe extern "C" fn ps_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Body from its JSON description.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ps_body_from_json(json: *const c_char, out: *mut *mut PsBody) -> PsStatus {
    guard(|| {
        let b = Body::from_json(str_arg(json)?)?;
        put(out, Box::into_raw(Box::new(PsBody(b))))
    })
}

/// Body of a named gallery example.
///
/// # Safety
/// `name` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ps_body_from_gallery(name: *const c_char, out: *mut *mut PsBody) -> PsStatus {
    guard(|| {
        let e = gallery::entry(str_arg(name)?)?;
        put(out, Box::into_raw(Box::new(PsBody(e.body))))
    })
}

/// # Safety
/// `b` is null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ps_body_free(b: *mut PsBody) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Ambient dimension; 0 for a null handle.
///
/// # Safety
/// `b` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_body_dim(b: *const PsBody) -> usize {
    b.as_ref().map_or(0, |b| b.0.ambient_dim())
}

/// Metric projection of `x` (length `dim`) onto the body, written to `out`.
///
/// # Safety
/// `x` and `out` hold `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn ps_body_project(b: *const PsBody, x: *const f64, dim: usize, out: *mut f64) -> PsStatus {
    guard(|| {
        let p = ref_arg(b)?.0.project(slice_arg(x, dim)?)?;
        write_vec(out, &p)
    })
}

/// Support value `max <l, x>` and a maximiser (written to `maximizer`).
///
/// # Safety
/// `l` and `maximizer` hold `dim` doubles; `value` is writable.
#[no_mangle]
pub unsafe extern "C" fn ps_body_support(
    b: *const PsBody,
    l: *const f64,
    dim: usize,
    value: *mut f64,
    maximizer: *mut f64,
) -> PsStatus {
    guard(|| {
        let s = ref_arg(b)?.0.support(slice_arg(l, dim)?)?;
        put(value, s.value)?;
        write_vec(maximizer, &s.maximizer)
    })
}

unsafe fn write_vec(out: *mut f64, v: &[f64]) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
    Ok(())
}

/// Sample `n` normal-cycle pairs; `strategy` is `k1-rayshoot`,
/// `dual-directions` or `primal-stab`.
///
/// # Safety
/// `strategy` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ps_ncycle_sample(
    b: *const PsBody,
    n: usize,
    strategy: *const c_char,
    seed: u64,
    out: *mut *mut PsPairs,
) -> PsStatus {
    guard(|| {
        let s: Strategy = str_arg(strategy)?.parse()?;
        let pairs = sample_normal_cycle(&ref_arg(b)?.0, n, s, seed)?;
        put(out, Box::into_raw(Box::new(PsPairs(pairs))))
    })
}

/// # Safety
/// `p` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_pairs_free(p: *mut PsPairs) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of pairs; 0 for a null handle.
///
/// # Safety
/// `p` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_pairs_len(p: *const PsPairs) -> usize {
    p.as_ref().map_or(0, |p| p.0.len())
}

/// Pair `i`: `x` and `ell` (each `dim` doubles) and its residual.
///
/// # Safety
/// `x` and `ell` hold the body dimension in doubles; `residual` is writable.
#[no_mangle]
pub unsafe extern "C" fn ps_pairs_get(p: *const PsPairs, i: usize, x: *mut f64, ell: *mut f64, residual: *mut f64) -> PsStatus {
    guard(|| {
        let pair = ref_arg(p)?.0.get(i).ok_or_else(|| Error::InvalidInput(format!("pair index {i} out of range")))?;
        write_vec(x, &pair.x)?;
        write_vec(ell, &pair.ell)?;
        put(residual, pair.residual)
    })
}

/// The pairs as JSON lines.
///
/// # Safety
/// `out` is writable; free the result with [`ps_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ps_pairs_to_jsonl(p: *const PsPairs, out: *mut *mut c_char) -> PsStatus {
    guard(|| put_string(out, to_jsonl(&ref_arg(p)?.0)))
}

/// Patch detection on `n_points` points of dimension `dim` (row major).
/// `theta <= 0` selects the automatic threshold.  `body` may be null; when
/// given, its defining polynomials label the facets.  Writes the report JSON.
///
/// # Safety
/// `points` holds `n_points * dim` doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ps_patches_report(
    points: *const f64,
    n_points: usize,
    dim: usize,
    body: *const PsBody,
    theta: f64,
    out: *mut *mut c_char,
) -> PsStatus {
    guard(|| {
        let pts = points_arg(points, n_points, dim)?;
        let params = PipelineParams { theta: (theta > 0.0).then_some(theta), ..Default::default() };
        let an = run_pipeline(&pts, body.as_ref().map(|b| &b.0), &params)?;
        put_string(out, canonical::to_string(&an.report))
    })
}

/// Hausdorff distance between two point sets of dimension `dim`.
///
/// # Safety
/// `a` holds `na * dim` and `b` holds `nb * dim` doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ps_hausdorff(a: *const f64, na: usize, b: *const f64, nb: usize, dim: usize, out: *mut f64) -> PsStatus {
    guard(|| {
        let d = hausdorff(&points_arg(a, na, dim)?, &points_arg(b, nb, dim)?)?;
        put(out, d)
    })
}

/// Cone of `poly` (text form, or one of `lorentz`, `cayley`,
/// `hyperb_quartic`) with direction `e` (comma-separated rationals).
///
/// # Safety
/// `poly` and `e` are NUL-terminated strings; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ps_cone_new(poly: *const c_char, e: *const c_char, out: *mut *mut PsCone) -> PsStatus {
    guard(|| {
        let e = rationals(str_arg(e)?)?;
        let text = str_arg(poly)?;
        let p = match gallery::poly_alias(text) {
            Some(p) => p,
            None => Polynomial::parse_with_nvars(text, e.len())?,
        };
        put(out, Box::into_raw(Box::new(PsCone(HyperbolicCone::new(p, e)?))))
    })
}

/// # Safety
/// `c` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_cone_free(c: *mut PsCone) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Exact membership of `x` (comma-separated rationals); writes 1 or 0.
///
/// # Safety
/// `x` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ps_cone_contains(c: *const PsCone, x: *const c_char, out: *mut i32) -> PsStatus {
    guard(|| {
        let m = ref_arg(c)?.0.contains(&rationals(str_arg(x)?)?)?;
        put(out, m as i32)
    })
}

/// Floating-point membership of `x` (length `n`) with tolerance `tol`.
///
/// # Safety
/// `x` holds `n` doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ps_cone_contains_f64(c: *const PsCone, x: *const f64, n: usize, tol: f64, out: *mut i32) -> PsStatus {
    guard(|| {
        let m = ref_arg(c)?.0.contains_f64(slice_arg(x, n)?, tol)?;
        put(out, m as i32)
    })
}

/// Multiplicity of `x` (comma-separated rationals) as a boundary point.
///
/// # Safety
/// `x` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ps_cone_multiplicity(c: *const PsCone, x: *const c_char, out: *mut usize) -> PsStatus {
    guard(|| {
        let m = ref_arg(c)?.0.multiplicity(&rationals(str_arg(x)?)?)?;
        put(out, m)
    })
}

/// Dimension of the face containing the regular boundary point `x`.
///
/// # Safety
/// `x` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ps_cone_face_dim(c: *const PsCone, x: *const c_char, out: *mut usize) -> PsStatus {
    guard(|| {
        let d = ref_arg(c)?.0.renegar_face_dim(&rationals(str_arg(x)?)?)?;
        put(out, d)
    })
}

/// Monte Carlo hyperbolicity check; writes the certificate JSON.
///
/// # Safety
/// `out` is writable; free the result with [`ps_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ps_cone_check(c: *const PsCone, samples: usize, seed: u64, out: *mut *mut c_char) -> PsStatus {
    guard(|| {
        let r = check_hyperbolic(&ref_arg(c)?.0, samples, seed)?;
        put_string(out, canonical::to_string(&r))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::NonConvergence("x".into())), PsStatus::NonConvergence);
        assert_eq!(status_of(&Error::HighMultiplicity(2)), PsStatus::Domain);
        assert_eq!(status_of(&Error::DimensionMismatch { expected: 3, got: 2 }), PsStatus::DimensionMismatch);
        assert_eq!(status_of(&Error::ZeroPolynomial), PsStatus::InvalidInput);
    }

    #[test]
    fn panics_become_status() {
        assert_eq!(guard(|| panic!("boom")), PsStatus::Panic);
        assert_eq!(unsafe { CStr::from_ptr(ps_last_error()) }.to_str().unwrap(), "internal panic");
        assert_eq!(guard(|| Ok(())), PsStatus::Ok);
    }
}
