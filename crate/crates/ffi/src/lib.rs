//! C ABI for `sspec`.
//!
//! Matrices and shift operators are opaque handles created by `*_new`/`*_from_json`
//! constructors and released with the matching `*_free`. Every fallible call returns
//! an [`SspecStatus`]; the message of the last failure on the calling thread is
//! available from [`sspec_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sspec::shiftlab::{self, ShiftOp};
use sspec::{Error, QMatrix, Quaternion};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SspecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Numeric = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Opaque quaternionic matrix.
pub struct SspecMatrix(QMatrix);

/// Opaque shift-plus-finite-rank operator.
pub struct SspecShiftOp(ShiftOp);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SspecIndex {
    pub dim_ker: usize,
    pub dim_coker: usize,
    pub index: i64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> SspecStatus {
    if e.is_numeric() {
        SspecStatus::Numeric
    } else {
        SspecStatus::InvalidInput
    }
}

fn guard(f: impl FnOnce() -> Result<(), (SspecStatus, String)>) -> SspecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SspecStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SspecStatus::Panic
        }
    }
}

fn fail<T>(e: Error) -> Result<T, (SspecStatus, String)> {
    Err((status_of(&e), e.to_string()))
}

fn null(what: &str) -> (SspecStatus, String) {
    (SspecStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (SspecStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|e| {
        (
            SspecStatus::InvalidInput,
            format!("`{what}` is not UTF-8: {e}"),
        )
    })
}

unsafe fn read_q(q: *const f64) -> Result<Quaternion, (SspecStatus, String)> {
    if q.is_null() {
        return Err(null("q"));
    }
    let a = std::slice::from_raw_parts(q, 4);
    Ok(Quaternion::new(a[0], a[1], a[2], a[3]))
}

/// Copies the last error message (NUL-terminated, truncated to `cap`) into `buf` and
/// returns the full message length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn sspec_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sspec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds an `n×n` matrix from `4·n²` doubles, row-major, each entry as `w, x, y, z`.
///
/// # Safety
/// `entries` must point to `4·n·n` readable doubles and `out` to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn sspec_matrix_new(
    n: usize,
    entries: *const f64,
    out: *mut *mut SspecMatrix,
) -> SspecStatus {
    guard(|| {
        if entries.is_null() {
            return Err(null("entries"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let len = n
            .checked_mul(n)
            .and_then(|m| m.checked_mul(4))
            .ok_or_else(|| {
                (
                    SspecStatus::InvalidInput,
                    format!("matrix size {n} overflows"),
                )
            })?;
        let raw = std::slice::from_raw_parts(entries, len);
        if raw.iter().any(|v| !v.is_finite()) {
            return fail(Error::Input("matrix entries must be finite".into()));
        }
        let m = QMatrix::from_fn(n, |i, j| {
            let k = 4 * (i * n + j);
            Quaternion::new(raw[k], raw[k + 1], raw[k + 2], raw[k + 3])
        });
        *out = Box::into_raw(Box::new(SspecMatrix(m)));
        Ok(())
    })
}

/// Parses a matrix from JSON `{"n": n, "entries": [[[w,x,y,z], ...], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn sspec_matrix_from_json(
    json: *const c_char,
    out: *mut *mut SspecMatrix,
) -> SspecStatus {
    guard(|| {
        let s = read_str(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let m: QMatrix = serde_json::from_str(s).or_else(|e| fail(e.into()))?;
        *out = Box::into_raw(Box::new(SspecMatrix(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sspec_matrix_free(m: *mut SspecMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Writes the S-spectrum as `(re, rad)` pairs into `out` (`2·cap` doubles) and the
/// number of spheres into `len`. Returns `BufferTooSmall` (with `len` set) if
/// `cap` spheres do not fit.
///
/// # Safety
/// `m` must be a live handle, `out` must point to `2·cap` writable doubles (or be
/// null when `cap = 0`), and `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sspec_matrix_s_spectrum(
    m: *const SspecMatrix,
    out: *mut f64,
    cap: usize,
    len: *mut usize,
) -> SspecStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("m"))?;
        if len.is_null() {
            return Err(null("len"));
        }
        let spheres = m.0.s_spectrum_exact().or_else(fail)?;
        *len = spheres.len();
        if spheres.len() > cap {
            return Err((
                SspecStatus::BufferTooSmall,
                format!("need room for {} spheres", spheres.len()),
            ));
        }
        if out.is_null() && !spheres.is_empty() {
            return Err(null("out"));
        }
        for (k, s) in spheres.iter().enumerate() {
            *out.add(2 * k) = s.re;
            *out.add(2 * k + 1) = s.rad;
        }
        Ok(())
    })
}

/// `σ_min(R_q(A))` for `q = (w, x, y, z)`.
///
/// # Safety
/// `m` must be a live handle, `q` must point to 4 doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn sspec_matrix_sigma_min_at(
    m: *const SspecMatrix,
    q: *const f64,
    out: *mut f64,
) -> SspecStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("m"))?;
        let q = read_q(q)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = m.0.char_elem(q).sigma_min();
        Ok(())
    })
}

/// One of `R`, `T`, `RT`, `V`, `Su`, `I`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn sspec_shift_named(
    name: *const c_char,
    out: *mut *mut SspecShiftOp,
) -> SspecStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let op = ShiftOp::named(name).or_else(fail)?;
        *out = Box::into_raw(Box::new(SspecShiftOp(op)));
        Ok(())
    })
}

/// Parses `{"coeff", "power", "fin", "terms"?, "domain"?}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn sspec_shift_from_json(
    json: *const c_char,
    out: *mut *mut SspecShiftOp,
) -> SspecStatus {
    guard(|| {
        let s = read_str(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let op = ShiftOp::from_json(s).or_else(fail)?;
        *out = Box::into_raw(Box::new(SspecShiftOp(op)));
        Ok(())
    })
}

/// # Safety
/// `op` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sspec_shift_free(op: *mut SspecShiftOp) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// `R_q(T)` as a new handle.
///
/// # Safety
/// `op` must be a live handle, `q` must point to 4 doubles, `out` a writable slot.
#[no_mangle]
pub unsafe extern "C" fn sspec_shift_char_elem(
    op: *const SspecShiftOp,
    q: *const f64,
    out: *mut *mut SspecShiftOp,
) -> SspecStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("op"))?;
        let q = read_q(q)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(SspecShiftOp(op.0.char_elem(q))));
        Ok(())
    })
}

/// Kernel, cokernel and index. Non-Fredholm operators give `Numeric`.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sspec_shift_index(
    op: *const SspecShiftOp,
    out: *mut SspecIndex,
) -> SspecStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("op"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = shiftlab::index(&op.0).or_else(fail)?;
        *out = SspecIndex {
            dim_ker: r.dim_ker,
            dim_coker: r.dim_coker,
            index: r.index,
        };
        Ok(())
    })
}

/// Whether `R_q(T)` is Fredholm.
///
/// # Safety
/// `op` must be a live handle, `q` must point to 4 doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn sspec_shift_fredholm_at(
    op: *const SspecShiftOp,
    q: *const f64,
    out: *mut bool,
) -> SspecStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("op"))?;
        let q = read_q(q)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = shiftlab::calkin_fredholm_at(&op.0, q).or_else(fail)?;
        Ok(())
    })
}

/// Norm estimate on the window of half-width `window`; `0` picks the window adaptively.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sspec_shift_norm(
    op: *const SspecShiftOp,
    window: usize,
    out: *mut f64,
) -> SspecStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("op"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = if window == 0 {
            shiftlab::op_norm(&op.0).value
        } else {
            shiftlab::op_norm_estimate(&op.0, window)
                .or_else(fail)?
                .value
        };
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn last_error() -> String {
        let mut buf = vec![0 as c_char; 256];
        let n = unsafe { sspec_last_error(buf.as_mut_ptr(), buf.len()) };
        let s = unsafe { CStr::from_ptr(buf.as_ptr()) }
            .to_str()
            .unwrap()
            .to_owned();
        assert_eq!(s.len(), n.min(255));
        s
    }

    #[test]
    fn matrix_spectrum() {
        let mut entries = [0.0; 16];
        entries[1] = 1.0; // (0,0) = i
        entries[12 + 2] = 1.0; // (1,1) = j
        let mut m = ptr::null_mut();
        unsafe {
            assert_eq!(
                sspec_matrix_new(2, entries.as_ptr(), &mut m),
                SspecStatus::Ok
            );
            let mut len = 0;
            assert_eq!(
                sspec_matrix_s_spectrum(m, ptr::null_mut(), 0, &mut len),
                SspecStatus::BufferTooSmall
            );
            assert_eq!(len, 1);
            let mut out = [0.0; 2];
            assert_eq!(
                sspec_matrix_s_spectrum(m, out.as_mut_ptr(), 1, &mut len),
                SspecStatus::Ok
            );
            assert!(out[0].abs() < 1e-9 && (out[1] - 1.0).abs() < 1e-9);
            let mut s = 1.0;
            assert_eq!(
                sspec_matrix_sigma_min_at(m, [0.0, 0.0, 0.0, 1.0].as_ptr(), &mut s),
                SspecStatus::Ok
            );
            assert!(s < 1e-12);
            sspec_matrix_free(m);
        }
    }

    #[test]
    fn json_and_errors() {
        let good = CString::new(r#"{"n":1,"entries":[[[2,0,0,0]]]}"#).unwrap();
        let bad = CString::new("{").unwrap();
        let mut m = ptr::null_mut();
        unsafe {
            assert_eq!(
                sspec_matrix_from_json(good.as_ptr(), &mut m),
                SspecStatus::Ok
            );
            sspec_matrix_free(m);
            assert_eq!(
                sspec_matrix_from_json(bad.as_ptr(), &mut m),
                SspecStatus::InvalidInput
            );
            assert!(!last_error().is_empty());
            assert_eq!(
                sspec_matrix_from_json(ptr::null(), &mut m),
                SspecStatus::NullPointer
            );
            assert!(last_error().contains("json"));
            sspec_matrix_free(ptr::null_mut());
        }
    }

    #[test]
    fn shift_index_and_norm() {
        let mut r = ptr::null_mut();
        let mut su = ptr::null_mut();
        let mut t = ptr::null_mut();
        unsafe {
            assert_eq!(sspec_shift_named(c"R".as_ptr(), &mut r), SspecStatus::Ok);
            assert_eq!(sspec_shift_named(c"Su".as_ptr(), &mut su), SspecStatus::Ok);
            assert_eq!(sspec_shift_named(c"T".as_ptr(), &mut t), SspecStatus::Ok);
            let mut idx = SspecIndex::default();
            assert_eq!(sspec_shift_index(r, &mut idx), SspecStatus::Ok);
            assert_eq!(
                idx,
                SspecIndex {
                    dim_ker: 1,
                    dim_coker: 1,
                    index: 0
                }
            );
            assert_eq!(sspec_shift_index(su, &mut idx), SspecStatus::Ok);
            assert_eq!(idx.index, -1);
            assert_eq!(sspec_shift_index(t, &mut idx), SspecStatus::Numeric);
            let mut n = 0.0;
            assert_eq!(sspec_shift_norm(r, 10, &mut n), SspecStatus::Ok);
            assert!((n - 1.0).abs() < 1e-9);
            assert_eq!(sspec_shift_norm(r, 1, &mut n), SspecStatus::InvalidInput);
            let mut f = true;
            assert_eq!(
                sspec_shift_fredholm_at(r, [1.0, 0.0, 0.0, 0.0].as_ptr(), &mut f),
                SspecStatus::Ok
            );
            assert!(!f);
            let mut rq = ptr::null_mut();
            assert_eq!(
                sspec_shift_char_elem(su, [0.0; 4].as_ptr(), &mut rq),
                SspecStatus::Ok
            );
            assert_eq!(sspec_shift_index(rq, &mut idx), SspecStatus::Ok);
            assert_eq!(idx.index, -2);
            for h in [r, su, t, rq] {
                sspec_shift_free(h);
            }
        }
    }

    #[test]
    fn version_string() {
        let v = unsafe { CStr::from_ptr(sspec_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
