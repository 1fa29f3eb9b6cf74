use std::ffi::{CStr, CString};
use std::ptr;

use sspec_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe {
        sspec_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn header_declares_the_api() {
    let header = include_str!("../include/sspec.h");
    for name in [
        "SSPEC_H",
        "SSPEC_STATUS_OK",
        "SSPEC_STATUS_BUFFER_TOO_SMALL",
        "typedef struct SspecMatrix SspecMatrix;",
        "sspec_matrix_s_spectrum",
        "sspec_shift_index",
        "sspec_last_error",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

#[test]
fn diagonal_matrix_round_trip() {
    // diag(i, j)
    let entries = [
        0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0,
    ];
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
        let q = [0.0, 0.0, 0.0, 1.0];
        assert_eq!(
            sspec_matrix_sigma_min_at(m, q.as_ptr(), &mut s),
            SspecStatus::Ok
        );
        assert!(s < 1e-9);
        sspec_matrix_free(m);
    }
}

#[test]
fn shift_index_and_errors() {
    let name = CString::new("Su").unwrap();
    let mut op = ptr::null_mut();
    unsafe {
        assert_eq!(sspec_shift_named(name.as_ptr(), &mut op), SspecStatus::Ok);
        let mut idx = SspecIndex {
            dim_ker: 9,
            dim_coker: 9,
            index: 9,
        };
        assert_eq!(sspec_shift_index(op, &mut idx), SspecStatus::Ok);
        assert_eq!((idx.dim_ker, idx.dim_coker, idx.index), (0, 1, -1));
        let mut norm = 0.0;
        assert_eq!(sspec_shift_norm(op, 0, &mut norm), SspecStatus::Ok);
        assert!((norm - 1.0).abs() < 1e-9);
        sspec_shift_free(op);

        let bad = CString::new("nope").unwrap();
        assert_eq!(
            sspec_shift_named(bad.as_ptr(), &mut op),
            SspecStatus::InvalidInput
        );
        assert!(last_error().contains("nope"));
        assert_eq!(
            sspec_shift_index(ptr::null(), &mut idx),
            SspecStatus::NullPointer
        );
    }
}
