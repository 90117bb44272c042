use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

use tanaka_kit_ffi::*;

fn fixture(name: &str) -> CString {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    CString::new(std::fs::read_to_string(p).unwrap()).unwrap()
}

fn last_error() -> String {
    let p = tk_last_error();
    assert!(!p.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    tk_string_free(s);
    out
}

#[test]
fn prolongation_through_handles() {
    unsafe {
        let mut alg = ptr::null_mut();
        assert_eq!(tk_algebra_from_json(fixture("sec3_5_fprime.json").as_ptr(), &mut alg), TkStatus::Ok);
        assert!(tk_last_error().is_null());
        let mut ok = false;
        assert_eq!(tk_algebra_check_jacobi(alg, &mut ok), TkStatus::Ok);
        assert!(ok);

        let mut p = ptr::null_mut();
        assert_eq!(tk_prolong(alg, 2, &mut p), TkStatus::Ok);
        assert_eq!(tk_prolongation_total(p), 9);
        assert!(tk_prolongation_terminated(p));

        let mut len = 0;
        assert_eq!(tk_prolongation_dims(p, ptr::null_mut(), 0, &mut len), TkStatus::BufferTooSmall);
        assert_eq!(len, 2);
        let mut dims = vec![usize::MAX; len];
        assert_eq!(tk_prolongation_dims(p, dims.as_mut_ptr(), dims.len(), &mut len), TkStatus::Ok);
        assert_eq!(dims, [2, 0]);

        let mut js = ptr::null_mut();
        assert_eq!(tk_prolongation_report_json(p, &mut js), TkStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(js)).unwrap();
        assert_eq!(v["total"], 9);
        assert_eq!(v["basis"].as_array().unwrap().len(), 2);

        tk_prolongation_free(p);
        tk_algebra_free(alg);
    }
}

#[test]
fn algebra_dimension_matches_fixture() {
    unsafe {
        let mut alg = ptr::null_mut();
        assert_eq!(tk_algebra_from_json(fixture("heis3.json").as_ptr(), &mut alg), TkStatus::Ok);
        assert_eq!(tk_algebra_dim(alg), 3);
        tk_algebra_free(alg);
    }
}

#[test]
fn malformed_input_reports_status_and_message() {
    unsafe {
        let mut alg = ptr::null_mut();
        let bad = CString::new("{\"schema\": \"liealg.v1\",").unwrap();
        assert_eq!(tk_algebra_from_json(bad.as_ptr(), &mut alg), TkStatus::InvalidInput);
        assert!(alg.is_null());
        assert!(last_error().contains("line 1"), "{}", last_error());

        let mut tube = ptr::null_mut();
        assert_eq!(tk_tube_from_curve_json(bad.as_ptr(), TkVariant::Tangent, &mut tube), TkStatus::InvalidInput);
        assert!(tube.is_null());

        let invalid = [0xffu8, 0xfe, 0];
        assert_eq!(tk_algebra_from_json(invalid.as_ptr().cast(), &mut alg), TkStatus::InvalidUtf8);

        // a later success clears the message
        assert_eq!(tk_tube_hyperquadric(&mut tube), TkStatus::Ok);
        assert!(tk_last_error().is_null());
        tk_tube_free(tube);
    }
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        let mut alg = ptr::null_mut();
        assert_eq!(tk_algebra_from_json(ptr::null(), &mut alg), TkStatus::NullPointer);
        assert_eq!(tk_algebra_from_json(fixture("heis3.json").as_ptr(), ptr::null_mut()), TkStatus::NullPointer);
        let mut p = ptr::null_mut();
        assert_eq!(tk_prolong(ptr::null(), 1, &mut p), TkStatus::NullPointer);
        assert!(last_error().contains("alg"));
        let mut r = TkFreemanRanks::default();
        assert_eq!(tk_tube_ranks(ptr::null(), &mut r), TkStatus::NullPointer);
        let mut v = TkVerdict::Consistent;
        assert_eq!(tk_deform_json(ptr::null(), &mut v, ptr::null_mut()), TkStatus::NullPointer);
        assert_eq!(tk_algebra_dim(ptr::null()), 0);
        assert_eq!(tk_prolongation_total(ptr::null()), 0);
        tk_algebra_free(ptr::null_mut());
        tk_prolongation_free(ptr::null_mut());
        tk_tube_free(ptr::null_mut());
        tk_string_free(ptr::null_mut());
    }
}

#[test]
fn rational_normal_curve_tube() {
    unsafe {
        let mut tube = ptr::null_mut();
        assert_eq!(tk_tube_from_curve_json(fixture("rational_normal_curve.json").as_ptr(), TkVariant::Tangent, &mut tube), TkStatus::Ok);
        let mut r = TkFreemanRanks::default();
        assert_eq!(tk_tube_ranks(tube, &mut r), TkStatus::Ok);
        assert_eq!(
            r,
            TkFreemanRanks { bracket_generating: true, d10: 3, k10: 2, l10: 1, hol_nondeg: true, three_nondegenerate: true }
        );
        let mut js = ptr::null_mut();
        assert_eq!(tk_tube_report_json(tube, TK_TUBE_INCLUSIONS | TK_TUBE_SECTIONS, &mut js), TkStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(js)).unwrap();
        assert_eq!(v["sections"]["verified"], true);
        assert!(v["inclusions"].as_array().unwrap().iter().all(|r| r["passed"] == true));
        assert!(v.get("symmetries").is_none());
        tk_tube_free(tube);
    }
}

#[test]
fn hyperquadric_is_levi_nondegenerate() {
    unsafe {
        let mut tube = ptr::null_mut();
        assert_eq!(tk_tube_hyperquadric(&mut tube), TkStatus::Ok);
        let mut r = TkFreemanRanks::default();
        assert_eq!(tk_tube_ranks(tube, &mut r), TkStatus::Ok);
        assert_eq!(r.k10, 0);
        assert!(!r.three_nondegenerate);
        tk_tube_free(tube);
    }
}

#[test]
fn deformation_verdict_and_report() {
    unsafe {
        let mut v = TkVerdict::Consistent;
        let mut js = ptr::null_mut();
        assert_eq!(tk_deform_json(fixture("sec3_5_case_i.json").as_ptr(), &mut v, &mut js), TkStatus::Ok);
        assert_eq!(v, TkVerdict::Inconsistent);
        let rep: serde_json::Value = serde_json::from_str(&take(js)).unwrap();
        assert_eq!(rep["verdict"], "Inconsistent");
        let branches = rep["branches"].as_array().unwrap();
        assert!(!branches.is_empty());
        for b in branches {
            assert_eq!(b["replay_ok"], true);
            assert_eq!(b["certificate_ok"], true);
        }

        // the report is optional
        assert_eq!(tk_deform_json(fixture("sec3_5_case_i.json").as_ptr(), &mut v, ptr::null_mut()), TkStatus::Ok);
        assert_eq!(v, TkVerdict::Inconsistent);
    }
}

#[test]
fn version_is_a_static_string() {
    let v = unsafe { CStr::from_ptr(tk_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn errors_are_per_thread() {
    unsafe {
        let mut alg = ptr::null_mut();
        assert_eq!(tk_algebra_from_json(ptr::null(), &mut alg), TkStatus::NullPointer);
    }
    let other = std::thread::spawn(|| tk_last_error().is_null()).join().unwrap();
    assert!(other);
    assert!(!tk_last_error().is_null());
}
