use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::path::Path;
use std::process::Command;
use std::ptr;

use spectral_dial_ffi::*;

unsafe fn take_string(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    sdial_string_free(s);
    out
}

fn last_error() -> String {
    let p = sdial_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn dial_inverted() -> *mut SdialPolynomial {
    let energies = [CString::new("-3").unwrap(), CString::new("-15/2").unwrap()];
    let ptrs: Vec<*const c_char> = energies.iter().map(|s| s.as_ptr()).collect();
    let mut p = ptr::null_mut();
    let status = unsafe { sdial_dial(ptr::null(), ptrs.as_ptr(), ptrs.len(), &mut p) };
    assert_eq!(status, SdialStatus::Ok);
    p
}

#[test]
fn dial_and_inspect() {
    let p = dial_inverted();
    unsafe {
        let mut count = 0;
        assert_eq!(sdial_polynomial_term_count(p, &mut count), SdialStatus::Ok);
        assert_eq!(count, 2);
        let mut power = 0;
        let mut coeff = ptr::null_mut();
        assert_eq!(sdial_polynomial_term(p, 0, &mut power, &mut coeff), SdialStatus::Ok);
        assert_eq!((power, take_string(coeff)), (1, "-13/2".to_string()));

        let mut exact = ptr::null_mut();
        let mut decimal = 0.0;
        assert_eq!(sdial_energy(p, 3, &mut exact, &mut decimal), SdialStatus::Ok);
        assert_eq!(take_string(exact), "-21/2");
        assert_eq!(decimal, -10.5);

        let mut perm = [0u32; 9];
        let mut violations = 0;
        assert_eq!(
            sdial_ascending_permutation(p, 9, perm.as_mut_ptr(), &mut violations),
            SdialStatus::Ok
        );
        assert_eq!(perm, [3, 2, 4, 1, 5, 0, 6, 7, 8]);
        assert_eq!(violations, 3);

        let mut v = 1.0;
        assert_eq!(sdial_cross_section(p, 0.0, &mut v), SdialStatus::Ok);
        assert_eq!(v, 0.0);
        sdial_polynomial_free(p);
    }
}

#[test]
fn parse_and_terms_agree() {
    let text = CString::new("-13/2,1").unwrap();
    let mut parsed = ptr::null_mut();
    let mut built = ptr::null_mut();
    unsafe {
        assert_eq!(sdial_polynomial_parse(text.as_ptr(), &mut parsed), SdialStatus::Ok);
        let powers = [1u32, 2];
        let nums = [-13i64, 1];
        let dens = [2i64, 1];
        assert_eq!(
            sdial_polynomial_from_terms(powers.as_ptr(), nums.as_ptr(), dens.as_ptr(), 2, &mut built),
            SdialStatus::Ok
        );
        for level in 0..9 {
            let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
            sdial_energy(parsed, level, &mut a, ptr::null_mut());
            sdial_energy(built, level, &mut b, ptr::null_mut());
            assert_eq!(take_string(a), take_string(b));
        }
        sdial_polynomial_free(parsed);
        sdial_polynomial_free(built);
    }
}

#[test]
fn partial_dial() {
    let energies = [CString::new("1").unwrap(), CString::new("2").unwrap()];
    let ptrs: Vec<*const c_char> = energies.iter().map(|s| s.as_ptr()).collect();
    let levels = [0u32, 3];
    let drops = [2u32, 3];
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(
            sdial_dial_partial(levels.as_ptr(), ptrs.as_ptr(), 2, drops.as_ptr(), 2, &mut p),
            SdialStatus::Ok
        );
        let mut e = ptr::null_mut();
        sdial_energy(p, 3, &mut e, ptr::null_mut());
        assert_eq!(take_string(e), "2");
        sdial_polynomial_free(p);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut p = ptr::null_mut();
        let bad = CString::new("abc").unwrap();
        assert_eq!(sdial_polynomial_parse(bad.as_ptr(), &mut p), SdialStatus::InvalidInput);
        assert!(last_error().contains("abc"));
        assert!(p.is_null());

        assert_eq!(sdial_polynomial_parse(ptr::null(), &mut p), SdialStatus::NullPointer);
        let ok = CString::new("1").unwrap();
        assert_eq!(
            sdial_polynomial_parse(ok.as_ptr(), ptr::null_mut()),
            SdialStatus::NullPointer
        );

        let powers = [2u32, 1];
        let ones = [1i64, 1];
        assert_eq!(
            sdial_polynomial_from_terms(powers.as_ptr(), ones.as_ptr(), ones.as_ptr(), 2, &mut p),
            SdialStatus::InvalidInput
        );
        let zero = [0i64];
        assert_eq!(
            sdial_polynomial_from_terms(powers.as_ptr(), ones.as_ptr(), zero.as_ptr(), 1, &mut p),
            SdialStatus::InvalidInput
        );

        let mut s = ptr::null_mut();
        assert_eq!(sdial_determinant(0, &mut s), SdialStatus::InvalidInput);
        let mut x = 0.0;
        assert_eq!(sdial_eigenfunction(0, f64::NAN, &mut x), SdialStatus::InvalidInput);

        // a successful call clears the previous message
        assert_eq!(sdial_eigenfunction(0, 0.0, &mut x), SdialStatus::Ok);
        assert!(sdial_last_error().is_null());
    }
}

#[test]
fn determinant_and_eigenfunction() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(sdial_determinant(5, &mut s), SdialStatus::Ok);
        assert_eq!(take_string(s), "8505");
        let mut v = 0.0;
        assert_eq!(sdial_eigenfunction(0, 0.0, &mut v), SdialStatus::Ok);
        assert!((v - std::f64::consts::PI.powf(-0.25)).abs() < 1e-15);
    }
    let version = unsafe { CStr::from_ptr(sdial_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn verify_report() {
    let p = dial_inverted();
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(sdial_verify(p, 10.0, 401, 4, 9, &mut r), SdialStatus::Ok);
        let mut passed = false;
        assert_eq!(sdial_report_passed(r, &mut passed), SdialStatus::Ok);
        assert!(passed);
        let mut count = 0;
        sdial_report_level_count(r, &mut count);
        assert_eq!(count, 9);
        let (mut e, mut nodes, mut level) = (0.0, 0, 0);
        assert_eq!(
            sdial_report_level(r, 0, &mut e, &mut nodes, &mut level),
            SdialStatus::Ok
        );
        assert_eq!((nodes, level), (3, 3));
        assert!((e + 10.5).abs() < 1e-2);
        assert_eq!(
            sdial_report_level(r, 9, &mut e, &mut nodes, &mut level),
            SdialStatus::InvalidInput
        );
        sdial_report_free(r);

        assert_eq!(sdial_verify(p, 10.0, 401, 3, 9, &mut r), SdialStatus::InvalidInput);
        assert_eq!(sdial_verify(p, -1.0, 401, 4, 9, &mut r), SdialStatus::InvalidInput);
        sdial_polynomial_free(p);
    }
}

#[test]
fn free_accepts_null() {
    unsafe {
        sdial_polynomial_free(ptr::null_mut());
        sdial_report_free(ptr::null_mut());
        sdial_string_free(ptr::null_mut());
    }
}

#[test]
fn generated_header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/spectral_dial.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for symbol in [
        "sdial_dial",
        "sdial_verify",
        "SdialPolynomial",
        "SDIAL_STATUS_SINGULAR = 3",
    ] {
        assert!(text.contains(symbol), "{symbol}");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler found; header syntax not checked");
        return;
    };
    assert!(status.success());
}
