use std::ffi::{CStr, CString};
use std::ptr;

use gmeasure_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(gm_last_error_message()) }.to_string_lossy().into_owned()
}

fn kernel(spec: &str, dim: usize) -> *mut GmKernel {
    let spec = CString::new(spec).unwrap();
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { gm_kernel_new(spec.as_ptr(), dim, &mut k) }, GmStatus::Ok, "{}", last_error());
    k
}

#[test]
fn kernel_lifecycle_and_density() {
    let k = kernel("gauss:b=1", 3);
    assert_eq!(unsafe { gm_kernel_dim(k) }, 3);
    let mut v = 0.0;
    let x = [0.0; 3];
    assert_eq!(unsafe { gm_kernel_density(k, x.as_ptr(), 3, &mut v) }, GmStatus::Ok);
    assert!((v - (2.0 * std::f64::consts::PI).powf(-1.5)).abs() < 1e-15);
    assert_eq!(unsafe { gm_kernel_density(k, x.as_ptr(), 2, &mut v) }, GmStatus::Validation);
    unsafe { gm_kernel_free(k) };
    unsafe { gm_kernel_free(ptr::null_mut()) };
}

#[test]
fn error_codes_match_cli() {
    let mut k = ptr::null_mut();
    let bad = CString::new("gauss:b=-1").unwrap();
    assert_eq!(unsafe { gm_kernel_new(bad.as_ptr(), 3, &mut k) }, GmStatus::Parse);
    assert!(last_error().contains('b'));
    assert!(k.is_null());
    let heavy = CString::new("heavy:gamma=3").unwrap();
    assert_eq!(unsafe { gm_kernel_new(heavy.as_ptr(), 3, &mut k) }, GmStatus::Validation);
    assert_eq!(unsafe { gm_kernel_new(ptr::null(), 3, &mut k) }, GmStatus::NullPointer);
    gm_clear_error();
    assert_eq!(last_error(), "");

    let k2 = kernel("gauss:b=1", 2);
    let mut est = ptr::null_mut();
    assert_eq!(unsafe { gm_green_fourier(k2, 16, 6.0, 0.0, &mut est) }, GmStatus::Precondition);
    assert!(est.is_null());
    assert_eq!(unsafe { gm_green_fourier(k2, 12, 6.0, 0.5, &mut est) }, GmStatus::Validation);
    unsafe { gm_kernel_free(k2) };
}

#[test]
fn green_estimate_matches_closed_form() {
    let k = kernel("gauss:b=1,dim=3", 0);
    let mut est = ptr::null_mut();
    assert_eq!(unsafe { gm_green_fourier(k, 32, 8.0, 0.5, &mut est) }, GmStatus::Ok);
    assert!((unsafe { gm_green_atom_weight(est) } - 1.0 / 1.5).abs() < 1e-15);
    assert!(!unsafe { gm_green_zero_mode_uncertain(est) });
    let x = [0.5, 0.0, 0.0];
    let (mut g, mut exact, mut bound) = (0.0, 0.0, 0.0);
    assert_eq!(unsafe { gm_green_evaluate(est, x.as_ptr(), 3, &mut g) }, GmStatus::Ok);
    assert_eq!(unsafe { gm_gauss_green_closed(1.0, 3, 0.5, x.as_ptr(), 1e-14, &mut exact, &mut bound) }, GmStatus::Ok);
    assert!((g - exact).abs() < 1e-6 * exact);
    unsafe { gm_green_free(est) };
    unsafe { gm_kernel_free(k) };
}

#[test]
fn monte_carlo_is_reproducible() {
    let k = kernel("gauss:b=1", 3);
    let x0 = [0.0; 3];
    let run = || {
        let (mut m, mut s) = (0.0, 0.0);
        assert_eq!(unsafe { gm_mc_potential(k, 1.0, 1.0, x0.as_ptr(), 0.5, 2000, 20.0, 9, &mut m, &mut s) }, GmStatus::Ok);
        (m, s)
    };
    assert_eq!(run(), run());
    let (mut m, mut s) = (0.0, 0.0);
    assert_eq!(unsafe { gm_mc_potential(k, 1.0, 1.0, x0.as_ptr(), 0.5, 0, 20.0, 9, &mut m, &mut s) }, GmStatus::Validation);
    unsafe { gm_kernel_free(k) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(gm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn generated_header_declares_the_abi() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/gmeasure.h")).unwrap();
    for name in [
        "typedef struct GmKernel GmKernel;",
        "typedef struct GmGreenEstimate GmGreenEstimate;",
        "GM_STATUS_PRECONDITION = 4",
        "gm_kernel_new(",
        "gm_kernel_free(",
        "gm_green_fourier(",
        "gm_green_evaluate(",
        "gm_mc_potential(",
        "gm_last_error_message(",
    ] {
        assert!(header.contains(name), "header lacks `{name}`");
    }
}
