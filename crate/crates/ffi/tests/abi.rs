use std::ffi::{c_void, CStr};
use std::ptr;

use mkfix_ffi::*;

extern "C" fn halve(x: f64, _user: *mut c_void) -> f64 {
    x / 2.0
}

extern "C" fn shift(x: f64, user: *mut c_void) -> f64 {
    x + unsafe { *(user as *const f64) }
}

extern "C" fn blow_up(x: f64, _user: *mut c_void) -> f64 {
    if x.abs() < 0.1 {
        f64::INFINITY
    } else {
        x / 2.0
    }
}

extern "C" fn unit(_t: f64, _x: f64, _user: *mut c_void) -> f64 {
    1.0
}

fn last_error() -> String {
    let p = mkfix_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn kernel_and_row_integral() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(mkfix_greens_kernel(0.5, 0.25, &mut v), MkfixCode::Ok);
        assert!((v - 0.5 * 0.5 * (0.5 - 0.0625)).abs() < 1e-15);
        assert_eq!(mkfix_greens_kernel(1.5, 0.0, &mut v), MkfixCode::InvalidArgument);
        assert!(last_error().contains("outside"));
        assert_eq!(mkfix_kernel_row_integral(0.5, 200, &mut v), MkfixCode::Ok);
        assert!((v - (0.5 - 0.125) / 6.0).abs() < 1e-15);
        assert_eq!(mkfix_kernel_row_integral(0.5, 201, &mut v), MkfixCode::InvalidArgument);
        assert_eq!(mkfix_kernel_row_integral(0.5, 200, ptr::null_mut()), MkfixCode::NullPointer);
    }
}

#[test]
fn real_iteration_converges() {
    let settings = mkfix_iteration_settings_default();
    assert_eq!(settings.tolerance, 1e-10);
    assert_eq!(settings.cauchy_window, 2);
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(mkfix_iterate_real(Some(halve), ptr::null_mut(), 1.0, &settings, &mut h), MkfixCode::Ok);
        assert_eq!(mkfix_real_iteration_status(h), MkfixStatus::Converged);
        let mut x = f64::NAN;
        assert_eq!(mkfix_real_iteration_point(h, &mut x), MkfixCode::Ok);
        assert!(x.abs() < 1e-10);
        let n = mkfix_real_iteration_residuals(h, ptr::null_mut(), 0);
        let mut buf = vec![0.0; n];
        assert_eq!(mkfix_real_iteration_residuals(h, buf.as_mut_ptr(), n), n);
        assert_eq!(buf[0], 0.5);
        assert_eq!(mkfix_real_iteration_iterations(h), n - 1);
        mkfix_real_iteration_free(h);
    }
}

#[test]
fn real_iteration_cap_and_domain_error() {
    let settings = MkfixIterationSettings { max_iterations: 10, ..mkfix_iteration_settings_default() };
    let mut offset = 1.0f64;
    let mut h = ptr::null_mut();
    unsafe {
        let code = mkfix_iterate_real(Some(shift), &mut offset as *mut f64 as *mut c_void, 0.0, &settings, &mut h);
        assert_eq!(code, MkfixCode::MaxIterations);
        assert_eq!(mkfix_real_iteration_status(h), MkfixStatus::MaxIterations);
        assert_eq!(mkfix_real_iteration_residuals(h, ptr::null_mut(), 0), 10);
        mkfix_real_iteration_free(h);

        let code = mkfix_iterate_real(Some(blow_up), ptr::null_mut(), 1.0, &settings, &mut h);
        assert_eq!(code, MkfixCode::DomainError);
        assert!(!h.is_null());
        assert_eq!(mkfix_real_iteration_status(h), MkfixStatus::DomainError);
        assert!(mkfix_real_iteration_residual(h).is_nan());
        let mut x = 0.0;
        assert_eq!(mkfix_real_iteration_point(h, &mut x), MkfixCode::DomainError);
        mkfix_real_iteration_free(h);

        assert_eq!(mkfix_iterate_real(None, ptr::null_mut(), 0.0, &settings, &mut h), MkfixCode::NullPointer);
        let bad = MkfixIterationSettings { tolerance: -1.0, ..settings };
        assert_eq!(mkfix_iterate_real(Some(halve), ptr::null_mut(), 0.0, &bad, &mut h), MkfixCode::InvalidArgument);
        assert!(h.is_null());
    }
}

#[test]
fn bvp_unit_source() {
    let settings = mkfix_iteration_settings_default();
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(mkfix_bvp_solve(Some(unit), ptr::null_mut(), 201, 0, &settings, &mut h), MkfixCode::Ok);
        assert_eq!(mkfix_bvp_solution_iterations(h), 1);
        let mut x = vec![0.0; 201];
        assert_eq!(mkfix_bvp_solution_values(h, x.as_mut_ptr(), x.len()), 201);
        for (i, v) in x.iter().enumerate() {
            let t = i as f64 / 200.0;
            assert!((v - (t - t * t * t) / 6.0).abs() < 1e-12);
        }
        mkfix_bvp_solution_free(h);
        assert_eq!(mkfix_bvp_solve(Some(unit), ptr::null_mut(), 200, 0, &settings, &mut h), MkfixCode::InvalidArgument);
        assert!(h.is_null());
    }
}

#[test]
fn transitivity_counterexample() {
    // a -> b, b -> a: the chain (a, b, a) has unrelated endpoints.
    let rows = [0u8, 1, 1, 0];
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(mkfix_check_n_transitive(rows.as_ptr(), 2, 1, &mut h), MkfixCode::Ok);
        assert_eq!(mkfix_transitivity_passes(h), 0);
        let mut chain = [usize::MAX; 3];
        assert_eq!(mkfix_transitivity_counterexample(h, chain.as_mut_ptr(), 3), 3);
        assert_eq!(chain, [0, 1, 0]);
        mkfix_transitivity_free(h);

        let full = [1u8; 4];
        assert_eq!(mkfix_check_n_transitive(full.as_ptr(), 2, 2, &mut h), MkfixCode::Ok);
        assert_eq!(mkfix_transitivity_passes(h), 1);
        assert_eq!(mkfix_transitivity_counterexample(h, ptr::null_mut(), 0), 0);
        mkfix_transitivity_free(h);
        mkfix_transitivity_free(ptr::null_mut());
    }
}

/// The checked-in header compiles as C.
#[test]
fn header_compiles() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/mkfix.h");
    let Ok(status) =
        std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).status()
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(status.success());
}
