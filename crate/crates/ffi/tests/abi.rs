use std::ffi::{CStr, CString};
use std::ptr;

use welch_ffi::*;

fn instance(p: u64, e: u32, g: i64) -> *mut WelchHandle {
    let mut h = ptr::null_mut();
    let status = unsafe { welch_instance_new(p, e, g, &mut h) };
    assert_eq!(status, WelchStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(welch_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn orders_and_f() {
    let h = instance(7, 1, 3);
    let (mut pe, mut m, mut ord) = (0, 0, 0);
    unsafe {
        assert_eq!(welch_instance_orders(h, &mut pe, &mut m, &mut ord), WelchStatus::Ok);
        assert_eq!((pe, m, ord), (7, 6, 6));
        let mut v = 99;
        assert_eq!(welch_f(h, 1, 1, &mut v), WelchStatus::Ok);
        assert_eq!(v, 3 - 1);
        welch_instance_free(h);

        let h = instance(7, 1, 2);
        assert_eq!(welch_f(h, 7, 3, &mut v), WelchStatus::Ok);
        assert_eq!(v, 1);
        welch_instance_free(h);
    }
}

#[test]
fn fixed_c_buffer_protocol() {
    let h = instance(7, 1, 3);
    unsafe {
        let mut len = 0usize;
        assert_eq!(welch_solve_fixed_c(h, 1, ptr::null_mut(), 0, &mut len), WelchStatus::BufferTooSmall);
        assert_eq!(len, 6);
        let mut xs = vec![0i64; len];
        assert_eq!(welch_solve_fixed_c(h, 1, xs.as_mut_ptr(), xs.len(), &mut len), WelchStatus::Ok);
        assert_eq!(last_error(), "");
        for &x in &xs {
            let mut v = 1;
            welch_f(h, x, 1, &mut v);
            assert_eq!(v, 0, "x = {x}");
        }
        welch_instance_free(h);
    }
}

#[test]
fn all_pairs_parallel_arrays() {
    let h = instance(5, 1, 2);
    unsafe {
        let mut len = 0usize;
        welch_solve_all_pairs(h, ptr::null_mut(), ptr::null_mut(), 0, &mut len);
        assert!(len > 0);
        let mut xs = vec![0i64; len];
        let mut cs = vec![0i64; len];
        assert_eq!(
            welch_solve_all_pairs(h, xs.as_mut_ptr(), cs.as_mut_ptr(), len, &mut len),
            WelchStatus::Ok
        );
        for (&x, &c) in xs.iter().zip(&cs) {
            let mut v = 1;
            welch_f(h, x, c, &mut v);
            assert_eq!(v, 0);
        }
        welch_instance_free(h);
    }
}

#[test]
fn count_and_teichmuller() {
    let h = instance(7, 2, 3);
    unsafe {
        let mut count = 0;
        assert_eq!(welch_count_c_for_fixed_x(h, 10, &mut count), WelchStatus::Ok);
        assert_eq!(count, 1);
        let (mut omega, mut u) = (0, 0);
        assert_eq!(welch_teichmuller(h, &mut omega, &mut u), WelchStatus::Ok);
        assert_eq!(omega * u % 49, 3);
        let mut w = 1u64;
        for _ in 0..6 {
            w = w * omega % 49;
        }
        assert_eq!(w, 1);
        assert_eq!(u % 7, 1);
        welch_instance_free(h);
    }
}

#[test]
fn json_reports() {
    let h = instance(5, 2, 2);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(welch_solve_fixed_c_json(h, 1, &mut s), WelchStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        welch_string_free(s);
        assert!(text.contains("\"observed_count\""));
        assert!(text.contains("\"fixed-c\""));
        assert_eq!(welch_solve_all_pairs_json(h, &mut s), WelchStatus::Ok);
        assert!(CStr::from_ptr(s).to_str().unwrap().contains("\"all-pairs\""));
        welch_string_free(s);
        welch_instance_free(h);
    }
}

#[test]
fn error_codes() {
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(welch_instance_new(9, 1, 2, &mut h), WelchStatus::NotPrime);
        assert!(!last_error().is_empty());
        assert_eq!(welch_instance_new(7, 0, 3, &mut h), WelchStatus::ZeroExponent);
        assert_eq!(welch_instance_new(7, 1, 14, &mut h), WelchStatus::NonUnit);
        assert_eq!(welch_instance_new(7, 1, 3, ptr::null_mut()), WelchStatus::NullPointer);
        assert!(h.is_null());

        let bad = CString::new("three").unwrap();
        assert_eq!(welch_instance_new_str(7, 1, bad.as_ptr(), &mut h), WelchStatus::InvalidArgument);
        let big = CString::new("100000000000000000000003").unwrap();
        assert_eq!(welch_instance_new_str(7, 1, big.as_ptr(), &mut h), WelchStatus::Ok);
        let mut m = 0;
        welch_instance_orders(h, ptr::null_mut(), &mut m, ptr::null_mut());
        assert!(m > 0);
        welch_instance_free(h);

        let mut v = 0;
        assert_eq!(welch_f(ptr::null(), 1, 1, &mut v), WelchStatus::NullPointer);

        let h = instance(5, 1, 2);
        let mut count = 0;
        assert_eq!(welch_count_c_for_fixed_x(h, 5, &mut count), WelchStatus::NonUnit);
        welch_instance_free(h);
        welch_instance_free(ptr::null_mut());
        welch_string_free(ptr::null_mut());
    }
}

#[test]
fn status_names_are_static() {
    for s in [WelchStatus::Ok, WelchStatus::BufferTooSmall, WelchStatus::Panic] {
        let name = unsafe { CStr::from_ptr(welch_status_name(s)) };
        assert!(!name.to_bytes().is_empty());
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/welch.h")).unwrap();
    for name in [
        "welch_instance_new",
        "welch_instance_new_str",
        "welch_instance_free",
        "welch_instance_orders",
        "welch_f",
        "welch_solve_fixed_c",
        "welch_solve_all_pairs",
        "welch_count_c_for_fixed_x",
        "welch_teichmuller",
        "welch_solve_fixed_c_json",
        "welch_solve_all_pairs_json",
        "welch_string_free",
        "welch_last_error_message",
        "welch_status_name",
        "WELCH_STATUS_BUFFER_TOO_SMALL",
        "typedef struct WelchHandle WelchHandle",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
