use std::ffi::{CStr, CString};
use std::ptr;

use igc_ffi::*;

fn owned(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { igc_string_free(p) };
    s
}

#[test]
fn corpus_machine_round_trip() {
    let name = CString::new("even_ones").unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { igc_automaton_from_corpus(name.as_ptr(), &mut a) }, IgcStatus::Ok);

    let word = CString::new("0110").unwrap();
    let mut s = ptr::null_mut();
    let mut exact = false;
    assert_eq!(unsafe { igc_accept_probability(a, word.as_ptr(), 16, &mut s, &mut exact) }, IgcStatus::Ok);
    assert_eq!(owned(s), "1");
    assert!(exact);

    let mut c = ptr::null_mut();
    assert_eq!(unsafe { igc_compile(a, &mut c) }, IgcStatus::Ok);
    assert!(unsafe { igc_compiled_dialect_size(c) } > 0);

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { igc_path_sum(c, word.as_ptr(), 16, &mut s, &mut exact) }, IgcStatus::Ok);
    assert_eq!(owned(s), "1");

    let pos = CString::new("pos").unwrap();
    let mut member = false;
    assert_eq!(unsafe { igc_membership(c, word.as_ptr(), pos.as_ptr(), &mut member) }, IgcStatus::Ok);
    assert!(member);
    let odd = CString::new("010").unwrap();
    assert_eq!(unsafe { igc_membership(c, odd.as_ptr(), pos.as_ptr(), &mut member) }, IgcStatus::Ok);
    assert!(!member);

    unsafe {
        igc_compiled_free(c);
        igc_automaton_free(a);
    }
}

#[test]
fn errors_are_reported() {
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { igc_automaton_parse(ptr::null(), &mut a) }, IgcStatus::NullPointer);
    let junk = CString::new("heads: banana").unwrap();
    assert_eq!(unsafe { igc_automaton_parse(junk.as_ptr(), &mut a) }, IgcStatus::Parse);
    let msg = unsafe { CStr::from_ptr(igc_last_error()) }.to_str().unwrap();
    assert!(!msg.is_empty());

    let missing = CString::new("no_such_machine").unwrap();
    assert_eq!(unsafe { igc_automaton_from_corpus(missing.as_ptr(), &mut a) }, IgcStatus::Parameter);
    assert_eq!(unsafe { igc_compiled_dialect_size(ptr::null()) }, 0);
    unsafe { igc_string_free(ptr::null_mut()) };
}

#[test]
fn bad_test_spec() {
    let name = CString::new("coin").unwrap();
    let mut a = ptr::null_mut();
    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(igc_automaton_from_corpus(name.as_ptr(), &mut a), IgcStatus::Ok);
        assert_eq!(igc_compile(a, &mut c), IgcStatus::Ok);
        let w = CString::new("1").unwrap();
        let t = CString::new("prob:2").unwrap();
        let mut m = false;
        assert_eq!(igc_membership(c, w.as_ptr(), t.as_ptr(), &mut m), IgcStatus::Parameter);
        igc_compiled_free(c);
        igc_automaton_free(a);
    }
}

#[test]
fn header_lists_every_export() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/igc.h")).unwrap();
    for f in [
        "igc_automaton_parse",
        "igc_automaton_from_corpus",
        "igc_automaton_free",
        "igc_accept_probability",
        "igc_compile",
        "igc_compiled_free",
        "igc_compiled_dialect_size",
        "igc_path_sum",
        "igc_membership",
        "igc_last_error",
        "igc_string_free",
        "IGC_STATUS_OK",
    ] {
        assert!(h.contains(f), "{f} missing from header");
    }
}
