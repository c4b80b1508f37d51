use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use singlab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(singlab_last_error()) }.to_string_lossy().into_owned()
}

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { singlab_string_free(s) };
    out
}

#[test]
fn germ_lifecycle() {
    let expr = CString::new("z^3").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { singlab_germ_analyze(expr.as_ptr(), &mut g) }, SinglabStatus::Ok);
    let mut mu = 0usize;
    assert_eq!(unsafe { singlab_germ_mu(g, &mut mu) }, SinglabStatus::Ok);
    assert_eq!(mu, 2);
    let mut holds = false;
    assert_eq!(unsafe { singlab_germ_verify_identity(g, &mut holds) }, SinglabStatus::Ok);
    assert!(holds);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { singlab_germ_discriminant(g, &mut s) }, SinglabStatus::Ok);
    assert_eq!(take(s), "4*t1^3 + 27*lambda^2");
    let mut j = ptr::null_mut();
    assert_eq!(unsafe { singlab_germ_report_json(g, &mut j) }, SinglabStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(j)).unwrap();
    assert_eq!(v["analysis"]["mu"], 2);
    let delta = CString::new("1").unwrap();
    let mut alt = 99i64;
    assert_eq!(unsafe { singlab_germ_degree_scan(g, 10, delta.as_ptr(), 3, &mut alt) }, SinglabStatus::Ok);
    assert_eq!(alt, 0);
    unsafe { singlab_germ_free(g) };
}

#[test]
fn error_codes() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { singlab_germ_analyze(ptr::null(), &mut g) }, SinglabStatus::NullPointer);
    let bad = CString::new("z^2*w^2").unwrap();
    assert_eq!(unsafe { singlab_germ_analyze(bad.as_ptr(), &mut g) }, SinglabStatus::NotIsolated);
    assert!(g.is_null());
    assert!(last_error().contains("not isolated"));
    let junk = CString::new("z^^3").unwrap();
    assert_eq!(unsafe { singlab_germ_analyze(junk.as_ptr(), &mut g) }, SinglabStatus::Parse);
    let mut mu = 0usize;
    assert_eq!(unsafe { singlab_germ_mu(ptr::null(), &mut mu) }, SinglabStatus::NullPointer);
    unsafe { singlab_germ_free(ptr::null_mut()) };
    unsafe { singlab_string_free(ptr::null_mut()) };

    let two = CString::new("z^2 + w^2").unwrap();
    assert_eq!(unsafe { singlab_germ_analyze(two.as_ptr(), &mut g) }, SinglabStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { singlab_germ_discriminant(g, &mut s) }, SinglabStatus::Unsupported);
    assert!(s.is_null());
    unsafe { singlab_germ_free(g) };
}

#[test]
fn semigroups() {
    let gens = [6u64, 4, 13];
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { singlab_semigroup_new(gens.as_ptr(), gens.len(), &mut s) }, SinglabStatus::Ok);
    let mut c = 0u64;
    assert_eq!(unsafe { singlab_semigroup_conductor(s, &mut c) }, SinglabStatus::Ok);
    assert_eq!(c, 16);
    let mut buf = [0u64; 4];
    let mut len = 0usize;
    assert_eq!(unsafe { singlab_semigroup_generators(s, buf.as_mut_ptr(), buf.len(), &mut len) }, SinglabStatus::Ok);
    assert_eq!(&buf[..len], &[4, 6, 13]);
    let mut member = true;
    assert_eq!(unsafe { singlab_semigroup_contains(s, 15, &mut member) }, SinglabStatus::Ok);
    assert!(!member);
    let mut j = ptr::null_mut();
    assert_eq!(unsafe { singlab_semigroup_resolve_json(s, &mut j) }, SinglabStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(j)).unwrap();
    assert_eq!(v["a"], serde_json::json!([0, 0, 1]));
    unsafe { singlab_semigroup_free(s) };

    let even = [4u64, 6];
    assert_eq!(unsafe { singlab_semigroup_new(even.as_ptr(), even.len(), &mut s) }, SinglabStatus::GcdNotOne);
    let br = CString::new("t^4, t^6+t^7").unwrap();
    assert_eq!(unsafe { singlab_semigroup_from_branch(br.as_ptr(), &mut s) }, SinglabStatus::Ok);
    assert_eq!(unsafe { singlab_semigroup_conductor(s, &mut c) }, SinglabStatus::Ok);
    assert_eq!(c, 16);
    unsafe { singlab_semigroup_free(s) };
    let nb = CString::new("t^4, t^6").unwrap();
    assert_eq!(unsafe { singlab_semigroup_from_branch(nb.as_ptr(), &mut s) }, SinglabStatus::NotABranch);
}

#[test]
fn errors_are_per_thread() {
    let bad = CString::new("z^2*w^2").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { singlab_germ_analyze(bad.as_ptr(), &mut g) }, SinglabStatus::NotIsolated);
    let other = std::thread::spawn(last_error).join().unwrap();
    assert_eq!(other, "");
    assert!(!last_error().is_empty());
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/singlab.h")).unwrap();
    for name in [
        "typedef struct SinglabGerm SinglabGerm;",
        "SINGLAB_STATUS_OK = 0",
        "singlab_germ_analyze",
        "singlab_germ_mu",
        "singlab_germ_report_json",
        "singlab_germ_verify_identity",
        "singlab_germ_degree_scan",
        "singlab_germ_discriminant",
        "singlab_germ_free",
        "singlab_semigroup_new",
        "singlab_semigroup_resolve_json",
        "singlab_string_free",
        "singlab_last_error",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

/// Compiles a small C program against the header and the static library.
#[test]
fn c_program_links() {
    let exe = std::env::current_exe().unwrap();
    let target = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = target.join("libsinglab_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("probe.c");
    std::fs::write(
        &src,
        r#"#include "singlab.h"
#include <stdio.h>
int main(void) {
    SinglabGerm *g = NULL;
    size_t mu = 0;
    if (singlab_germ_analyze("z^3 + w^3", &g) != SINGLAB_STATUS_OK) return 1;
    if (singlab_germ_mu(g, &mu) != SINGLAB_STATUS_OK) return 2;
    singlab_germ_free(g);
    if (singlab_germ_analyze("z^2*w^2", &g) != SINGLAB_STATUS_NOT_ISOLATED) return 3;
    printf("%zu\n", mu);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("probe");
    let st = Command::new("cc")
        .arg(&src)
        .arg(format!("-I{}", concat!(env!("CARGO_MANIFEST_DIR"), "/include")))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(st.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "4");
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("singlab-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
