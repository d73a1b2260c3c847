use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use koch_billiards_ffi::*;

fn take_string(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { kb_string_free(s) };
    out
}

fn last_error() -> String {
    let p = kb_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn prefractal_handle() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { kb_prefractal_new(1, &mut p) }, KbStatus::Ok);
    assert_eq!(unsafe { kb_prefractal_num_vertices(p) }, 12);
    let (mut x, mut y) = (0.0, 0.0);
    assert_eq!(unsafe { kb_prefractal_vertex(p, 1, &mut x, &mut y) }, KbStatus::Ok);
    assert!((x - 1.0 / 3.0).abs() < 1e-15 && y.abs() < 1e-15);
    assert_eq!(unsafe { kb_prefractal_vertex(p, 12, &mut x, &mut y) }, KbStatus::Domain);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { kb_prefractal_to_json(p, &mut s) }, KbStatus::Ok);
    assert!(take_string(s).starts_with("{\"level\":1"));
    unsafe { kb_prefractal_free(p) };
}

#[test]
fn level_cap_is_a_resource_error() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { kb_prefractal_new(99, &mut p) }, KbStatus::Resource);
    assert!(p.is_null());
    assert!(last_error().contains("99"));
}

#[test]
fn orbit_handle() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { kb_prefractal_new(0, &mut p) }, KbStatus::Ok);
    let mut o = ptr::null_mut();
    assert_eq!(unsafe { kb_orbit_run(p, 1, 7, 12, 0, 1, 1000, &mut o) }, KbStatus::Ok);
    let mut kind = KbOrbitKind::Truncated;
    assert_eq!(unsafe { kb_orbit_kind(o, &mut kind) }, KbStatus::Ok);
    assert_eq!(kind, KbOrbitKind::Periodic);
    assert_eq!(unsafe { kb_orbit_period(o) }, 6);
    assert_eq!(unsafe { kb_orbit_len(o) }, 6);
    let mut hybrid = false;
    assert_eq!(unsafe { kb_orbit_is_hybrid(o, &mut hybrid) }, KbStatus::Ok);
    assert!(hybrid);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { kb_orbit_to_json(o, &mut s) }, KbStatus::Ok);
    assert!(take_string(s).contains("\"Periodic\""));
    unsafe { kb_orbit_free(o) };

    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { kb_orbit_run(p, 1, 0, 1, 1, 1, 10, &mut bad) }, KbStatus::Domain);
    assert!(bad.is_null());
    assert_eq!(unsafe { kb_orbit_run(p, 4, 1, 2, 1, 1, 10, &mut bad) }, KbStatus::Domain);
    unsafe { kb_prefractal_free(p) };
}

#[test]
fn null_arguments() {
    assert_eq!(unsafe { kb_prefractal_new(0, ptr::null_mut()) }, KbStatus::NullPointer);
    assert_eq!(unsafe { kb_prefractal_num_vertices(ptr::null()) }, 0);
    assert_eq!(unsafe { kb_orbit_period(ptr::null()) }, 0);
    let mut k = KbOrbitKind::Periodic;
    assert_eq!(unsafe { kb_orbit_kind(ptr::null(), &mut k) }, KbStatus::NullPointer);
    unsafe {
        kb_string_free(ptr::null_mut());
        kb_orbit_free(ptr::null_mut());
        kb_prefractal_free(ptr::null_mut());
    }
}

#[test]
fn classify_and_genus() {
    let t = CString::new("7/12").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { kb_classify(t.as_ptr(), &mut s) }, KbStatus::Ok);
    assert_eq!(take_string(s), "[lr,c]");
    let bad = CString::new("x").unwrap();
    assert_eq!(unsafe { kb_classify(bad.as_ptr(), &mut s) }, KbStatus::Domain);
    let (mut g, mut chi) = (0, 0);
    assert_eq!(unsafe { kb_surface_genus(2, &mut g, &mut chi) }, KbStatus::Ok);
    assert_eq!((g, chi), (46, -90));
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = std::fs::read_to_string(format!("{dir}/include/koch_billiards.h")).unwrap();
    for f in ["kb_prefractal_new", "kb_orbit_run", "kb_string_free", "kb_last_error", "KB_STATUS_RESOURCE = 4"] {
        assert!(header.contains(f), "{f}");
    }
    let src = std::env::temp_dir().join("kb_header_check.c");
    std::fs::write(
        &src,
        "#include \"koch_billiards.h\"\nint main(void) { KbPrefractal *p = 0; return kb_prefractal_new(0, &p) == KB_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(format!("{dir}/include"))
        .arg(&src)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
}
