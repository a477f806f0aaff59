use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use hyperideal_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe {
        hi_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn two_tet() -> *mut HiTriangulation {
    let labels = [0usize; 12];
    let mut tri = ptr::null_mut();
    let s = unsafe { hi_triangulation_from_labels(labels.as_ptr(), 2, &mut tri) };
    assert_eq!(s, HiStatus::Ok);
    tri
}

#[test]
fn triangulation_handles() {
    let tri = two_tet();
    unsafe {
        assert_eq!(hi_triangulation_edge_classes(tri), 1);
        assert_eq!(hi_triangulation_tetrahedra(tri), 2);
        let mut v = [0usize; 1];
        assert_eq!(
            hi_triangulation_valences(tri, v.as_mut_ptr(), 1),
            HiStatus::Ok
        );
        assert_eq!(v, [12]);
        assert_eq!(
            hi_triangulation_valences(tri, v.as_mut_ptr(), 0),
            HiStatus::BufferTooSmall
        );
        hi_triangulation_free(tri);
        hi_triangulation_free(ptr::null_mut());
        assert_eq!(hi_triangulation_edge_classes(ptr::null()), 0);
    }
}

#[test]
fn json_input_and_errors() {
    let json = CString::new(
        r#"{"format":"face_gluings","tetrahedra":2,"gluings":[
        {"tet":0,"face":0,"to_tet":1,"to_face":0,"vertex_map":[1,2,3]},
        {"tet":0,"face":1,"to_tet":1,"to_face":1,"vertex_map":[2,0,3]},
        {"tet":0,"face":2,"to_tet":1,"to_face":2,"vertex_map":[1,3,0]},
        {"tet":0,"face":3,"to_tet":1,"to_face":3,"vertex_map":[1,2,0]}]}"#,
    )
    .unwrap();
    let mut tri = ptr::null_mut();
    unsafe {
        assert_eq!(
            hi_triangulation_from_json(json.as_ptr(), &mut tri),
            HiStatus::Ok
        );
        assert_eq!(hi_triangulation_edge_classes(tri), 1);
        hi_triangulation_free(tri);

        let bad = CString::new("{not json").unwrap();
        let mut tri = ptr::null_mut();
        assert_eq!(
            hi_triangulation_from_json(bad.as_ptr(), &mut tri),
            HiStatus::InvalidInput
        );
        assert!(tri.is_null());
        assert!(last_error().contains("malformed JSON"), "{}", last_error());

        assert_eq!(
            hi_triangulation_from_json(ptr::null(), &mut tri),
            HiStatus::NullPointer
        );
        let gap = [0usize, 0, 2, 2, 0, 0];
        assert_eq!(
            hi_triangulation_from_labels(gap.as_ptr(), 1, &mut tri),
            HiStatus::InvalidInput
        );
    }
}

#[test]
fn error_message_truncates() {
    unsafe {
        let mut tri = ptr::null_mut();
        hi_triangulation_from_json(ptr::null(), &mut tri);
        let full = hi_last_error_message(ptr::null_mut(), 0);
        let mut buf = [0x7f as std::ffi::c_char; 4];
        assert_eq!(hi_last_error_message(buf.as_mut_ptr(), 4), full);
        assert_eq!(buf[3], 0);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_bytes().len(), 3);
    }
}

#[test]
fn flow_converges() {
    let tri = two_tet();
    unsafe {
        let mut init = [0.0; 1];
        let mut len = 0;
        assert_eq!(
            hi_default_initial_metric(tri, init.as_mut_ptr(), 1, &mut len),
            HiStatus::Ok
        );
        assert_eq!(len, 1);
        let mut res = ptr::null_mut();
        assert_eq!(
            hi_flow_run(tri, ptr::null(), 0, ptr::null(), &mut res),
            HiStatus::Ok
        );
        assert!(hi_flow_result_converged(res));
        assert!(hi_flow_result_residual(res) <= 1e-10);
        assert!(hi_flow_result_steps(res) > 0);
        assert!(hi_flow_result_time(res) > 0.0);
        let mut l = [0.0; 1];
        assert_eq!(
            hi_flow_result_lengths(res, l.as_mut_ptr(), 1, &mut len),
            HiStatus::Ok
        );
        assert!((l[0].cosh() - 1.1830127018922193).abs() < 1e-6);

        let mut k = [1.0; 1];
        assert_eq!(
            hi_curvature(tri, l.as_ptr(), 1, k.as_mut_ptr()),
            HiStatus::Ok
        );
        assert!(k[0].abs() <= 1e-10);

        let mut again = ptr::null_mut();
        assert_eq!(
            hi_flow_run(tri, l.as_ptr(), 1, ptr::null(), &mut again),
            HiStatus::Ok
        );
        assert_eq!(hi_flow_result_steps(again), 0);
        hi_flow_result_free(again);
        hi_flow_result_free(res);
        hi_triangulation_free(tri);
    }
}

#[test]
fn flow_not_converged_and_bad_config() {
    let tri = two_tet();
    unsafe {
        let mut cfg = hi_flow_config_default();
        cfg.max_time = 1e-6;
        let mut res = ptr::null_mut();
        assert_eq!(
            hi_flow_run(tri, ptr::null(), 0, &cfg, &mut res),
            HiStatus::NotConverged
        );
        assert!(!res.is_null());
        assert!(!hi_flow_result_converged(res));
        hi_flow_result_free(res);

        cfg.max_time = -1.0;
        let mut res = ptr::null_mut();
        assert_eq!(
            hi_flow_run(tri, ptr::null(), 0, &cfg, &mut res),
            HiStatus::InvalidInput
        );
        assert!(res.is_null());
        assert!(last_error().contains("max_time"));

        let l = [0.5, 0.5];
        assert_eq!(
            hi_flow_run(tri, l.as_ptr(), 2, ptr::null(), &mut res),
            HiStatus::InvalidInput
        );
        let neg = [-0.5];
        assert_eq!(
            hi_flow_run(tri, neg.as_ptr(), 1, ptr::null(), &mut res),
            HiStatus::InvalidInput
        );
        hi_triangulation_free(tri);
    }
}

#[test]
fn scalar_helpers() {
    unsafe {
        let mut b = 0.0;
        assert_eq!(hi_b_n(9, &mut b), HiStatus::Ok);
        assert_eq!(b, 2.0);
        assert_eq!(hi_b_n(8, &mut b), HiStatus::InvalidInput);
        assert!((0.125..=0.13).contains(&hi_xi_infinity()));
        assert!((hi_lobachevsky(std::f64::consts::FRAC_PI_4) - 0.4579828).abs() < 1e-7);

        let l = [1.0; 6];
        let mut a = [0.0; 6];
        assert_eq!(hi_dihedral_angles(l.as_ptr(), a.as_mut_ptr()), HiStatus::Ok);
        assert!(a.iter().all(|&x| (x - a[0]).abs() < 1e-15 && x > 0.0));
        let mut h = false;
        assert_eq!(hi_is_hyperideal(l.as_ptr(), &mut h), HiStatus::Ok);
        assert!(h);
        let bad = [f64::NAN; 6];
        assert_eq!(
            hi_is_hyperideal(bad.as_ptr(), &mut h),
            HiStatus::InvalidInput
        );
        let v = CStr::from_ptr(hi_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}

fn target_dir() -> PathBuf {
    // tests run from <target>/<profile>/deps/
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include/hyperideal.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in [
        "hi_flow_run",
        "HI_STATUS_NOT_CONVERGED",
        "typedef struct HiTriangulation",
    ] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let lib = target_dir().join("libhyperideal_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!(
            "skipping C link check: no cc or {} not built",
            lib.display()
        );
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"
#include <math.h>
#include <stdio.h>
#include "hyperideal.h"

int main(void) {
    size_t labels[12] = {0};
    HiTriangulation *tri = NULL;
    if (hi_triangulation_from_labels(labels, 2, &tri) != HI_STATUS_OK) return 10;
    HiFlowResult *res = NULL;
    HiFlowConfig cfg = hi_flow_config_default();
    if (hi_flow_run(tri, NULL, 0, &cfg, &res) != HI_STATUS_OK) return 11;
    double l = 0.0;
    size_t n = 0;
    if (hi_flow_result_lengths(res, &l, 1, &n) != HI_STATUS_OK || n != 1) return 12;
    printf("%.9f\n", cosh(l));
    hi_flow_result_free(res);
    hi_triangulation_free(tri);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1.183012702");
}
