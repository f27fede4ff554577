use patchscope_ffi::*;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_string(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    ps_string_free(p);
    s
}

unsafe fn last_error() -> String {
    CStr::from_ptr(ps_last_error()).to_str().unwrap().to_owned()
}

#[test]
fn cone_queries() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(ps_cone_new(cs("cayley").as_ptr(), cs("1,0,0,0").as_ptr(), &mut c), PsStatus::Ok);
        let mut d = 0usize;
        assert_eq!(ps_cone_face_dim(c, cs("1,1,0,0").as_ptr(), &mut d), PsStatus::Ok);
        assert_eq!(d, 2);
        let mut m = 0usize;
        assert_eq!(ps_cone_multiplicity(c, cs("1,1,1,1").as_ptr(), &mut m), PsStatus::Ok);
        assert_eq!(m, 2);
        assert_eq!(ps_cone_face_dim(c, cs("1,1,1,1").as_ptr(), &mut d), PsStatus::Domain);
        assert!(last_error().contains("multiplicity"));
        let mut inside = -1;
        assert_eq!(ps_cone_contains_f64(c, [1.0, 0.0, 0.0, 0.0].as_ptr(), 4, 1e-9, &mut inside), PsStatus::Ok);
        assert_eq!(inside, 1);
        let mut json = ptr::null_mut();
        assert_eq!(ps_cone_check(c, 50, 1, &mut json), PsStatus::Ok);
        assert!(take_string(json).contains("certified-on-samples"));
        ps_cone_free(c);
    }
}

#[test]
fn errors_and_null_arguments() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(ps_cone_new(ptr::null(), cs("1,0,0").as_ptr(), &mut c), PsStatus::NullArgument);
        assert_eq!(ps_cone_new(cs("lorentz").as_ptr(), cs("1,x,0").as_ptr(), &mut c), PsStatus::Parse);
        assert!(c.is_null());
        let mut b = ptr::null_mut();
        assert_eq!(ps_body_from_gallery(cs("nowhere").as_ptr(), &mut b), PsStatus::InvalidInput);
        assert!(!last_error().is_empty());
        assert_eq!(ps_body_dim(ptr::null()), 0);
        ps_body_free(ptr::null_mut());
        ps_string_free(ptr::null_mut());
    }
}

#[test]
fn body_sampling_and_patches() {
    unsafe {
        let mut b = ptr::null_mut();
        assert_eq!(ps_body_from_gallery(cs("elliptope").as_ptr(), &mut b), PsStatus::Ok);
        let (mut v, mut x) = (0.0, [0.0; 3]);
        assert_eq!(ps_body_support(b, [1.0, 1.0, -1.0].as_ptr(), 3, &mut v, x.as_mut_ptr()), PsStatus::Ok);
        assert!((v - 1.5).abs() < 1e-6, "{v}");
        let mut pairs = ptr::null_mut();
        assert_eq!(ps_ncycle_sample(b, 20, cs("dual-directions").as_ptr(), 7, &mut pairs), PsStatus::Ok);
        assert_eq!(ps_pairs_len(pairs), 20);
        let (mut px, mut pl, mut r) = ([0.0; 3], [0.0; 3], 0.0);
        assert_eq!(ps_pairs_get(pairs, 3, px.as_mut_ptr(), pl.as_mut_ptr(), &mut r), PsStatus::Ok);
        let polar: f64 = px.iter().zip(&pl).map(|(a, b)| a * b).sum();
        assert!((polar + 1.0).abs() < 1e-6);
        assert_eq!(ps_pairs_get(pairs, 20, px.as_mut_ptr(), pl.as_mut_ptr(), &mut r), PsStatus::InvalidInput);
        let mut jsonl = ptr::null_mut();
        assert_eq!(ps_pairs_to_jsonl(pairs, &mut jsonl), PsStatus::Ok);
        assert_eq!(take_string(jsonl).lines().count(), 20);
        ps_pairs_free(pairs);
        let pts = patchscope::gallery::patch_sample(&patchscope::gallery::entry("elliptope").unwrap(), 1000, 7).unwrap();
        let flat: Vec<f64> = pts.concat();
        let mut report = ptr::null_mut();
        assert_eq!(ps_patches_report(flat.as_ptr(), pts.len(), 3, b, 0.0, &mut report), PsStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(report)).unwrap();
        assert_eq!(v["candidates"].as_array().unwrap().len(), 4);
        ps_body_free(b);
    }
}

#[test]
fn hausdorff_distance() {
    let a = [0.0, 0.0, 1.0, 0.0];
    let b = [3.0, 4.0];
    let mut d = 0.0;
    unsafe {
        assert_eq!(ps_hausdorff(a.as_ptr(), 2, b.as_ptr(), 1, 2, &mut d), PsStatus::Ok);
        assert_eq!(d, 5.0);
        assert_eq!(ps_hausdorff(a.as_ptr(), 2, b.as_ptr(), 0, 2, &mut d), PsStatus::Empty);
    }
}

#[test]
fn header_compiles_and_links_from_c() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/patchscope.h")).unwrap();
    for f in ["ps_body_from_json", "ps_ncycle_sample", "ps_patches_report", "ps_cone_face_dim", "ps_hausdorff", "ps_last_error"] {
        assert!(header.contains(f), "{f} missing from the header");
    }
    // the static library built with this test binary sits beside it in deps/
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().unwrap().join("libpatchscope_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let out = tempfile::tempdir().unwrap();
    let bin = out.path().join("smoke");
    let status = std::process::Command::new("cc")
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let run = std::process::Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "smoke exited with {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
