use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use stable_stein_ffi::*;

fn last_error() -> String {
    let p = ss_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn stable_handle_round_trip() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { ss_stable_new(1.5, 1.0, 0.0, &mut h) }, SsStatus::Ok);
    let mut v = 0.0;
    assert_eq!(unsafe { ss_stable_density(h, 0.0, &mut v) }, SsStatus::Ok);
    // Γ(5/3)/π.
    assert!((v - 0.287_352_751_452_164_45).abs() < 1e-10, "{v}");
    assert_eq!(unsafe { ss_stable_cdf(h, 0.0, &mut v) }, SsStatus::Ok);
    assert!((v - 0.5).abs() < 1e-10);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { ss_stable_char_fn(h, 1.0, &mut re, &mut im) }, SsStatus::Ok);
    assert!((re - (-1f64).exp()).abs() < 1e-15 && im.abs() < 1e-15);
    let mut buf = vec![0.0; 100];
    assert_eq!(unsafe { ss_stable_sample(h, 100, 7, buf.as_mut_ptr()) }, SsStatus::Ok);
    let mut again = vec![0.0; 100];
    assert_eq!(unsafe { ss_stable_sample(h, 100, 7, again.as_mut_ptr()) }, SsStatus::Ok);
    assert_eq!(buf, again);
    assert_eq!(unsafe { ss_stable_call(h, 2.0, &mut v) }, SsStatus::Ok);
    assert!(v > 0.3 && v < 0.35, "{v}");
    unsafe { ss_stable_free(h) };
    unsafe { ss_stable_free(ptr::null_mut()) };
}

#[test]
fn errors_are_reported_with_messages() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { ss_stable_new(2.5, 1.0, 0.0, &mut h) }, SsStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("alpha"), "{}", last_error());
    let mut v = 0.0;
    assert_eq!(unsafe { ss_stable_density(ptr::null(), 0.0, &mut v) }, SsStatus::NullPointer);
    let mut buf = [0 as std::ffi::c_char; 8];
    let full = unsafe { ss_last_error_copy(buf.as_mut_ptr(), buf.len()) };
    assert!(full > 7);
    let short = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_bytes().len();
    assert_eq!(short, 7);

    let mut law = ptr::null_mut();
    assert_eq!(unsafe { ss_law_pareto(1.5, &mut law) }, SsStatus::Ok);
    let mut out = vec![0.0; 10];
    let st = unsafe { ss_law_sample_sn(law, 100_000, 100_000, 1, out.as_mut_ptr()) };
    assert_eq!(st, SsStatus::BudgetExceeded);
    unsafe { ss_law_free(law) };
}

#[test]
fn bounds_and_stein() {
    let mut law = ptr::null_mut();
    assert_eq!(unsafe { ss_law_pareto(1.5, &mut law) }, SsStatus::Ok);
    let mut s = std::mem::MaybeUninit::<SsBoundSummary>::uninit();
    assert_eq!(unsafe { ss_bounds(law, 1000.0, 2.0, s.as_mut_ptr()) }, SsStatus::Ok);
    let s = unsafe { s.assume_init() };
    assert!((s.rn - 0.1).abs() < 1e-14);
    assert_eq!(s.uniform_bound, s.c1 * s.rn);
    assert!(s.nonuniform_bound < s.uniform_bound);
    let mut none = std::mem::MaybeUninit::<SsBoundSummary>::uninit();
    assert_eq!(unsafe { ss_bounds(law, 1000.0, f64::NAN, none.as_mut_ptr()) }, SsStatus::Ok);
    assert!(unsafe { none.assume_init() }.c2m.is_nan());

    let mut js = ptr::null_mut();
    assert_eq!(unsafe { ss_bounds_json(law, 100.0, 1.0, &mut js) }, SsStatus::Ok);
    let text = unsafe { CStr::from_ptr(js) }.to_string_lossy().into_owned();
    assert!(text.contains("\"uniform_bound\""));
    unsafe { ss_string_free(js) };

    let mut paths = vec![0.0; 64];
    assert_eq!(unsafe { ss_law_sample_sn(law, 10, 64, 3, paths.as_mut_ptr()) }, SsStatus::Ok);
    assert!(paths.iter().all(|v| v.is_finite()));
    unsafe { ss_law_free(law) };

    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { ss_stein_call_new(2.0, 1.5, 0.0, &mut sol) }, SsStatus::Ok);
    let mut r = 0.0;
    assert_eq!(unsafe { ss_stein_eval(sol, SsSteinQuantity::Residual, 1.0, &mut r) }, SsStatus::Ok);
    assert!(r.abs() < 1e-6, "{r}");
    let (mut nu, mut fp) = (0.0, 0.0);
    assert_eq!(unsafe { ss_stein_nu(sol, &mut nu) }, SsStatus::Ok);
    assert_eq!(unsafe { ss_stein_eval(sol, SsSteinQuantity::Fprime, 0.0, &mut fp) }, SsStatus::Ok);
    assert!(fp.abs() <= 1.5);
    unsafe { ss_stein_free(sol) };
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(ss_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("stable_stein.h")
}

#[test]
fn header_declares_the_interface() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "ss_stable_new",
        "ss_stable_free",
        "ss_stable_density",
        "ss_law_pareto",
        "ss_bounds",
        "ss_stein_eval",
        "ss_last_error",
        "typedef struct SsStableLaw SsStableLaw",
        "SS_STATUS_INVALID_ARGUMENT = 1",
    ] {
        assert!(h.contains(name), "{name} missing");
    }
}

fn newest_source(dir: &Path) -> std::time::SystemTime {
    std::fs::read_dir(dir)
        .unwrap()
        .flatten()
        .map(|e| {
            let p = e.path();
            if p.is_dir() { newest_source(&p) } else { e.metadata().unwrap().modified().unwrap() }
        })
        .max()
        .unwrap_or(std::time::UNIX_EPOCH)
}

/// Compiles a small C program against the header and the static library when a C compiler
/// and an up-to-date archive are available. `cargo test` does not rebuild the archive, so run
/// `cargo build -p stable-stein-ffi` first to exercise this.
#[test]
fn c_program_links_and_runs() {
    let target = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../target");
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    let archive = target.join(profile).join("libstable_stein_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !archive.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no archive at {} or no C compiler", archive.display());
        return;
    }
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let built = std::fs::metadata(&archive).unwrap().modified().unwrap();
    if built < newest_source(&root.join("src")).max(newest_source(&root.join("../core/src"))) {
        eprintln!("skipping: {} is older than the sources", archive.display());
        return;
    }
    let dir = std::env::temp_dir().join(format!("ss_ffi_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "stable_stein.h"
int main(void) {
    SsStableLaw *h = NULL;
    double v = 0.0;
    if (ss_stable_new(1.5, 1.0, 0.0, &h) != SS_STATUS_OK) return 1;
    if (ss_stable_density(h, 0.0, &v) != SS_STATUS_OK) return 2;
    ss_stable_free(h);
    if (ss_stable_new(3.0, 1.0, 0.0, &h) != SS_STATUS_INVALID_ARGUMENT) return 3;
    if (ss_last_error() == NULL) return 4;
    printf("%.12f\n", v);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.join("main");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{out:?}");
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.287352751452");
}
