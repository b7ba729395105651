//! Compiles tests/smoke.c against the generated header and the static library.

use std::path::PathBuf;
use std::process::Command;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // `cargo test` only builds the rlib, so build the staticlib separately.
    // A private target dir avoids waiting on the outer build lock.
    let target_dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("staticlib");
    let status = Command::new(env!("CARGO"))
        .args(["build", "--quiet", "--lib", "-p", env!("CARGO_PKG_NAME"), "--target-dir"])
        .arg(&target_dir)
        .current_dir(&manifest)
        .status()
        .expect("run cargo");
    assert!(status.success(), "building the static library failed");
    let lib = target_dir.join("debug/libcarleman_coeffs_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());

    let out_dir = tempfile::tempdir().unwrap();
    let bin = out_dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap_or_else(|e| panic!("failed to run C compiler `{cc}`: {e}"));
    assert!(status.success(), "C compilation failed");

    let run = Command::new(&bin).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "smoke binary failed: {}", String::from_utf8_lossy(&run.stderr));
    assert!(stdout.starts_with("ok "), "{stdout}");
}
