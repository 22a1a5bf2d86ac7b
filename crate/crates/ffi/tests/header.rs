//! Compiles the C smoke program against the generated header and the shared
//! library. Skipped when no C compiler or built library is available.

use std::path::{Path, PathBuf};
use std::process::Command;

fn library_dir() -> Option<PathBuf> {
    // tests run from target/<profile>/deps
    let dir = std::env::current_exe()
        .ok()?
        .parent()?
        .parent()?
        .to_path_buf();
    let name = format!(
        "{}rtprof_ffi{}",
        std::env::consts::DLL_PREFIX,
        std::env::consts::DLL_SUFFIX
    );
    dir.join(&name).exists().then_some(dir)
}

#[test]
fn header_declares_api() {
    let header =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/rtprof.h"))
            .unwrap();
    for sym in [
        "RT_STATUS_BUDGET",
        "typedef struct RtGraph RtGraph;",
        "rtprof_last_error",
        "rtprof_graph_new",
        "rtprof_round_tree_build",
        "rtprof_yk_build",
        "rtprof_certify_yk",
        "rtprof_certificate_to_json",
        "rtprof_cut_size",
        "rtprof_string_free",
    ] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
}

#[test]
fn c_smoke_program() {
    let Some(lib) = library_dir() else {
        eprintln!("shared library not built; skipping");
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = tempfile_path();
    let status = Command::new("cc")
        .arg(root.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg("-L")
        .arg(&lib)
        .arg(format!("-Wl,-rpath,{}", lib.display()))
        .args(["-lrtprof_ffi", "-lm", "-Wall", "-Werror", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}

fn tempfile_path() -> PathBuf {
    std::env::temp_dir().join(format!("rtprof-ffi-smoke-{}", std::process::id()))
}
