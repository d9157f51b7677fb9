//! Compiles `smoke.c` against the generated header and the static library.

use std::path::PathBuf;
use std::process::Command;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// The static library sits next to the `deps` directory holding this test binary.
fn static_lib() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    profile_dir.join("libqubo_linsys_ffi.a")
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(manifest_dir().join("include/qubo_linsys.h")).unwrap();
    for name in [
        "typedef struct QlProblem QlProblem;",
        "typedef struct QlSampleSet QlSampleSet;",
        "QL_STATUS_OK = 0",
        "ql_problem_from_json",
        "ql_problem_free",
        "ql_solve_sa",
        "ql_sampleset_bits",
        "ql_string_free",
        "ql_last_error",
    ] {
        assert!(header.contains(name), "header is missing {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let lib = static_lib();
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest_dir().join("include"))
        .arg(manifest_dir().join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("running cc");
    assert!(status.success(), "cc failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "x = (-1, 2)\n");
}
