use std::path::PathBuf;

use qubo_linsys::cli::run;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qubo-linsys").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn solve_reports_the_ground_state() {
    let (code, out, _) = call(&["solve", &fixture("worked_example.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("0\t0\t1\t0\t0\t1\t0\t0\t-26.0\t1"), "{out}");
    assert!(out.contains("x = (-1, 2)  residual = 0"), "{out}");
}

#[test]
fn solve_with_annealing_counts_every_read() {
    let (code, out, _) = call(&[
        "solve",
        &fixture("worked_example.json"),
        "--sampler",
        "sa",
        "--reads",
        "50",
        "--sweeps",
        "200",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("50 total occurrences"), "{out}");
    let (_, again, _) = call(&["solve", &fixture("worked_example.json"), "--sampler", "sa", "--reads", "50", "--sweeps", "200", "--seed", "3"]);
    assert_eq!(out, again);
}

#[test]
fn eigen_solve_lists_nontrivial_pairs() {
    let (code, out, _) = call(&["solve", &fixture("eigen_diag23.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("# eigen (positive lambda)"));
    assert!(out.contains("# eigen (negative lambda)"));
    assert!(out.contains("nontrivial eigenpairs: 4"), "{out}");
    assert!(out.contains("x = (0, -1)  lambda = 3  residual = 0"), "{out}");
}

#[test]
fn decode_and_estimate() {
    let (code, out, _) = call(&["decode", &fixture("worked_example.json"), "00100100"]);
    assert_eq!(code, 0);
    assert_eq!(out, "x = (-1, 2)  residual = 0\n");
    let (code, out, _) = call(&["estimate", "2", "1"]);
    assert_eq!((code, out.as_str()), (0, "1 6 12\n"));
    let (code, _, err) = call(&["decode", &fixture("worked_example.json"), "0012"]);
    assert_eq!(code, 1);
    assert!(err.contains("bitstring"), "{err}");
}

#[test]
fn build_writes_suffixed_files_for_split_models() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("model.txt");
    let (code, out, _) = call(&["build", &fixture("eigen_diag23.json"), "--out", out_path.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["model.eigen-negative-lambda.txt", "model.eigen-positive-lambda.txt"]);

    let (code, out, _) = call(&["build", &fixture("worked_example.json"), "--include-zeros"]);
    assert_eq!(code, 0);
    // header plus all 36 upper-triangular entries
    assert_eq!(out.lines().count(), 37);
}

#[test]
fn verify_passes_on_fixtures() {
    for f in ["worked_example.json", "eigen_diag23.json"] {
        let (code, out, _) = call(&["verify", &fixture(f)]);
        assert_eq!(code, 0, "{out}");
        assert!(!out.contains("[FAIL]"));
    }
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["bogus"]).0, 2);
    assert_eq!(call(&["estimate", "x", "1"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
    assert_eq!(call(&["estimate", "0", "1"]).0, 1);
    let (code, _, err) = call(&["solve", "/nonexistent/problem.json"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
}

#[test]
fn malformed_problem_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"kind\": \"linsys\",\n  \"A\": [[1]],\n  \"oops\": 1\n}").unwrap();
    let (code, _, err) = call(&["solve", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("line"), "{err}");
}
