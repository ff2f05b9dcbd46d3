//! CLI mechanics beyond the acceptance criteria: tolerance resolution,
//! batch mode, determinism, strict schemas and output self-consistency.

use std::path::PathBuf;
use std::process::{Command, Output};

use hierq_core::codec;

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn path(name: &str) -> String {
    golden_dir().join(name).to_string_lossy().into_owned()
}

fn cli() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hierq"));
    cmd.env_remove("HIERQ_TOLERANCE");
    cmd
}

fn run(args: &[&str]) -> Output {
    cli().args(args).output().unwrap()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn unknown_subcommand_and_missing_file_exit_one() {
    let out = run(&["observe"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["density", "--coeffs", "/nonexistent/c.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error:"));
    assert_eq!(err.trim_end_matches('\n').lines().count(), 1);
}

#[test]
fn tolerance_flag_env_and_precedence() {
    let slightly_off = golden_dir().join("coeffs_slightly_off.json");
    std::fs::write(
        &slightly_off,
        "{\"macro_dim\":1,\"micro_dims\":[2],\"coeffs\":[[0.6,0],[0.80002,0]]}\n",
    )
    .unwrap();
    let off = slightly_off.to_string_lossy().into_owned();

    // Default 1e-9 rejects the drifted normalization.
    let out = run(&["density", "--coeffs", &off]);
    assert_eq!(out.status.code(), Some(1));

    // A loose run tolerance accepts it, via flag or environment.
    let out = run(&["density", "--coeffs", &off, "--tolerance", "1e-4"]);
    assert_eq!(out.status.code(), Some(0));
    let out = cli()
        .env("HIERQ_TOLERANCE", "1e-4")
        .args(["density", "--coeffs", &off])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    // The flag beats the environment.
    let out = cli()
        .env("HIERQ_TOLERANCE", "1e-4")
        .args(["density", "--coeffs", &off, "--tolerance", "1e-9"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // Out-of-range and unparsable tolerances are usage errors.
    assert_eq!(
        run(&["cg", "--reps", "1", "--target", "1", "--tolerance", "0.5"])
            .status
            .code(),
        Some(1)
    );
    let out = cli()
        .env("HIERQ_TOLERANCE", "not-a-number")
        .args(["cg", "--reps", "1", "--target", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    std::fs::remove_file(slightly_off).unwrap();
}

#[test]
fn unknown_json_fields_are_rejected_everywhere() {
    let out = run(&["density", "--coeffs", &path("bad_unknown_field.json")]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown field"), "stderr: {err}");
}

#[test]
fn outputs_reparse_under_the_same_schema() {
    let out = run(&["haar-encode", "--input", &path("leaves.json")]);
    codec::haar_tree_from_json(&stdout_of(&out)).unwrap();

    let out = run(&["density", "--coeffs", &path("coeffs_pair.json")]);
    codec::density_from_json(&stdout_of(&out), 1e-9).unwrap();

    let out = run(&["repair", "--scenario", &path("scenario_hydra.json")]);
    let trace = stdout_of(&out);
    // Trace stages embed full trees; each snapshot reparses.
    for chunk in trace.split("\"tree\":").skip(1) {
        let mut depth = 0usize;
        let mut end = 0;
        for (i, ch) in chunk.char_indices() {
            match ch {
                '{' => depth += 1,
                '}' => {
                    depth -= 1;
                    if depth == 0 {
                        end = i + 1;
                        break;
                    }
                }
                _ => {}
            }
        }
        codec::tree_from_json(&chunk[..end]).unwrap();
    }
}

#[test]
fn repair_is_deterministic_across_runs() {
    let a = run(&["repair", "--scenario", &path("scenario_hydra.json")]);
    let b = run(&["repair", "--scenario", &path("scenario_hydra.json")]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());

    let a = run(&[
        "haar-encode",
        "--input",
        &path("leaves.json"),
        "--seed",
        "7",
    ]);
    let b = run(&[
        "haar-encode",
        "--input",
        &path("leaves.json"),
        "--seed",
        "7",
    ]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_file_matches_stdout_bytes_plus_newline() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("rho.json");
    let to_file = run(&[
        "density",
        "--coeffs",
        &path("coeffs_pair.json"),
        "--output",
        file.to_str().unwrap(),
    ]);
    assert_eq!(to_file.status.code(), Some(0));
    let to_stdout = run(&["density", "--coeffs", &path("coeffs_pair.json")]);
    assert_eq!(std::fs::read(&file).unwrap(), to_stdout.stdout);
}

#[test]
fn batch_mode_isolates_files_and_reports_the_worst_code() {
    let dir = tempfile::tempdir().unwrap();
    let hydra = dir.path().join("hydra.json");
    let chimera = dir.path().join("chimera.json");
    std::fs::copy(golden_dir().join("scenario_hydra.json"), &hydra).unwrap();
    std::fs::copy(golden_dir().join("scenario_infeasible.json"), &chimera).unwrap();

    // All-good batch.
    let out = run(&[
        "repair",
        "--batch",
        hydra.to_str().unwrap(),
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let hydra_trace = dir.path().join("hydra.trace.json");
    assert!(hydra_trace.exists());
    let single = run(&["repair", "--scenario", hydra.to_str().unwrap()]);
    assert_eq!(std::fs::read(&hydra_trace).unwrap(), single.stdout);

    // Mixed batch: the infeasible scenario fails with 2, but the good
    // file is still processed and written.
    std::fs::remove_file(&hydra_trace).unwrap();
    let out = run(&[
        "repair",
        "--batch",
        chimera.to_str().unwrap(),
        hydra.to_str().unwrap(),
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(hydra_trace.exists());
    // The infeasible trace is still a complete record.
    let chimera_trace = std::fs::read_to_string(dir.path().join("chimera.trace.json")).unwrap();
    assert!(chimera_trace.contains("\"outcome\":\"infeasible_rebuild\""));
}

#[test]
fn repair_requires_a_source() {
    let out = run(&["repair"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validate_reports_are_still_written_for_invalid_trees() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = run(&[
        "validate",
        "--input",
        &path("tree_invalid.json"),
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("\"valid\":false"));
    assert!(text.contains("level step != 1"));
}

#[test]
fn haar_truncation_is_exposed_and_lossy() {
    // Leaves differing by a tiny perturbation: truncation zeroes the
    // small difference vector, so the decode no longer matches.
    let dir = tempfile::tempdir().unwrap();
    let leaves = dir.path().join("leaves.json");
    std::fs::write(&leaves, "{\"leaves\":[[[1,0],[0,0]],[[1,0],[1e-8,0]]]}\n").unwrap();
    let tree = dir.path().join("tree.json");
    let out = run(&[
        "haar-encode",
        "--input",
        leaves.to_str().unwrap(),
        "--truncate",
        "1e-6",
        "--output",
        tree.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&tree).unwrap();
    let parsed = codec::haar_tree_from_json(&text).unwrap();
    assert_eq!(parsed.psi_levels()[0][0].norm_sqr(), 0.0);
}
