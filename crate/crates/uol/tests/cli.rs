//! Binary-level tests of the `uol` CLI: run/validate/report round trips,
//! config diagnostics, exit codes, and the golden image checksums.

use std::path::Path;
use std::process::Command;

use uol::boundary::BoundaryData;
use uol::cross::{synthesize_cross_field, CrossExpansion};
use uol::extremal::{maximal_solution, ExtremalParams};
use uol::field::GridSpec;
use uol::runner::sha256_hex;

fn uol_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uol"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const SOLVE_CONFIG: &str = r#"{
  "domain": { "origin": [-1.0, -1.0], "size": [2.0, 2.0], "h": 0.0625 },
  "boundary": { "kind": "constant", "value": 0.0 },
  "task": { "kind": "solve-max" },
  "seed": 3
}"#;

#[test]
fn run_then_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "solve.json", SOLVE_CONFIG);
    let out = dir.path().join("out");

    let status = uol_cmd()
        .args(["run"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("report.json").exists());
    assert!(out.join("field.uol").exists());
    assert!(out.join("field.pgm").exists());
    assert!(out.join("field.svg").exists());

    let report = uol_cmd().args(["report"]).arg(&out).output().unwrap();
    assert!(report.status.success(), "{}", String::from_utf8_lossy(&report.stderr));
    let stdout = String::from_utf8_lossy(&report.stdout);
    assert!(stdout.contains("manifest verified"));

    // tamper and re-verify: nonzero exit
    std::fs::write(out.join("field.pgm"), b"??").unwrap();
    let tampered = uol_cmd().args(["report"]).arg(&out).output().unwrap();
    assert!(!tampered.status.success());
    assert!(String::from_utf8_lossy(&tampered.stderr).contains("hash mismatch"));
}

#[test]
fn validate_echoes_defaults_and_names_bad_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "solve.json", SOLVE_CONFIG);
    let ok = uol_cmd().args(["validate"]).arg(&cfg).output().unwrap();
    assert!(ok.status.success());
    let echoed = String::from_utf8_lossy(&ok.stdout);
    assert!(echoed.contains("fixed_point_tol"), "defaults echoed: {echoed}");

    // missing radii for a monotonicity task: the error names the field
    let bad = write_config(
        dir.path(),
        "bad.json",
        r#"{
  "domain": { "origin": [-1.0, -1.0], "size": [2.0, 2.0], "h": 0.0625 },
  "boundary": { "kind": "constant", "value": 0.0 },
  "task": { "kind": "monotonicity", "centers": [[0.0, 0.0]] }
}"#,
    );
    let out = uol_cmd().args(["validate"]).arg(&bad).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("radii"), "diagnostic names the field: {stderr}");
    // and no artifacts appear anywhere
    assert_eq!(
        std::fs::read_dir(dir.path()).unwrap().count(),
        2,
        "validate must not write artifacts"
    );
}

#[test]
fn cross_check_task_exits_clean() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cross.json",
        r#"{
  "domain": { "origin": [-0.125, -0.125], "size": [0.25, 0.25], "h": 0.015625 },
  "boundary": { "kind": "constant", "value": 0.0 },
  "task": { "kind": "cross-check" }
}"#,
    );
    let out = dir.path().join("out");
    let output = uol_cmd()
        .args(["run"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("ode_residual_max"));
    assert!(out.join("cross_report.json").exists());
}

/// Golden grayscale exports, frozen once: the torsion field renders as a
/// radially bright center, the cross as a four-quadrant alternating pattern.
#[test]
fn heatmap_golden_checksums() {
    let spec = GridSpec::from_extent(-1.0, 1.0, -1.0, 1.0, 1.0 / 64.0).unwrap();
    let g = BoundaryData::Constant { value: 0.0 }.materialize(spec).unwrap();
    let torsion = maximal_solution(&g, &ExtremalParams::for_spacing(spec.h)).unwrap().u;
    let pgm = torsion.to_pgm();
    assert_eq!(
        sha256_hex(&pgm),
        "1d1d2f8aaeae4a040e869e13f2979dcc5e6b0c603384929065d9eb4ba32a0e02",
        "torsion heatmap changed"
    );

    let cspec = GridSpec::centered(257, 0.5 / 256.0).unwrap();
    let cross = synthesize_cross_field(&CrossExpansion::canonical(), cspec, (-1.0f64).exp()).unwrap();
    let cpgm = cross.to_pgm();
    assert_eq!(
        sha256_hex(&cpgm),
        "3f11d89ff53526aa0433e64bbac9d0d8386a31bb2aab719557df941848c3dc04",
        "cross heatmap changed"
    );
    // four-quadrant sign pattern: bright on the x1 half-axes, dark on the
    // x2 half-axes, intermediate on the diagonal
    let header = cpgm.len() - 257 * 257;
    let px = |i: usize, j: usize| cpgm[header + (256 - j) * 257 + i] as i32;
    let east = px(224, 128);
    let north = px(128, 224);
    let diag = px(196, 196);
    assert!(east > diag && diag > north, "east {east}, diag {diag}, north {north}");

    // constant fields render uniformly
    let flat = uol::field::ScalarField::constant(spec, 2.0).unwrap();
    let fpgm = flat.to_pgm();
    let body = &fpgm[fpgm.len() - spec.len()..];
    assert!(body.iter().all(|b| *b == body[0]));
}

#[test]
fn shipped_sample_configs_validate() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let out = uol_cmd().args(["validate"]).arg(&path).output().unwrap();
        assert!(out.status.success(), "{path:?}: {}", String::from_utf8_lossy(&out.stderr));
        seen += 1;
    }
    assert!(seen >= 6, "expected the shipped sample configs, found {seen}");
}
