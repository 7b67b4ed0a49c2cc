//! End-to-end runs of the binary: file outputs, exit codes, determinism
//! and round-trips.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmc"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn delaunay_writes_solution_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "delaunay", "--c", "0", "--H", "0", "--u0", "1", "--s-max", "2", "--out", "cat",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("cat");
    assert!(dir.join("usolution.json").exists());
    let csv = std::fs::read_to_string(dir.join("usolution.csv")).unwrap();
    assert!(csv.starts_with("s,u,uprime,lambda,mu,residual\n"));
    // the catenoid solution u = 1 + s^2 at the last row (s = 2)
    let last = csv.lines().last().unwrap();
    let u: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((u - 5.0).abs() < 1e-6, "u(2) = {u}");

    let verify = run(&["verify", "cat"], tmp.path());
    assert_eq!(code(&verify), 0, "{}", String::from_utf8_lossy(&verify.stdout));
}

#[test]
fn delaunay_constant_solution_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &["delaunay", "--c", "1", "--H", "0", "--u0", "1", "--out", "torus"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(tmp.path().join("torus/usolution.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let u: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((u - 1.0).abs() < 1e-9, "constant solution, u = {u}");
    }
}

#[test]
fn invalid_u0_exits_with_domain_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &["delaunay", "--c", "0", "--H", "0", "--u0", "0"],
        tmp.path(),
    );
    assert_eq!(code(&out), 10);
    assert!(String::from_utf8_lossy(&out.stderr).contains("NonPositiveU0"));
}

#[test]
fn freeboundary_catenoid_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &["freeboundary", "--c", "0", "--H", "0", "--u0", "1", "--out", "fb"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("fb");
    for f in ["piece.json", "pinch.json", "samples.csv", "mesh.obj"] {
        assert!(dir.join(f).exists(), "{f} missing");
    }
    let pinch: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("pinch.json")).unwrap()).unwrap();
    assert_eq!(pinch["verdict"], "DelaunayConsistent");
    let piece: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("piece.json")).unwrap()).unwrap();
    let r = piece["R"].as_f64().unwrap();
    assert!((r - 2.1716229808878).abs() < 1e-6, "critical catenoid R = {r}");

    let verify = run(&["verify", "fb"], tmp.path());
    assert_eq!(code(&verify), 0, "{}", String::from_utf8_lossy(&verify.stdout));
}

#[test]
fn freeboundary_cap_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "freeboundary", "cap", "--c", "0", "--H", "1", "--R", "1", "--out", "cap",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let pinch: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("cap/pinch.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(pinch["verdict"], "SphericalCapConsistent");
    assert_eq!(pinch["umbilic"], "total");
    let verify = run(&["verify", "cap"], tmp.path());
    assert_eq!(code(&verify), 0);
}

#[test]
fn sphere_domain_violation_exits_10() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "freeboundary", "--c", "1", "--H", "0", "--u0", "5", "--R-max", "1.5",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 10, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn no_contact_exits_13() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "freeboundary", "--c", "0", "--H", "1", "--u0", "1", "--s-max", "4",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 13);
    assert!(String::from_utf8_lossy(&out.stderr).contains("NoContact"));
}

#[test]
fn corrupted_artifact_fails_verification_with_20() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &["delaunay", "--c", "0", "--H", "0", "--u0", "1", "--out", "cat"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let csv_path = tmp.path().join("cat/usolution.csv");
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut parts: Vec<String> = lines[100].split(',').map(String::from).collect();
    let u: f64 = parts[1].parse().unwrap();
    parts[1] = format!("{}", u + 1e-3);
    lines[100] = parts.join(",");
    std::fs::write(&csv_path, lines.join("\n") + "\n").unwrap();

    let verify = run(&["verify", "cat"], tmp.path());
    assert_eq!(code(&verify), 20);
    let stdout = String::from_utf8_lossy(&verify.stdout);
    assert!(stdout.contains("FAIL usolution.first_integral"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["a", "b"] {
        let out = run(
            &["freeboundary", "--c", "0", "--H", "0", "--u0", "1", "--out", dir],
            tmp.path(),
        );
        assert_eq!(code(&out), 0);
    }
    for f in ["piece.json", "pinch.json", "samples.csv", "mesh.obj"] {
        let a = std::fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs across identical runs");
    }
}

#[test]
fn json_outputs_reparse_into_equal_values() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &["delaunay", "--c", "-1", "--H", "2", "--u0", "0.9", "--s-max", "1", "--out", "h"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(tmp.path().join("h/usolution.json")).unwrap();
    let v1: serde_json::Value = serde_json::from_str(&text).unwrap();
    let v2: serde_json::Value = serde_json::from_str(&serde_json::to_string(&v1).unwrap()).unwrap();
    assert_eq!(v1, v2);
}

#[test]
fn config_file_overrides_flags() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("run.json"),
        r#"{"c": 0.0, "H": 0.0, "u0": 1.0, "s_max": 1.0}"#,
    )
    .unwrap();
    let out = run(
        &[
            "delaunay", "--c", "5", "--H", "5", "--u0", "5", "--config", "run.json", "--out", "o",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let sol: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("o/usolution.json")).unwrap())
            .unwrap();
    assert_eq!(sol["params"]["c"], 0.0);
    assert_eq!(sol["params"]["H"], 0.0);
}

#[test]
fn u0_sweep_with_jobs_writes_subdirectories() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "delaunay", "--c", "0", "--H", "1", "--u0", "0.5,1,1.5", "--jobs", "3", "--s-max",
            "1", "--out", "sweep",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["u0_0.5", "u0_1", "u0_1.5"] {
        assert!(tmp.path().join("sweep").join(name).join("usolution.csv").exists());
    }
}

#[test]
fn solve_r_inverts_the_contact_radius() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "freeboundary", "--c", "0", "--H", "0", "--solve-r", "1.0", "--out", "s",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let piece: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("s/piece.json")).unwrap())
            .unwrap();
    let r = piece["R"].as_f64().unwrap();
    assert!((r - 1.0).abs() <= 1e-6, "solved R = {r}");
    assert!(tmp.path().join("s/solve_r.json").exists());
}

#[test]
fn all_contacts_enumerates_successive_crossings() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "freeboundary", "--c", "0", "--H", "1", "--u0", "2", "--all-contacts", "--s-max",
            "8", "--out", "ac",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let radii: Vec<f64> = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("ac/contacts.json")).unwrap(),
    )
    .unwrap();
    assert!(radii.len() >= 3, "unduloid crossings: {radii:?}");
    assert!(radii.windows(2).all(|w| w[0] < w[1]), "radii increase");
}

#[test]
fn curvature_blowup_exits_11() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &["delaunay", "--c", "1", "--H", "0", "--u0", "1e12"],
        tmp.path(),
    );
    assert_eq!(code(&out), 11);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Breakdown"));
}

#[test]
fn env_var_sets_the_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::create_dir(tmp.path().join("envdir")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cmc"))
        .args(["delaunay", "--c", "0", "--H", "0", "--u0", "1", "--s-max", "1"])
        .env("CMCLAB_OUT", "envdir")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("envdir/usolution.json").exists());
}
