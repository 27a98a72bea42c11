//! End-to-end CLI tests: bundle round trips, exit-code contract, and
//! deterministic output.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn movoid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_movoid")).args(args).output().expect("spawn movoid")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn construct_smallest(dir: &Path) -> Output {
    movoid(&[
        "construct", "--p", "3", "--l", "3", "--t", "2", "--b", "1", "-o",
        dir.to_str().unwrap(),
    ])
}

#[test]
fn params_report() {
    let out = movoid(&["params", "--p0", "3", "--p", "3", "--l", "3", "--t", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("case: B"));
    assert!(text.contains("d0: 7"));
    assert!(text.contains("m-menu: b * 13 for 1 <= b <= 6"));

    let none = movoid(&["params", "--p0", "3", "--p", "7", "--l", "1", "--t", "6"]);
    assert!(none.status.success());
    assert!(stdout(&none).contains("no construction"));
}

#[test]
fn construct_writes_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = construct_smallest(dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("|M|: 9490  m: 13"));
    for file in ["field.txt", "points.csv", "meta.txt"] {
        assert!(dir.path().join(file).exists(), "missing {file}");
    }
    let points = fs::read_to_string(dir.path().join("points.csv")).unwrap();
    assert_eq!(points.lines().count(), 9491); // header + 9490 reps
}

#[test]
fn construct_rejects_bad_b_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = movoid(&[
        "construct", "--p", "3", "--l", "3", "--t", "2", "--b", "7", "-o",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn construct_rejects_oversized_field_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    // d0 = 5 > 1 but q = 19^10 is far beyond the table budget
    let out = movoid(&[
        "construct", "--p", "19", "--l", "1", "--t", "10", "--b", "1", "-o",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_character_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert!(construct_smallest(dir.path()).status.success());
    let out = movoid(&["verify", dir.path().to_str().unwrap(), "--modes", "character"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("overall: pass"));
    assert!(text.contains("coverage: certified"));
    let cert = fs::read_to_string(dir.path().join("certificate.txt")).unwrap();
    assert!(cert.contains("movoid-character: pass"));

    // corrupt the bundle: read_bundle must reject it
    let points = dir.path().join("points.csv");
    let text = fs::read_to_string(&points).unwrap();
    let truncated: Vec<&str> = text.lines().take(9400).collect();
    fs::write(&points, truncated.join("\n") + "\n").unwrap();
    let bad = movoid(&["verify", dir.path().to_str().unwrap(), "--modes", "character"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn export_round_trip_and_intersections() {
    let dir = tempfile::tempdir().unwrap();
    assert!(construct_smallest(dir.path()).status.success());

    let points = movoid(&["export", dir.path().to_str().unwrap(), "--format", "points"]);
    assert!(points.status.success());
    assert_eq!(stdout(&points), fs::read_to_string(dir.path().join("points.csv")).unwrap());

    let inter = movoid(&["export", dir.path().to_str().unwrap(), "--format", "intersections"]);
    assert!(inter.status.success());
    assert_eq!(stdout(&inter), "size,frequency\n985,9490\n1066,56940\n");

    let unknown = movoid(&["export", dir.path().to_str().unwrap(), "--format", "nope"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn deterministic_rebuild() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(construct_smallest(a.path()).status.success());
    assert!(construct_smallest(b.path()).status.success());
    for file in ["field.txt", "points.csv", "meta.txt"] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap(),
            "{file} differs between identical runs"
        );
    }
}

#[test]
fn conjecture_output() {
    let out = movoid(&["conjecture", "--p", "3", "--p0", "5", "--t", "2", "--l0", "1..3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("121/729"));
    assert!(text.contains("strictly decreasing: yes"));

    let bad = movoid(&["conjecture", "--p", "3", "--p0", "5", "--t", "10", "--l0", "1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn tables_flags_two_rows() {
    let out = movoid(&["tables"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("flagged rows: 2"));
    assert!(text.contains("base mismatch"));
}

#[test]
fn explicit_orbit_selection() {
    let dir = tempfile::tempdir().unwrap();
    let out = movoid(&[
        "construct", "--p", "3", "--l", "3", "--t", "2", "--b", "2", "--orbits", "0,2", "-o",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("m: 26"));
    let verify = movoid(&["verify", dir.path().to_str().unwrap(), "--modes", "character,perp"]);
    assert!(verify.status.success());
}
