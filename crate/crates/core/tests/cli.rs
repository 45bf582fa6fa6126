use std::fs;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectral-dial"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn dial_prints_exact_tables() {
    let o = bin(&["dial", "--targets=-3,-15/2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# coefficients\npower,coefficient,decimal\n1,-13/2,-6.5\n2,1,1\n"));
    assert!(text.contains("\n3,7/2,-21/2,-10.5,3\n"));
    assert!(text.contains("# summary\nground_level,sturm_liouville_ordered,violation_count\n3,false,3\n"));
}

#[test]
fn output_is_deterministic() {
    let a = stdout(&bin(&["--format", "json", "spectrum", "--coeffs=-13/2,1"]));
    let b = stdout(&bin(&["--format", "json", "spectrum", "--coeffs=-13/2,1"]));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    let order: Vec<u64> = v["ordering"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["n"].as_u64().unwrap())
        .collect();
    assert_eq!(order, vec![3, 2, 4, 1, 5, 0, 6, 7, 8]);
    assert_eq!(v["spectrum"][3]["E_n"], "-21/2");
}

#[test]
fn request_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("req.json");
    fs::write(
        &path,
        r#"{"targets":[{"level":0,"energy":"-3"},{"level":1,"energy":"-7.5"}]}"#,
    )
    .unwrap();
    let o = bin(&["--format", "json", "dial", "--request", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["coefficients"][0]["coefficient"], "-13/2");
    assert_eq!(v["coefficients"][1]["coefficient"], "1");

    fs::write(&path, r#"{"targets":[{"level":0,"energy":-3}]}"#).unwrap();
    assert_eq!(
        bin(&["dial", "--request", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn subset_dialling() {
    let o = bin(&["dial", "--targets", "0:1,3:2", "--drop-powers", "2,3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("\n0,1/2,1,1,0\n"), "{text}");
    assert!(text.contains("\n3,7/2,2,2,3\n"), "{text}");
}

#[test]
fn verify_exit_codes() {
    let ok = bin(&["verify", "--coeffs=-13/2,1", "--levels", "9"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("true,1001,10,4,3 2 4 1 5 0 6 7 8,3 2 4 1 5 0 6 7 8,true,true,true"));

    let unbounded = bin(&["verify", "--coeffs", "0,-1", "--grid-points", "101"]);
    assert_eq!(unbounded.status.code(), Some(4));
}

#[test]
fn parse_errors_exit_2() {
    assert_eq!(bin(&["spectrum", "--coeffs", "abc"]).status.code(), Some(2));
    assert_eq!(bin(&["dial", "--targets", "1/0"]).status.code(), Some(2));
    assert_eq!(bin(&["dial", "--targets", "0:1,2"]).status.code(), Some(2));
    assert_eq!(bin(&["det", "0"]).status.code(), Some(2));
    assert_eq!(
        bin(&["verify", "--coeffs", "1", "--grid-points", "2"]).status.code(),
        Some(2)
    );
}

#[test]
fn determinant_command() {
    let o = bin(&["det", "5"]);
    assert_eq!(
        stdout(&o),
        "# determinant\nN,determinant,closed_form,equal\n5,8505,8505,true\n"
    );
}

#[test]
fn figure_bundle_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig");
    let o = bin(&[
        "--format",
        "json",
        "figure",
        "--coeffs=-13/2,1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    for name in [
        "spectrum.csv",
        "cross_section.csv",
        "eigenfunctions.csv",
        "figure.svg",
        "figure.json",
    ] {
        assert!(out.join(name).is_file(), "{name}");
    }
    let spectrum = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert!(spectrum.contains("\n3,7/2,-21/2,-10.5\n"));
    let eig = fs::read_to_string(out.join("eigenfunctions.csv")).unwrap();
    assert!(eig.starts_with("# display_scale=0.45\nx,level_0,"));

    let first = fs::read(out.join("figure.svg")).unwrap();
    bin(&["figure", "--coeffs=-13/2,1", "--out", out.to_str().unwrap()]);
    assert_eq!(first, fs::read(out.join("figure.svg")).unwrap());
}

#[test]
fn unwritable_output_exits_6() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = bin(&[
        "figure",
        "--coeffs",
        "1",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(6));
}
