use std::process::{Command, Output};

use serde_json::Value;

fn atlas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atlas"))
        .args(args)
        .env_remove("ATLAS_OUT_DIR")
        .output()
        .expect("run atlas")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn factor_worked_example() {
    let o = atlas(&["factor", "--matrix", "2,1,3,2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "BABAA");
}

#[test]
fn offset_beyond_r_max_is_invalid() {
    let o = atlas(&["similarity", "--matrix", "1,0,0,1", "--r", "1", "--theta", "1/3", "--x", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn spectrum_json_has_bands() {
    let o = atlas(&["spectrum", "--theta", "1/3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["theta"], "1/3");
    assert_eq!(v["bands"].as_array().unwrap().len(), 3);
    assert_eq!(v["edges"].as_array().unwrap().len(), 6);
}

#[test]
fn spectrum_csv_columns() {
    let o = atlas(&["spectrum", "--theta", "1/2", "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,k,lo,hi"));
    assert_eq!(lines.nth(1), Some("1/2,2,0,2.82842712475"));
}

#[test]
fn bad_inputs_exit_two() {
    for args in [
        vec!["spectrum", "--theta", "3/2"],
        vec!["spectrum", "--theta", "one/third"],
        vec!["factor", "--matrix", "2,1,1,1"],
        vec!["similarity", "--matrix", "1,0,2,1", "--r", "1", "--theta", "1/3", "--x", "1"],
        vec!["spectrum", "--theta", "1/3", "--format", "svg"],
    ] {
        assert_eq!(atlas(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn similarity_point() {
    let o = atlas(&["similarity", "--matrix", "1,0,2,1", "--r", "1", "--sign", "+", "--theta", "1/1", "--x", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["theta_out"], "1/3");
    assert!(v["points"][0].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(v["bands"][0], 2);
}

#[test]
fn gaps_and_scalars() {
    let o = atlas(&["gaps", "--theta", "1/3"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("k,s,t,lo,hi"));
    assert!(text.lines().nth(2).unwrap().starts_with("2,-1,-1,"));
    assert_eq!(stdout(&atlas(&["ids", "--x", "0"])).trim(), "0.500000000000");
    assert_eq!(stdout(&atlas(&["trace", "--theta", "1/2", "--x", "0"])).trim(), "0.500000000000");
    assert_eq!(stdout(&atlas(&["ids", "--x", "-4"])).trim(), "0");
}

#[test]
fn butterfly_is_deterministic_and_honours_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_atlas"))
            .args(["butterfly", "--qmax", "8", "--out", name])
            .env("ATLAS_OUT_DIR", dir.path())
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(dir.path().join(name)).unwrap()
    };
    let a = run("a.svg");
    let b = run("b.svg");
    assert_eq!(a, b);
    assert!(String::from_utf8(a).unwrap().starts_with("<?xml"));
}

#[test]
fn curve_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("c.svg");
    let csv_path = dir.path().join("c.csv");
    let o = atlas(&[
        "curve",
        "--from",
        "1/3",
        "--to",
        "1/5",
        "--grid",
        "256",
        "--out",
        svg.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["component_count"], 1);
    assert_eq!(v["symmetry"], "odd");
    assert_eq!(v["diagonal_segments"], 3);
    let table = std::fs::read_to_string(csv_path).unwrap();
    assert_eq!(table.lines().next(), Some("x1,y1,x2,y2,component_id"));
    assert_eq!(table.lines().count() as u64 - 1, v["segments"].as_u64().unwrap());
    assert!(std::fs::read_to_string(svg).unwrap().contains("<path"));
}

#[test]
fn overlay_render() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.svg");
    let o = atlas(&["similarity", "--matrix", "1,0,2,1", "--r", "1", "--render", out.to_str().unwrap(), "--qmax", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(out).unwrap();
    assert!(svg.contains("<g id=\"image\""));
}
