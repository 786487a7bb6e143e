//! End-to-end checks of the binary: worked examples, determinism, and
//! exit codes.

use std::process::Command;

fn brion() -> Command {
    Command::new(env!("CARGO_BIN_EXE_brion"))
}

fn write_file(dir: &std::path::Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn pentagon_sum_has_six_terms() {
    let dir = std::env::temp_dir().join("brion-cli-test-pentagon");
    std::fs::create_dir_all(&dir).unwrap();
    let file = write_file(
        &dir,
        "pentagon.json",
        r#"{ "dim": 2, "vertices": [["0","0"],["0","2"],["1","3"],["3","1"],["2","-1"]] }"#,
    );
    let out = brion()
        .args(["eval-sum", &file, "--xi", "re=[1,0]"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["terms"].as_array().unwrap().len(), 6);
    // Determinism: identical bytes on a rerun.
    let out2 = brion()
        .args(["eval-sum", &file, "--xi", "re=[1,0]"])
        .output()
        .unwrap();
    assert_eq!(out.stdout, out2.stdout);
}

#[test]
fn halfseg_ehrhart_values() {
    let dir = std::env::temp_dir().join("brion-cli-test-halfseg");
    std::fs::create_dir_all(&dir).unwrap();
    let file = write_file(
        &dir,
        "halfseg.json",
        r#"{ "dim": 1, "vertices": [["0"],["1/2"]] }"#,
    );
    let out = brion()
        .args(["ehrhart", &file, "--tmax", "8"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let values: Vec<&str> = v["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(values, vec!["1", "2", "2", "3", "3", "4", "4", "5"]);
}

#[test]
fn mu_ray_at_zero() {
    let dir = std::env::temp_dir().join("brion-cli-test-mu");
    std::fs::create_dir_all(&dir).unwrap();
    let file = write_file(
        &dir,
        "ray.json",
        r#"{ "dim": 1, "apex": ["0"], "rays": [["1"]] }"#,
    );
    let out = brion().args(["mu", &file, "--at-zero"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["mu"].as_str().unwrap(), "1/2");
}

#[test]
fn exit_codes() {
    let dir = std::env::temp_dir().join("brion-cli-test-exit");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = write_file(&dir, "bad.json", r#"{ "dim": 2 broken"#);
    let out = brion().args(["eval-sum", &bad]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let unbounded = write_file(
        &dir,
        "unbounded.json",
        r#"{ "dim": 2, "inequalities": [{"a": ["1","0"], "b": "1"}] }"#,
    );
    let out = brion().args(["eval-sum", &unbounded]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plot_written_for_planar_decomposition() {
    let dir = std::env::temp_dir().join("brion-cli-test-plot");
    std::fs::create_dir_all(&dir).unwrap();
    let file = write_file(
        &dir,
        "fig2.json",
        r#"{ "dim": 2, "vertices": [["0","0"],["0","3"],["2","1"]] }"#,
    );
    let svg = dir.join("fig2.svg");
    let out = brion()
        .args([
            "decompose",
            &file,
            "--xi",
            "re=[1,0]",
            "--plot",
            svg.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg"));
    // Dashed strokes mark the negative-coefficient Levi terms.
    assert!(svg_text.contains("stroke-dasharray"));
}
