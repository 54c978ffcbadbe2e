use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

fn prbox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prbox"))
        .args(args)
        .output()
        .expect("run prbox")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("UTF-8 stdout")
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../schemas")
        .join(format!("{name}.schema.json"))
}

/// Parses stdout as JSON and validates it against the shipped schema.
fn validated(out: &Output, schema: &str) -> Value {
    let value: Value = serde_json::from_str(&stdout(out)).expect("JSON stdout");
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path(schema)).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("valid schema");
    let errors: Vec<String> = validator
        .iter_errors(&value)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "schema errors: {errors:?}\n{value:#}");
    value
}

fn write_file(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn pr_file(dir: &TempDir) -> String {
    let out = prbox(&["pr", "show", "--format", "text"]);
    assert!(out.status.success());
    write_file(dir, "pr.txt", &stdout(&out))
}

#[test]
fn chsh_of_serialized_pr_box_prints_four() {
    let dir = TempDir::new().unwrap();
    let pr = pr_file(&dir);
    let out = prbox(&["chsh", &pr, "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "4\n");
    let out = prbox(&["chsh", &pr]);
    assert_eq!(validated(&out, "chsh")["chsh"], "4/1");
}

#[test]
fn behavior_from_stdin() {
    let text = stdout(&prbox(&["pr", "show", "--format", "text"]));
    let mut child = Command::new(env!("CARGO_BIN_EXE_prbox"))
        .args(["chsh", "-", "--format", "text"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(text.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(stdout(&out), "4\n");
}

#[test]
fn ot_returns_chosen_bit() {
    let out = prbox(&["ot", "--x0", "0", "--x1", "1", "--c", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = validated(&out, "ot");
    assert_eq!(v["output"], 0);
    assert_eq!(v["bits_communicated"], 1);
    for seed in ["0", "1", "2", "3"] {
        let out = prbox(&["ot", "--x0", "0", "--x1", "1", "--c", "1", "--seed", seed]);
        assert_eq!(validated(&out, "ot")["output"], 1);
    }
}

#[test]
fn clone_composite_fails_ns_check_with_exit_3() {
    let dir = TempDir::new().unwrap();
    let out = prbox(&["clone-signalling"]);
    assert_eq!(out.status.code(), Some(0));
    let v = validated(&out, "clone-signalling");
    assert_eq!(v["no_signalling"], false);
    assert_eq!(v["bob_pair_decodes_x"], true);

    let text = prbox_core::format::serialize(&prbox_core::cloning::perfect_clone_composite());
    let file = write_file(&dir, "clone.txt", &text);
    let out = prbox(&["ns-check", &file]);
    assert_eq!(out.status.code(), Some(3));
    let v = validated(&out, "ns-check");
    let violations = v["violations"].as_array().unwrap();
    assert!(violations
        .iter()
        .any(|x| x["parties"] == serde_json::json!([1, 2])));
}

#[test]
fn ns_check_accepts_pr_box() {
    let dir = TempDir::new().unwrap();
    let out = prbox(&["ns-check", &pr_file(&dir)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(validated(&out, "ns-check")["no_signalling"], true);
}

#[test]
fn local_and_isotropic_certificates() {
    let dir = TempDir::new().unwrap();
    let out = prbox(&["local", &pr_file(&dir)]);
    let v = validated(&out, "local");
    assert_eq!(v["local"], false);
    assert!(v["local_bound"].as_str().unwrap().ends_with("/1"));

    let out = prbox(&["isotropic", "--v", "1/2"]);
    let v = validated(&out, "isotropic");
    assert_eq!(v["chsh"], "2/1");
    assert_eq!(v["local"], true);
    let out = prbox(&["isotropic", "--v", "3/4"]);
    let v = validated(&out, "isotropic");
    assert_eq!(v["chsh"], "3/1");
    assert_eq!(v["local"], false);
}

#[test]
fn monogamy_reports_half() {
    for extra in [&[][..], &["--symmetric"][..]] {
        let mut args = vec!["monogamy"];
        args.extend_from_slice(extra);
        let out = prbox(&args);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(validated(&out, "monogamy")["V_star"], "1/2");
    }
}

#[test]
fn simulations_are_reproducible() {
    let args = [
        "sim-singlet",
        "--a",
        "1,0,0",
        "--b",
        "0.6,0,0.8",
        "--shots",
        "20000",
        "--seed",
        "9",
    ];
    let first = prbox(&args);
    let v = validated(&first, "sim-singlet");
    assert_eq!(stdout(&first), stdout(&prbox(&args)));
    assert!((v["mean_rArB"].as_f64().unwrap() + 0.6).abs() < 0.05);
    assert_eq!(v["seed"], 9);

    let other = prbox(&[
        "sim-singlet",
        "--a",
        "1,0,0",
        "--b",
        "0.6,0,0.8",
        "--shots",
        "20000",
        "--seed",
        "10",
    ]);
    assert_ne!(stdout(&first), stdout(&other));

    let args = ["sim-chsh", "--shots", "20000", "--seed", "4"];
    let out = prbox(&args);
    let v = validated(&out, "sim-chsh");
    assert_eq!(stdout(&out), stdout(&prbox(&args)));
    assert!((v["chsh"].as_f64().unwrap() - 8f64.sqrt()).abs() < 0.1);
}

#[test]
fn ghz_table_and_parity() {
    for table in 0..8 {
        for (x, y, z) in [(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1)] {
            let (x, y, z, t) = (
                x.to_string(),
                y.to_string(),
                z.to_string(),
                table.to_string(),
            );
            let out = prbox(&["ghz", "--x", &x, "--y", &y, "--z", &z, "--table", &t]);
            let v = validated(&out, "ghz");
            assert_eq!(v["parity"], v["required_parity"]);
            assert_eq!(v["lhv_satisfying_count"], 0);
        }
    }
    assert_eq!(
        prbox(&["ghz", "--x", "0", "--y", "0", "--z", "0", "--table", "8"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn ipcc_hex_and_binary() {
    let out = prbox(&["ipcc", "--xs", "0xff", "--ys", "0x0f"]);
    let v = validated(&out, "ipcc");
    assert_eq!(v["f"], 0);
    assert_eq!(v["bits_communicated"], 1);
    let out = prbox(&["ipcc", "--xs", "111", "--ys", "101", "--format", "text"]);
    assert_eq!(stdout(&out), "0\n");
    let out = prbox(&["ipcc", "--xs", "110", "--ys", "101", "--format", "text"]);
    assert_eq!(stdout(&out), "1\n");
}

#[test]
fn search_corr3_report() {
    let out = prbox(&["search-corr3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = validated(&out, "search-corr3");
    assert_eq!(v["total_strategies"], 1_000_000);
    assert_eq!(v["perfect_count"], 0);
    assert_eq!(v["witness"], Value::Null);
    assert_eq!(v["lhv_satisfying_count"], 0);
}

#[test]
fn pr_show_json() {
    let v = validated(&prbox(&["pr", "show"]), "pr-show");
    assert_eq!(v["chsh"], "4/1");
    assert_eq!(v["behavior"]["entries"].as_array().unwrap().len(), 8);
}

#[test]
fn csv_output_has_header_and_row() {
    let out = prbox(&[
        "ot", "--x0", "1", "--x1", "0", "--c", "0", "--format", "csv",
    ]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let header: Vec<&str> = lines[0].split(',').collect();
    let row: Vec<&str> = lines[1].split(',').collect();
    let output = header.iter().position(|h| *h == "output").unwrap();
    assert_eq!(row[output], "1");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    // Usage errors.
    assert_eq!(prbox(&["--bogus"]).status.code(), Some(64));
    assert_eq!(prbox(&["chsh"]).status.code(), Some(64));
    assert_eq!(prbox(&["sim-chsh", "--shots", "0"]).status.code(), Some(64));
    assert_eq!(prbox(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(prbox(&["--help"]).status.code(), Some(0));
    assert_eq!(prbox(&["--version"]).status.code(), Some(0));
    // Domain errors.
    assert_eq!(prbox(&["isotropic", "--v", "3/2"]).status.code(), Some(1));
    assert_eq!(prbox(&["isotropic", "--v", "0.5"]).status.code(), Some(1));
    assert_eq!(
        prbox(&["ot", "--x0", "2", "--x1", "0", "--c", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        prbox(&["ipcc", "--xs", "101", "--ys", "10"]).status.code(),
        Some(1)
    );
    assert_eq!(
        prbox(&["sim-singlet", "--a", "1,1,0", "--b", "0,0,1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        prbox(&[
            "sim-singlet",
            "--a",
            "1,1,0",
            "--b",
            "0,0,1",
            "--norm-tolerance",
            "1"
        ])
        .status
        .code(),
        Some(0)
    );
    let missing = dir.path().join("missing.txt");
    assert_eq!(
        prbox(&["chsh", missing.to_str().unwrap()]).status.code(),
        Some(1)
    );
    let bad = write_file(
        &dir,
        "bad.txt",
        "scenario: n=2 inputs=2,2 outputs=2,2\n0,0 | 0,0 : 1/2\n",
    );
    let out = prbox(&["chsh", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    // Capacity: a scenario with too many deterministic strategies.
    let mut big = String::from("scenario: n=2 inputs=12,12 outputs=2,2\n");
    for x in 0..12 {
        for y in 0..12 {
            big.push_str(&format!("{x},{y} | 0,0 : 1/1\n"));
        }
    }
    let big = write_file(&dir, "big.txt", &big);
    assert_eq!(prbox(&["local", &big]).status.code(), Some(2));
}
