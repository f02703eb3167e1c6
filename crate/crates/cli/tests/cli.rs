use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn quasirand(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasirand"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn quasirand")
}

fn ok_json(dir: &Path, args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = quasirand(dir, &full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json stdout")
}

fn write_bipartite(dir: &Path) {
    let out = quasirand(
        dir,
        &["gen", "--kind", "complete-bipartite", "--n", "16", "--out", "kb.txt", "--plant-out", "side.txt"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn gen_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let args = |name: &'static str| ["--seed", "4", "gen", "--n", "30", "--p", "0.3", "--out", name];
    quasirand(dir.path(), &args("a.txt"));
    quasirand(dir.path(), &args("b.txt"));
    let a = fs::read_to_string(dir.path().join("a.txt")).unwrap();
    assert_eq!(a, fs::read_to_string(dir.path().join("b.txt")).unwrap());
    assert!(a.starts_with("30 "));
}

#[test]
fn count_triangles_in_bipartite_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    write_bipartite(dir.path());
    let v = ok_json(dir.path(), &["count", "--pattern", "K3", "--graph", "kb.txt"]);
    assert_eq!(v["count"], 0);
    // K2 homs are ordered edges: 2 * 8 * 8.
    let v = ok_json(dir.path(), &["count", "--pattern", "K2", "--graph", "kb.txt"]);
    assert_eq!(v["count"], 128);
    let v = ok_json(
        dir.path(),
        &["count", "--pattern", "K2", "--graph", "kb.txt", "--set", "side.txt", "--set", "side.txt"],
    );
    assert_eq!(v["count"], 0);
}

#[test]
fn report_lists_every_property() {
    let dir = tempfile::tempdir().unwrap();
    write_bipartite(dir.path());
    let v = ok_json(dir.path(), &["report", "--graph", "kb.txt", "--p", "0.5", "--trials", "50"]);
    assert_eq!(v.as_array().unwrap().len(), 7);
}

#[test]
fn reduce_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_bipartite(d);

    let v = ok_json(d, &["reduce", "power-sum", "--a", "0,0,0", "--b", "1,1,1", "--r", "2"]);
    assert_eq!((v["lhs"].as_str(), v["rhs"].as_str()), (Some("9"), Some("9")));

    let v = ok_json(d, &["reduce", "degree-power", "--graph", "kb.txt", "--r", "3"]);
    assert_eq!(v["total"], "0");

    let sets = ["--set", "side.txt", "--set", "side.txt", "--set", "side.txt"];
    let mut args = vec!["reduce", "overlap-split", "--pattern", "P3", "--graph", "kb.txt", "--i", "0", "--j", "2"];
    args.extend(sets);
    let v = ok_json(d, &args);
    assert_eq!(v["sum"], v["original"]);

    let v = ok_json(d, &["--seed", "1", "reduce", "amplify", "--graph", "kb.txt", "--set", "side.txt", "--q", "0.5"]);
    assert!(v["retries"].as_u64().unwrap() <= 10);
    assert_eq!(v["d"], 14.0);

    let v = ok_json(d, &["reduce", "main-lemma", "--pattern", "K3", "--graph", "kb.txt", "--p", "0.5", "--delta", "0.1"]);
    assert_eq!(v["total"], 0);
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = quasirand(dir.path(), &["count", "--pattern", "K3", "--graph", "missing.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.txt"));
}

#[test]
fn experiment_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    fs::write(d.join("missing.toml"), "experiment = \"cgw_suite\"\npattern = \"K3\"\n[generator]\nkind = \"complete\"\nn = 6\n").unwrap();
    let out = quasirand(d, &["experiment", "missing.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p_ref"));

    let good = "experiment = \"main_lemma\"\npattern = \"K3\"\np_ref = 0.5\n[generator]\nkind = \"complete\"\nn = 8\n";
    fs::write(d.join("good.toml"), good).unwrap();
    let out = quasirand(d, &["experiment", "good.toml", "--dry-run"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!d.join("out").exists());
    let out = quasirand(d, &["--output-dir", "res", "experiment", "good.toml"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(d.join("res/main_lemma.csv")).unwrap();
    assert!(csv.lines().any(|l| l.contains("degree_power_total,0.0")), "{csv}");

    // Zero discrepancy cannot be amplified: the row fails but output is still written.
    let failing = "experiment = \"amplification\"\npattern = \"K2\"\np_ref = 0.0\n[generator]\nkind = \"empty\"\nn = 16\n";
    fs::write(d.join("fail.toml"), failing).unwrap();
    let out = quasirand(d, &["experiment", "fail.toml"]);
    assert_eq!(out.status.code(), Some(3));
    let csv = fs::read_to_string(d.join("out/amplification.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains(",error,"));
}
