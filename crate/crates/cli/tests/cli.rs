use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn degtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degtree")).args(args).output().expect("binary runs")
}

/// A fresh scratch directory per test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("degtree-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &PathBuf, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

const K3: &str = "p dmst 3 3 bounded 0\ne 1 2\ne 2 3\ne 1 3\nd 1 1 2\nd 2 1 2\nd 3 1 2\n";
const K3_TD: &str = "s td 1 3 3\nb 1 1 2 3\n";

#[test]
fn oracle_and_tw_solve_a_triangle() {
    let dir = scratch("k3");
    let inst = write(&dir, "k3.dmst", K3);
    let td = write(&dir, "k3.td", K3_TD);
    let out = degtree(&["solve", &inst, "--engine", "oracle"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["answer"], "yes");
    let out = degtree(&["solve", &inst, "--engine", "tw", "--decomp", &td, "--seed", "3", "--reps", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["answer"], "yes");
    assert_eq!(report["seed"], 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed: 3"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = scratch("usage");
    let inst = write(&dir, "k3.dmst", K3);
    let out = degtree(&["solve", &inst, "--engine", "pw"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--decomp"));

    let bad = write(&dir, "bad.dmst", "p dmst 2 1 bounded 0\ne 1 3\n");
    let out = degtree(&["solve", &bad, "--engine", "oracle"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    assert_eq!(degtree(&["solve", &inst, "--engine", "magic"]).status.code(), Some(1));
    assert_eq!(degtree(&["gen", "grid", "--n", "4", "--out", "x"]).status.code(), Some(1));
}

#[test]
fn nlc_refuses_weighted_instances() {
    let dir = scratch("nlc");
    let inst = write(&dir, "w.dmst", "p dmst 2 1 bounded 1\ne 1 2 4\nd 1 1 1\nd 2 1 1\nb 4\n");
    let nlc = write(&dir, "w.nlc", "s nlc 1 3\nn 1 leaf 1\nn 2 leaf 1\nn 3 join 1 2 a{ 1,1 } b{ 1:1 }\nr 3\n");
    let out = degtree(&["solve", &inst, "--engine", "nlc", "--nlc", &nlc]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nlc is unweighted-only"));
}

#[test]
fn generated_files_validate_and_solve() {
    let dir = scratch("gen");
    let prefix = dir.join("pkt").display().to_string();
    let out = degtree(&["gen", "random-pkt", "--n", "9", "--k", "2", "--path", "--degrees", "specified", "--seed", "4", "--out", &prefix]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["width"], 2);
    let (inst, td) = (format!("{prefix}.dmst"), format!("{prefix}.td"));
    let out = degtree(&["validate", &inst, "--decomp", &td, "--arrangement", &format!("{prefix}.arr")]);
    assert_eq!(json(&out)["valid"], true);
    let oracle = json(&degtree(&["solve", &inst, "--engine", "oracle"]));
    let pw = json(&degtree(&["solve", &inst, "--engine", "pw", "--decomp", &td, "--seed", "1"]));
    assert_eq!(pw["answer"], oracle["answer"]);

    let converted = dir.join("arr.td").display().to_string();
    let out = degtree(&["convert", &inst, "--arrangement", &format!("{prefix}.arr"), "--to", "td", "-o", &converted]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&degtree(&["validate", &inst, "--decomp", &converted]))["valid"], true);
}

#[test]
fn difftest_and_bench_report() {
    let out = degtree(&["difftest", "--seed", "2", "--cases", "15", "--n-max", "6", "--reps", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["hard_fails"], 0);
    let out = degtree(&["bench", "--n", "10", "--widths", "1,2", "--engines", "tw,pw", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("instance,engine,width,r,max_index_family,cells,ms"));
    assert_eq!(lines.count(), 4);
}
