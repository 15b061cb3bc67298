use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use simplicial_metric::extension::ExtendedMetric;
use simplicial_metric::generators;
use simplicial_metric::io::{complex_to_json, point_from_json, read_complex};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_metric-ext"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("metric-ext-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, text: &str) -> PathBuf {
    let path = scratch(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

const PATH3: &str = r#"{"vertices":["u","v","w"],"maximal_simplices":[["u","v"],["v","w"]]}"#;

#[test]
fn validate_exit_codes() {
    let good = write("good.json", PATH3);
    assert_eq!(code(&run(&["validate", "-c", good.to_str().unwrap()])), 0);

    let split = write("split.json", r#"{"vertices":["a","b","c"],"maximal_simplices":[["a","b"],["c"]]}"#);
    let out = run(&["validate", "-c", split.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("disconnected"));

    let metric = write("bad-metric.json", r#"{"type":"explicit","order":["u","v","w"],"matrix":[[0,1,3],[1,0,1],[3,1,0]]}"#);
    let out = run(&["validate", "-c", good.to_str().unwrap(), "-m", metric.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&run(&["no-such-command"])), 64);
    assert_eq!(code(&run(&["dist", "-x", "{}"])), 64);
    let good = write("usage.json", PATH3);
    assert_eq!(code(&run(&["check", "-c", good.to_str().unwrap(), "--suite", "nope"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn dist_matches_library() {
    let path = write("dist.json", PATH3);
    let x = r#"{"u":0.5,"v":0.5}"#;
    let y = r#"{"w":1}"#;
    let out = run(&["--json", "dist", "-c", path.to_str().unwrap(), "-m", "word", "--kind", "extended", "-x", x, "-y", y]);
    assert_eq!(code(&out), 0);
    let v = json(&out);

    let k = read_complex(&path).unwrap();
    let ext = ExtendedMetric::word(&k).unwrap();
    let d = ext.distance(&point_from_json(&k, x).unwrap(), &point_from_json(&k, y).unwrap()).unwrap();
    assert_eq!(v["value"].as_f64().unwrap(), d.value);
    assert_eq!(v["branch"], d.branch.name());
    assert_eq!(v["witness"]["points"].as_array().unwrap().first().unwrap()["u"], 0.5);

    for (kind, expect) in [("bilinear", 1.5), ("l1path", 1.5)] {
        let out = run(&["--json", "dist", "-c", path.to_str().unwrap(), "--kind", kind, "-x", x, "-y", y]);
        assert_eq!(json(&out)["value"].as_f64().unwrap(), expect, "{kind}");
    }
    let out = run(&["dist", "-c", path.to_str().unwrap(), "--kind", "vertex", "-x", x, "-y", y]);
    assert_eq!(code(&out), 64);
}

#[test]
fn dd_and_gp() {
    let path = write("dd.json", PATH3);
    let p = path.to_str().unwrap();
    let out = run(&["--json", "dd", "-c", p, "--x", r#"{"u":1}"#, "--x2", r#"{"u":1}"#, "--y", r#"{"w":1}"#, "--y2", r#"{"v":1}"#]);
    assert_eq!(json(&out)["double_difference"].as_f64().unwrap(), 0.0);
    let out = run(&["--json", "gp", "-c", p, "-a", r#"{"u":1}"#, "-b", r#"{"w":1}"#, "--at", r#"{"v":1}"#]);
    assert_eq!(json(&out)["gromov_product"].as_f64().unwrap(), 0.0);
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let a = run(&["--seed", "11", "gen", "random", "--vertices", "12", "--density", "0.3"]);
    let b = run(&["--seed", "11", "gen", "random", "--vertices", "12", "--density", "0.3"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let path = write("gen.json", &String::from_utf8(a.stdout).unwrap());
    let k = read_complex(&path).unwrap();
    assert_eq!(k, generators::random(12, 0.3, 11, generators::DEFAULT_MAX_DIM).unwrap());

    let out = run(&["gen", "spec", r#"{"kind":"tree","branching":2,"depth":3}"#]);
    let tree = write("tree.json", &String::from_utf8(out.stdout).unwrap());
    assert_eq!(read_complex(&tree).unwrap().vertex_count(), 15);

    let rips = scratch("rips.json");
    let c6 = write("c6.json", &complex_to_json(&generators::cycle(6).unwrap()));
    let out = run(&["gen", "rips-graph", "--from", c6.to_str().unwrap(), "--radius", "2", "-o", rips.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(read_complex(&rips).unwrap().dimension(), 2);
}

#[test]
fn check_suites_pass_and_ignore_thread_count() {
    let path = write("check.json", &complex_to_json(&generators::cycle(5).unwrap()));
    let args = [
        "--json", "check", "-c", path.to_str().unwrap(), "--suite", "all", "--seed", "7",
        "--pairs", "20", "--triples", "20", "--tuples", "20",
    ];
    let one = bin().args(args).env("METRIC_EXT_THREADS", "1").output().unwrap();
    let many = bin().args(args).env("METRIC_EXT_THREADS", "4").output().unwrap();
    assert_eq!(code(&one), 0, "{}", String::from_utf8_lossy(&one.stdout));
    assert_eq!(one.stdout, many.stdout);
    let v = json(&one);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["suites"].as_array().unwrap().len(), 13);
}

#[test]
fn probes_report_verdicts() {
    let path = write("probe-tree.json", &complex_to_json(&generators::tree(2, 4).unwrap()));
    let p = path.to_str().unwrap();
    let out = run(&[
        "--json", "probe", "divergence", "-c", p,
        "--slot", "ray:v00:v30", "--slot", r#"{"v01":1}"#, "--slot", r#"{"v02":1}"#, "--slot", "ray:v00:v30",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["verdict"], "plus_divergent");

    let out = run(&["probe", "convergence", "-c", p, "--slot", "ray:v00:v30", "--slot", r#"{"v01":1}"#]);
    assert_eq!(code(&out), 64);

    let out = run(&["--json", "probe", "windows", "-c", p, "--samples", "40"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["beta"].as_f64(), Some(0.0));

    let out = run(&["--json", "probe", "decay", "-c", p, "--samples", "200"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn oracle_compare_agrees() {
    let path = write("oracle.json", &complex_to_json(&generators::simplex(2).unwrap()));
    let out = run(&["--json", "oracle-compare", "-c", path.to_str().unwrap(), "--pairs", "10", "--resolution", "8"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["summary"]["failures"], 0);
}
