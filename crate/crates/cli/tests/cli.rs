use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use isingkw_cli::mapfile::{parse_map, serialize_map};
use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isingkw")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = run(&all);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn method_texts(v: &Value) -> Vec<(String, String)> {
    v["methods"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| (m["method"].as_str().unwrap().to_string(), m["value"]["text"].as_str().or(m["value"]["value"].as_str()).unwrap().to_string()))
        .collect()
}

#[test]
fn torus_figure_eight_partition_all_methods() {
    let f = corpus("fig8-torus.map");
    let v = json(&["partition", f.to_str().unwrap()]);
    let methods = method_texts(&v);
    assert_eq!(methods.len(), 3);
    for (_, text) in &methods {
        assert_eq!(text, "1 + x1 + x2 + x1*x2");
    }
    assert_eq!(v["graph"]["genus"], 1);
}

#[test]
fn torus_figure_eight_spin_classes() {
    let f = corpus("fig8-torus.map");
    let v = json(&["spins", f.to_str().unwrap()]);
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 4);
    let odd: Vec<&Value> = classes.iter().filter(|c| c["arf"] == 1).collect();
    assert_eq!(odd.len(), 1);
    assert_eq!(odd[0]["form"], serde_json::json!([1, 1]));
    assert_eq!(odd[0]["det_sqrt"]["text"], "1 - x1 - x2 - x1*x2");
    assert!(classes.iter().all(|c| c["eps_m0"] == 1));
}

#[test]
fn tree_has_trivial_partition_function() {
    let f = corpus("tree.map");
    let v = json(&["partition", f.to_str().unwrap()]);
    for (_, text) in method_texts(&v) {
        assert_eq!(text, "1");
    }
}

#[test]
fn evaluation_is_deterministic_per_seed() {
    let f = corpus("k4.map");
    let a = run(&["--json", "partition", f.to_str().unwrap(), "--seed", "7"]);
    let b = run(&["--json", "partition", f.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let methods = method_texts(&v);
    assert!(methods.windows(2).all(|w| w[0].1 == w[1].1), "{methods:?}");
}

#[test]
fn explicit_evaluation_point() {
    let f = corpus("fig8-planar.map");
    let v = json(&["partition", f.to_str().unwrap(), "--eval", "x1=1/2,x2=1/3"]);
    for (_, text) in method_texts(&v) {
        assert_eq!(text, "2");
    }
}

#[test]
fn full_verification_of_the_corpus_passes() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let out = run(&["verify", dir.to_str().unwrap(), "--level", "full"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains(" 0 failed"), "{text}");
}

#[test]
fn verify_json_is_one_report_per_file() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let v = json(&["verify", dir.to_str().unwrap()]);
    let files = std::fs::read_dir(&dir).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "map")).count();
    assert_eq!(v.as_array().unwrap().len(), files);
}

#[test]
fn parse_errors_report_position_and_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.map");
    std::fs::write(&bad, "vertex a : h1 h2\nedge 1 : h1 h2\nbogus\n").unwrap();
    let out = run(&["partition", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3, column 1"), "{err}");
}

#[test]
fn bad_arguments_exit_2() {
    let f = corpus("fig8-torus.map");
    let f = f.to_str().unwrap();
    assert_eq!(run(&["partition", f, "--eval", "nope=1"]).status.code(), Some(2));
    assert_eq!(run(&["matrices", f, "--spin", "4"]).status.code(), Some(2));
    assert_eq!(run(&["partition", "/nonexistent/file.map"]).status.code(), Some(2));
}

#[test]
fn corpus_files_round_trip() {
    for entry in std::fs::read_dir(corpus("")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|x| x != "map") {
            continue;
        }
        let first = parse_map(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let text = serialize_map(&first);
        let second = parse_map(&text).unwrap_or_else(|e| panic!("{}: {e}\n{text}", path.display()));
        assert_eq!(serialize_map(&second), text, "{}", path.display());
        assert_eq!(first.map.n_edges(), second.map.n_edges());
        assert_eq!(first.map.genus(), second.map.genus());
    }
}

#[test]
fn planar_figure_eight_prime_paths() {
    let f = corpus("fig8-planar.map");
    let v = json(&["zeta", f.to_str().unwrap(), "--max-len", "2"]);
    let paths: Vec<&str> = v["paths"].as_array().unwrap().iter().map(|p| p["path"].as_str().unwrap()).collect();
    assert_eq!(paths, ["e1", "e2", "e1 e2", "e1 -e2"]);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}

#[test]
fn matrices_have_expected_shapes() {
    let f = corpus("fig8-planar.map");
    let v = json(&["matrices", f.to_str().unwrap(), "--spin", "0"]);
    let m = &v["matrices"];
    assert_eq!(m["kac_ward"].as_array().unwrap().len(), 4);
    assert_eq!(m["kasteleyn_size"], 16);
    let k = m["kasteleyn"].as_array().unwrap();
    for i in 0..16 {
        for j in 0..16 {
            let a = k[i][j].as_str().unwrap();
            let b = k[j][i].as_str().unwrap();
            if a == "0" {
                assert_eq!(b, "0");
            } else {
                assert!(b == format!("-{a}") || a == format!("-{b}"), "{a} vs {b}");
            }
        }
    }
}

#[test]
fn small_torus_bench_matches_brute_force() {
    let v = json(&["bench", "--torus", "4"]);
    let b = &v["bench"];
    assert_eq!(b["ising_vertices"], 16);
    assert!(b["relative_error"].as_f64().unwrap() <= 1e-12);
}
