use std::path::Path;
use std::process::{Command, Output};

fn lcoarea(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcoarea"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const CHAIN3: &str = r#"{"points":[{"id":"a","coords":[0,0]},{"id":"b","coords":[1,0]},{"id":"c","coords":[2,0]}],
  "relations":{"mode":"from_coords_minkowski"},"tau":{"mode":"from_coords"}}"#;

#[test]
fn check_axioms_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", CHAIN3);
    let out = lcoarea(&["check-axioms", &good]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));

    // tau fails the reverse triangle inequality along a -> b -> c
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"points":[{"id":"a"},{"id":"b"},{"id":"c"}],
           "metric":{"pairs":[["a","b",1],["b","c",1],["a","c",2]]},
           "relations":{"mode":"explicit","le":[["a","b"],["b","c"]],"ll":[["a","b"],["b","c"],["a","c"]]},
           "tau":{"mode":"explicit","pairs":[["a","b",1],["b","c",1],["a","c",1]]}}"#,
    );
    let out = lcoarea(&["check-axioms", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["axiom"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"reverse_triangle"), "{failed:?}");
}

#[test]
fn measure_chain_exact() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(dir.path(), "c.json", CHAIN3);
    let out = lcoarea(&["measure", &space, "--s", "1", "--delta", "3,1.5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    // delta = 3: J(a, c) alone; delta = 1.5: J(a, b) and J(b, c)
    assert_eq!(v["estimate"]["values"], serde_json::json!([2.0, 2.0]));
    assert_eq!(v["cover"]["cost"], 2.0);
    assert_eq!(v["cover"]["certificate"], "exact");
}

#[test]
fn measure_reports_infeasible_scale_as_inf() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(dir.path(), "c.json", CHAIN3);
    let out = lcoarea(&["measure", &space, "--s", "1", "--delta", "0.5"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["cover"]["cost"], "inf");
}

#[test]
fn measure_over_size_limit_fails_with_hint() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("s.json");
    let out = lcoarea(&["sprinkle", "--dim", "2", "--intensity", "60", "--seed", "1", "--out", set.to_str().unwrap()]);
    assert!(out.status.success());
    let out = lcoarea(&["measure", set.to_str().unwrap(), "--s", "2", "--delta", "0.5"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("greedy"));
    let out = lcoarea(&["measure", set.to_str().unwrap(), "--s", "2", "--delta", "0.5", "--method", "greedy"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["cover"]["certificate"], "greedy");
}

#[test]
fn measure_minkowski_unit_diamond() {
    let out = lcoarea(&["measure-minkowski", "--tau", "1", "--schedule", "0.5,0.1,0.02"]);
    assert!(out.status.success());
    let v = json(&out);
    for x in v["estimate"]["values"].as_array().unwrap() {
        assert!((x.as_f64().unwrap() - 0.5).abs() <= 1e-12);
    }
    assert_eq!(v["expected"], 0.5);
}

#[test]
fn integrate_indicator() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(dir.path(), "c.json", CHAIN3);
    let f = write(dir.path(), "f.json", r#"{"a":1,"b":1,"c":1}"#);
    let out = lcoarea(&["integrate", &space, "--f", &f, "--s", "1", "--delta", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!((json(&out)["value"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn coarea_writes_report_and_csv_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "x.json",
        r#"{"points":[{"id":"a","coords":[0,0]},{"id":"b","coords":[0,0.5]},{"id":"c","coords":[1,0]},{"id":"d","coords":[1,0.5]}],
           "relations":{"mode":"from_coords_minkowski"},"tau":{"mode":"from_coords"}}"#,
    );
    write(
        dir.path(),
        "y.json",
        r#"{"points":[{"id":"y0","coords":[0,0]},{"id":"y1","coords":[1,0]}],
           "relations":{"mode":"from_coords_minkowski"},"tau":{"mode":"from_coords"}}"#,
    );
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"x":{"path":"x.json"},"y":{"path":"y.json"},
           "map":{"table":{"a":"y0","b":"y0","c":"y1","d":"y1"}},
           "s":1,"t":1,"delta":3,"delta0":3}"#,
    );
    let r1 = dir.path().join("r1.json");
    let r2 = dir.path().join("r2.json");
    let csv = dir.path().join("r.csv");
    let out = lcoarea(&["coarea", &cfg, "--out", r1.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = lcoarea(&["coarea", &cfg, "--out", r2.to_str().unwrap()]);
    assert!(out.status.success());
    let a = std::fs::read(&r1).unwrap();
    assert_eq!(a, std::fs::read(&r2).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["fibers"]["y0"], 2.0);
    let csv = std::fs::read_to_string(csv).unwrap();
    assert!(csv.starts_with("quantity,s,t,delta,value\n"));
}

#[test]
fn coarea_rejects_non_preserving_map() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "x.json", CHAIN3);
    write(
        dir.path(),
        "y.json",
        r#"{"points":[{"id":"u","coords":[0,0]},{"id":"v","coords":[0,1]}],
           "relations":{"mode":"from_coords_minkowski"},"tau":{"mode":"from_coords"}}"#,
    );
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"x":{"path":"x.json"},"y":{"path":"y.json"},"map":{"table":{"a":"u","b":"v","c":"v"}},
           "s":1,"t":0,"delta":3}"#,
    );
    let out = lcoarea(&["coarea", &cfg, "--out", dir.path().join("r.json").to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("causality preserving"));
}

#[test]
fn covering_demo_passes_and_splits_streams() {
    let out = lcoarea(&["covering-demo", "--seed", "4", "--n", "20", "--ecc-max", "3", "--samples", "2000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(!v["certificate"]["selected"].as_array().unwrap().is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("passed"));
}

#[test]
fn sprinkle_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = lcoarea(&["sprinkle", "--dim", "3", "--intensity", "40", "--seed", "9", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let out = lcoarea(&["check-axioms", a.to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn random_suite_and_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("suite.json");
    let out = Command::new(env!("CARGO_BIN_EXE_lcoarea"))
        .args(["random-suite", "--count", "8", "--out", out_path.to_str().unwrap()])
        .env("LCOAREA_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&std::fs::read(&out_path).unwrap()).unwrap();
    let seeds: Vec<u64> = rows.as_array().unwrap().iter().map(|r| r["seed"].as_u64().unwrap()).collect();
    assert_eq!(seeds, (0..8).collect::<Vec<_>>());
    assert!(out_path.with_extension("csv").exists());

    let out = Command::new(env!("CARGO_BIN_EXE_lcoarea"))
        .args(["random-suite", "--count", "1"])
        .env("LCOAREA_THREADS", "zero")
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn density_reports_fraction() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("s.json");
    lcoarea(&["sprinkle", "--dim", "2", "--intensity", "25", "--seed", "2", "--out", set.to_str().unwrap()]);
    let out = lcoarea(&["density", set.to_str().unwrap(), "--s", "2", "--epsilon", "0.5", "--samples", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let f = json(&out)["fraction"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&f));
}
