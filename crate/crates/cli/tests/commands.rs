use std::fs;
use std::process::{Command, Output};

use systole_cli::cache::CacheEntry;
use systole_cli::CensusRecord;

fn systole(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_systole"))
        .args(args)
        .env_remove("SYSTOLE_FORMAT")
        .env_remove("SYSTOLE_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn census_csv_has_fixed_columns() {
    let o = systole(&["census", "--n-min", "3", "--n-max", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "N,squarefree,index,genus,cusps,h,systole_count,total_int,cr_bound,\
         log_systole_ratio,log_crossing_ratio,log_index_ratio"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 8);
    assert!(rows[4].starts_with("7,false,336,3,24,"));
}

#[test]
fn census_json_record() {
    let o = systole(&["census", "--n-max", "9", "--format", "json", "--include-matrices", "--seed", "5"]);
    assert!(o.status.success());
    let rec: CensusRecord = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rec.schema_version, "1.0");
    assert!(rec.generated_at.is_some());
    assert_eq!(rec.parameters.seed, Some(5));
    assert_eq!(rec.rows.len(), 7);
    assert_eq!(rec.matrices.as_ref().unwrap().len(), 7);
    rec.check_consistency().unwrap();
}

#[test]
fn warm_cache_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = [
        "census", "--n-min", "5", "--n-max", "14", "--squarefree-only", "--format", "json",
        "--no-timestamp", "--cache-dir", cache.to_str().unwrap(),
    ];
    let cold = systole(&args);
    let warm = systole(&args);
    assert!(cold.status.success() && warm.status.success());
    assert_eq!(cold.stdout, warm.stdout);
    let entry: CacheEntry =
        serde_json::from_str(&fs::read_to_string(cache.join("5.json")).unwrap()).unwrap();
    assert!(entry.is_current(5));
}

#[test]
fn stale_cache_entries_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    assert!(systole(&["intersections", "5", "--cache-dir", cache]).status.success());
    let path = dir.path().join("5.json");
    let mut entry: CacheEntry = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    entry.algorithm_version = "obsolete".into();
    entry.matrix.entries[0][0] = 999;
    fs::write(&path, serde_json::to_string(&entry).unwrap()).unwrap();

    let o = systole(&["intersections", "5", "--cache-dir", cache, "--format", "json"]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("999"));
    let fresh: CacheEntry = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(fresh.is_current(5));
}

#[test]
fn intersections_formats() {
    let o = systole(&["intersections", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("h = 1"));
    let o = systole(&["intersections", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["squarefree"], false);
    assert_eq!(v["entries"], serde_json::json!([[3, 6], [6, 3]]));
    assert!(v["certificate"]["doubling_passes"].as_u64().unwrap() >= 2);
}

#[test]
fn verify_kinds() {
    for args in [
        vec!["verify", "index"],
        vec!["verify", "genus", "--n-max", "15"],
        vec!["verify", "cnf", "--n-max", "30"],
        vec!["verify", "lemma4", "--n-max", "8"],
        vec!["verify", "prop2", "--n-max", "25"],
    ] {
        let o = systole(&args);
        assert!(o.status.success(), "{args:?}: {}", stdout(&o));
        assert!(stdout(&o).contains("0 failed"));
    }
    let o = systole(&["verify", "cnf", "--n-max", "12", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["items"][1]["status"], "skipped");
}

#[test]
fn small_commands() {
    let o = systole(&["class-number", "60", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["class_number"], 4);

    let o = systole(&["l-value", "5", "--tol", "1e-4"]);
    assert!(stdout(&o).starts_with("L(chi_5, 1) = 0.4304"));

    let o = systole(&["lower-bound", "2", "3"]);
    assert!(stdout(&o).contains(">= 0"));

    let o = systole(&["subfamily", "-k", "3", "--size", "9", "--seed", "11", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["subfamily"]["indices"].as_array().unwrap().len(), 3);
    assert_eq!(v["subfamily"]["seed"], 11);
}

#[test]
fn subfamily_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    fs::write(&path, r#"{"entries": [[0,1,2],[1,0,3],[2,3,0]], "genus": null}"#).unwrap();
    let o = systole(&["subfamily", "--matrix", path.to_str().unwrap(), "-k", "2", "--format", "csv"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("3,2,6,"));
}

#[test]
fn deterministic_seeded_output() {
    let a = systole(&["subfamily", "-k", "5", "--size", "11", "--seed", "42"]);
    let b = systole(&["subfamily", "-k", "5", "--size", "11", "--seed", "42"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(systole(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(systole(&["census", "--n-min", "2"]).status.code(), Some(2));
    assert_eq!(systole(&["lower-bound", "1", "5"]).status.code(), Some(2));
    let o = systole(&["census", "--n-min", "20", "--n-max", "21", "--max-candidates", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = systole(&["intersections", "30", "--max-candidates", "10"]);
    assert_eq!(o.status.code(), Some(3));
    let o = systole(&["census", "--n-max", "5", "--output", "/nonexistent/dir/t.csv"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/dir/t.csv"));
}

#[test]
fn flags_override_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_systole"))
        .args(["census", "--n-max", "6"])
        .env("SYSTOLE_N_MIN", "5")
        .env("SYSTOLE_N_MAX", "9")
        .env("SYSTOLE_FORMAT", "csv")
        .output()
        .unwrap();
    let text = stdout(&o);
    let ns: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, ["5", "6"]);
}
