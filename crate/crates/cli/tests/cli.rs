use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bianchi_cli::cache::{cache_path, load_or_compute};
use bianchi_cli::{parse_invocation, Command as Sub, Format, EXIT_BUDGET, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn bianchi(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bianchi"))
        .args(args)
        .env("CF_CACHE_DIR", cache)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn cert(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data/certs").join(name)
}

#[test]
fn parses_subcommands_and_globals() {
    let cli = parse_invocation(["bianchi", "psl-order", "--d", "7", "--ideal", "(1+s)/2"]).unwrap();
    match &cli.command {
        Sub::PslOrder(a) => assert_eq!((a.d, a.ideal.as_str()), (7, "(1+s)/2")),
        c => panic!("{:?}", c),
    }
    assert_eq!(cli.jobs, 1);
    assert_eq!(cli.format, Format::Text);

    let cli = parse_invocation(["bianchi", "survey", "--d", "2", "--jobs", "4", "--format", "json"]).unwrap();
    assert_eq!(cli.command, Sub::Survey { d: 2, max_norm: 10 });
    assert_eq!((cli.jobs, cli.format), (4, Format::Json));

    let cli = parse_invocation(["bianchi", "build", "--d", "31", "--ideal", "s", "--gamma1"]).unwrap();
    assert!(matches!(cli.command, Sub::Build(t) if t.gamma1 && t.ideal.d == 31));

    assert!(parse_invocation(["bianchi", "psl-order", "--d", "7"]).is_err());
    assert!(parse_invocation(["bianchi", "frobnicate"]).is_err());
}

#[test]
fn psl_order_prints_the_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = bianchi(&["psl-order", "--d", "7", "--ideal", "(1+s)/2"], dir.path());
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert_eq!(stdout(&o).trim(), "6");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bianchi(&["psl-order", "--bogus"], dir.path()).status.code(), Some(EXIT_USAGE));
    // unsupported d and unparseable ideals are input errors
    assert_eq!(bianchi(&["domain", "--d", "4"], dir.path()).status.code(), Some(EXIT_USAGE));
    assert_eq!(bianchi(&["psl-order", "--d", "1", "--ideal", "2+"], dir.path()).status.code(), Some(EXIT_USAGE));
}

#[test]
fn budget_exhaustion_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = bianchi(&["bi-order", "--d", "7", "--ideal", "3", "--triples", "3,0,3", "--budget", "50"], dir.path());
    assert_eq!(o.status.code(), Some(EXIT_BUDGET));
}

#[test]
fn verify_link_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let good = cert("d2_1ps2.json");
    let o = bianchi(&["verify-link", good.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert_eq!(stdout(&o).trim(), "4-Link");

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    v["expected_order"] = 24.into();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let o = bianchi(&["verify-link", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(EXIT_NEGATIVE));
    assert!(stdout(&o).starts_with("FAILED"), "{}", stdout(&o));
}

#[test]
fn json_reports_carry_schema_version() {
    let dir = tempfile::tempdir().unwrap();
    let o = bianchi(&["bi-order", "--d", "7", "--ideal", "3", "--triples", "3,0,3", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "bi-order");
    assert_eq!((v["bi_order"].as_u64(), v["psl_order"].as_u64()), (Some(1080), Some(360)));
}

#[test]
fn survey_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["survey", "--d", "1", "--max-norm", "5", "--format", "json", "--jobs", "3"];
    let a = bianchi(&args, dir.path());
    let b = bianchi(&args, dir.path());
    assert_eq!(a.status.code(), Some(EXIT_OK));
    assert_eq!(a.stdout, b.stdout, "repeated runs differ");

    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    let rows: Vec<(String, String)> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["ideal"].as_str().unwrap().to_string(), r["result"].as_str().unwrap().to_string()))
        .collect();
    for (ideal, result) in [("⟨1+i⟩", "Orbifold"), ("⟨2⟩", "6-Link"), ("⟨2+i⟩", "6-Link")] {
        assert!(rows.contains(&(ideal.to_string(), result.to_string())), "{} missing from {:?}", ideal, rows);
    }
    // ⟨2−i⟩ is folded into the ⟨2+i⟩ row
    assert!(!rows.iter().any(|(i, _)| i == "⟨2-i⟩"));

    let single = bianchi(&["survey", "--d", "1", "--max-norm", "5", "--format", "json"], dir.path());
    assert_eq!(single.stdout, a.stdout, "--jobs changes the output");
}

#[test]
fn domain_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let fresh = load_or_compute(1, Some(dir.path())).unwrap();
    let path = cache_path(dir.path(), 1, fresh.radius);
    assert!(path.exists());
    let cached = load_or_compute(1, Some(dir.path())).unwrap();
    assert_eq!(cached, fresh);
    // a corrupt file is recomputed rather than trusted
    std::fs::write(&path, "{").unwrap();
    assert_eq!(load_or_compute(1, Some(dir.path())).unwrap(), fresh);
}

#[test]
fn cache_env_overrides_flag() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = bianchi(&["domain", "--d", "1", "--cache-dir", flag_dir.path().to_str().unwrap()], env_dir.path());
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert!(std::fs::read_dir(env_dir.path()).unwrap().count() == 1);
    assert!(std::fs::read_dir(flag_dir.path()).unwrap().next().is_none());
}

#[test]
fn build_writes_triangulation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tri.json");
    let o = bianchi(&["build", "--d", "2", "--ideal", "1+s", "--format", "json", "--out", out.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((v["copies"].as_u64(), v["cusps"].as_u64()), (Some(12), Some(4)));
    assert_eq!(v["orbifold"], false);
    assert!(std::fs::metadata(&out).unwrap().len() > 0);

    let o = bianchi(&["homology", "--d", "2", "--ideal", "1+s", "--format", "json"], dir.path());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((v["h1"].as_str(), v["quotient"].as_str()), (Some("Z^4"), Some("0")));
}
