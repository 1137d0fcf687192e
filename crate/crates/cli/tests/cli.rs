use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn qsr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsr")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn check_refutes_the_five_region_scenario() {
    let o = qsr(&["check", &fixture("gerevini_renz.qsr")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "INCONSISTENT");

    let o = qsr(&["check", &fixture("gerevini_renz_topology.qsr")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("FIXPOINT\n"));
    assert!(out.contains("rel topo 0 2 { TPP EQ }"), "{out}");
}

#[test]
fn check_reports_usage_errors() {
    let o = qsr(&["check", &fixture("no_objects.qsr")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"));

    let o = qsr(&["check", &fixture("bad_relation.qsr")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3") && stderr(&o).contains("XX"), "{}", stderr(&o));

    let o = qsr(&["check", "/nonexistent/file.qsr"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(qsr(&["check"]).status.code(), Some(2));
    assert_eq!(qsr(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn check_json() {
    let o = qsr(&["--json", "check", &fixture("gerevini_renz.qsr")]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["status"], "inconsistent");

    let o = qsr(&["check", "--json", &fixture("moving.qsr")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let middle = v["relations"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["time"] == 1 && r["objects"] == serde_json::json!(["a", "b"]))
        .unwrap();
    assert_eq!(middle["relations"], serde_json::json!(["EC"]));
}

#[test]
fn decide_counts_atomic_scenarios() {
    let o = qsr(&["decide", "--all", &fixture("three_free.qsr")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("scenario ")).count(), 193);
    assert!(out.trim_end().ends_with("CONSISTENT 193 atomic scenarios"));

    let o = qsr(&["decide", "--all", "--json", &fixture("two_free.qsr")]);
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[8]["count"], 8);
}

#[test]
fn decide_single_and_inconsistent() {
    let o = qsr(&["decide", &fixture("gerevini_renz_topology.qsr")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    // the link to size makes the result search-consistent only
    assert!(out.starts_with("SEARCH-CONSISTENT\n"), "{out}");
    assert!(out.lines().skip(1).all(|l| l.starts_with("rel ") && !l.contains("  ")));

    let o = qsr(&["decide", &fixture("ntpp_ec.qsr")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());

    let o = qsr(&["decide", &fixture("gerevini_renz.qsr")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());

    let o = qsr(&["decide", &fixture("moving.qsr")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rel topo a b @1 { EC }"), "{}", stdout(&o));

    let o = qsr(&["decide", &fixture("directions.qsr")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rel dir a b { B }"), "{}", stdout(&o));
}

#[test]
fn decided_output_parses_back() {
    // rel lines of a decided scenario form a valid, consistent scenario
    let o = qsr(&["decide", &fixture("gerevini_renz_topology.qsr")]);
    let mut text = String::from("objects 0 1 2 3 4\naspect topo rcc8\naspect size size\nlink topo_size topo size\n");
    for l in stdout(&o).lines().skip(1) {
        text.push_str(l);
        text.push('\n');
    }
    let dir = std::env::temp_dir().join(format!("qsr-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("atomic.qsr");
    std::fs::write(&path, text).unwrap();
    let o = qsr(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn validate_tables_passes_and_flags_corruption() {
    let o = qsr(&["validate-tables"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("rcc8 composition triples: 193"));
    assert!(out.contains("valid direction sets: 218"));
    assert!(!out.contains("FAIL"));

    let dir = std::env::temp_dir().join(format!("qsr-tables-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = qsr_core::calculi::RCC8_DATA.replace("TPP TPPi\n", "TPP TPP\n");
    let path = dir.join("bad.cal");
    std::fs::write(&path, bad).unwrap();
    let o = qsr(&["validate-tables", "--calculus", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL") && out.contains("TPPi"), "{out}");

    let o = qsr(&["--json", "validate-tables", "--calculus", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["ok"], false);

    std::fs::write(&path, "relations A B\nconverse\nA Q\n").unwrap();
    let o = qsr(&["validate-tables", "--calculus", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--instances", "60", "--max-n", "6", "--seed", "3"];
    let a = qsr(&args);
    let b = qsr(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("pc == gac 60/60"));
    assert!(stdout(&a).trim_end().ends_with("PASS"));

    let o = qsr(&["verify", "--instances", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pc == gac 0/0"));

    let o = qsr(&["--json", "verify", "--instances", "5", "--max-n", "4"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["decide_agrees"], v["small_instances"]);

    assert_eq!(qsr(&["verify", "--max-n", "2"]).status.code(), Some(2));
}

#[test]
fn derive_emits_parseable_tables() {
    let a = qsr(&["derive", "cyc"]);
    let b = qsr(&["derive", "cyc"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(matches!(
        qsr_core::calculi::format::parse(&text).unwrap(),
        qsr_core::calculi::format::CalculusFile::Ternary(c) if c.size() == 24
    ));

    let dir = std::env::temp_dir().join(format!("qsr-derive-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for which in ["size", "pointcd", "dirsets"] {
        let path = dir.join(format!("{which}.cal"));
        let o = qsr(&["derive", which, "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let o = qsr(&["validate-tables", "--calculus", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{which}: {}", stdout(&o));
    }
    // a derived calculus file can back a scenario aspect
    std::fs::write(dir.join("s.qsr"), "objects a b c\naspect p pointcd.cal\nrel p a b { N }\nrel p b c { N }\nrel p a c { S }\n")
        .unwrap();
    let o = qsr(&["check", dir.join("s.qsr").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();

    assert_eq!(qsr(&["derive", "nope"]).status.code(), Some(2));
}
