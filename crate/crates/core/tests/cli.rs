use std::fs;
use std::process::{Command, Output};

fn tensorid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tensorid")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn certify_four_cube_exit_codes() {
    let o = tensorid(&["certify", "4", "4", "4", "--k", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS"));

    let o = tensorid(&["certify", "4", "4", "4", "--k", "6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("exactly two decompositions"));

    let o = tensorid(&["certify", "4", "4", "4", "--k", "7"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("proved impossible"));
    assert!(stdout(&o).contains("k_max = 6"));
}

#[test]
fn usage_errors() {
    assert_eq!(tensorid(&["certify", "4", "4"]).status.code(), Some(3));
    assert_eq!(tensorid(&["certify", "4", "x", "4", "--k", "1"]).status.code(), Some(3));
    assert_eq!(tensorid(&["certify", "1", "4", "4", "--k", "1"]).status.code(), Some(3));
    assert_eq!(tensorid(&["table", "cubic", "--max-a", "1"]).status.code(), Some(3));
    assert_eq!(tensorid(&["--version"]).status.code(), Some(0));
}

#[test]
fn emitted_certificates_are_byte_identical_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let emit = |p: &std::path::Path| {
        let o = tensorid(&["certify", "5", "5", "5", "--k", "9", "--seed", "7", "--emit", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        fs::read(p).unwrap()
    };
    let ja = emit(&a);
    // same output path so the echoed config matches
    let jb = emit(&a);
    assert_eq!(ja, jb);
    fs::write(&b, &ja).unwrap();
    let o = tensorid(&["replay", b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("REPRODUCED PASS"));
}

#[test]
fn cache_answers_dominated_queries() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let c = cache.to_str().unwrap();
    let o = tensorid(&["certify", "3", "3", "3", "--k", "1", "--aux", "2", "2", "2", "--cache", c]);
    assert_eq!(o.status.code(), Some(0));
    let o = tensorid(&["certify", "3", "4", "3", "--k", "1", "--aux", "1", "2", "0", "--cache", c]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[cache]"), "{}", stdout(&o));
    assert!(stdout(&o).contains("(3,3,3; 1; 2,2,2)"));
    let stored: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cache).unwrap()).unwrap();
    assert_eq!(stored.as_array().unwrap().len(), 1, "cache hits are not re-stored");
}

#[test]
fn tables() {
    let o = tensorid(&["table", "cubic", "--max-a", "10", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let k: Vec<&str> = out.lines().nth(1).unwrap().split_whitespace().skip(1).collect();
    assert_eq!(k, ["2", "3", "5", "9", "13", "18", "22", "27", "32"]);
    assert!(out.lines().any(|l| l.starts_with("verified") && !l.contains("FAIL")));
}

#[test]
fn bounds_report() {
    let out = stdout(&tensorid(&["bounds", "27", "27", "27"]));
    assert!(out.contains("k_max        249"));
    assert!(out.contains("co_bound     64 (base 2)"));
    assert!(out.contains("co_bound     81 (base 3)"));
}

#[test]
fn plan_scripts() {
    let o = tensorid(&["plan", "--script", "paper-16x5", "--dry-run"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 13);
    assert!(out.lines().last().unwrap().ends_with("lemma zerostep"));

    let o = tensorid(&["plan", "--script", "paper-a9"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("root Pass"));

    let o = tensorid(&["plan", "8", "8", "8", "--k", "16", "--dry-run"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn plan_script_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.plan");
    // k does not add up across the split
    fs::write(&path, "4,4,4 | 4 | 0,0,0 | split 1 -> 2*2\n2,4,4 | 1 | 2,0,0 | check first-order\n").unwrap();
    let o = tensorid(&["plan", "--script", path.to_str().unwrap(), "--dry-run"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid plan"));
}

#[test]
fn contact_start_case() {
    let o = tensorid(&["contact", "2", "2", "2", "--aux", "0", "1", "1", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("unit ideal"));
    assert!(out.contains("tangency locus empty; span∩X = 6 lines"));
}
