use std::collections::BTreeMap;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use proptest::prelude::*;
use serde_json::Value as Json;

use pantagruel_cli::output::store_json;
use pantagruel_cli::{main_with, Io};
use pantagruel_core::{Entity, Store, Value};

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(name).to_string_lossy().into_owned()
}

fn tmp(name: &str, contents: &str) -> String {
    let path: PathBuf = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

struct Outcome {
    status: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str], stdin: &str) -> Outcome {
    let mut input = Cursor::new(stdin.as_bytes().to_vec());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["pantagruel"];
    argv.extend_from_slice(args);
    let status = main_with(argv, Io { stdin: &mut input, stdout: &mut out, stderr: &mut err, interactive: false });
    Outcome { status, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

#[test]
fn check_exit_codes() {
    assert_eq!(run(&["check", &corpus("building.ptg")], "").status, 0);

    let bad = run(&["check", &corpus("building_aggregate.ptg")], "");
    assert_eq!(bad.status, 1);
    assert!(bad.stderr.contains("error: UnsupportedConstruct"), "{}", bad.stderr);

    let missing = run(&["check", "/nonexistent/program.ptg"], "");
    assert_eq!(missing.status, 2);
    assert!(missing.stderr.contains("cannot read file"));

    let syntax = tmp("syntax.ptg", "interface Light {\n  attribute room Integer\n}\n");
    let out = run(&["check", &syntax], "");
    assert_eq!(out.status, 1);
    assert!(out.stderr.contains(":2:"), "{}", out.stderr);
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["frobnicate"], "").status, 1);
    assert_eq!(run(&["run", &corpus("building.ptg")], "").status, 1);
    let help = run(&["--help"], "");
    assert_eq!(help.status, 0);
    assert!(help.stdout.contains("repl"));
}

#[test]
fn run_errors() {
    let program = corpus("building.ptg");
    let missing = run(&["run", &program, "--script", "/nonexistent.evs"], "");
    assert_eq!(missing.status, 2);

    let bad_script = tmp("bad.evs", "tick\nevent m10.detected == true\n");
    let out = run(&["run", &program, "--script", &bad_script], "");
    assert_eq!(out.status, 1);
    assert!(out.stderr.contains("bad.evs:2: error"), "{}", out.stderr);
    assert!(out.stdout.is_empty());

    // the first tick is printed before the second one fails
    let runtime_error = tmp("ghost.evs", "tick\nevent ghost.detected = true\ntick\n");
    let out = run(&["run", &program, "--script", &runtime_error, "--format", "jsonl"], "");
    assert_eq!(out.status, 1);
    assert_eq!(out.stdout.lines().count(), 1);
    assert!(out.stderr.contains("ghost"), "{}", out.stderr);
}

#[test]
fn comments_only_script() {
    let script = tmp("comments.evs", "# nothing happens\n\n");
    let out = run(&["run", &corpus("building.ptg"), "--script", &script], "");
    assert_eq!(out.status, 0);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.is_empty());
}

#[test]
fn trailing_changes_warn() {
    let script = tmp("trailing.evs", "tick\nevent m10.detected = true\n");
    let out = run(&["run", &corpus("building.ptg"), "--script", &script], "");
    assert_eq!(out.status, 0);
    assert!(out.stderr.contains("warning: 1 change(s) after the last `tick`"));
    assert!(out.stdout.starts_with("tick 0\n"));
}

#[test]
fn max_ticks_and_emit_initial() {
    let out = run(
        &[
            "run",
            &corpus("building.ptg"),
            "--script",
            &corpus("building.evs"),
            "--format",
            "jsonl",
            "--max-ticks",
            "2",
            "--emit-initial",
        ],
        "",
    );
    let lines: Vec<Json> = out.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["initial"], Json::Bool(true));
    assert_eq!(lines[2]["tick"], 1);
}

#[test]
fn repl_matches_run() {
    let program = corpus("building.ptg");
    let script_text = std::fs::read_to_string(corpus("building.evs")).unwrap();
    for format in ["text", "jsonl"] {
        for mode in ["edge", "level"] {
            let batch =
                run(&["run", &program, "--script", &corpus("building.evs"), "--format", format, "--mode", mode], "");
            let repl = run(&["repl", &program, "--format", format, "--mode", mode], &script_text);
            assert_eq!(batch.status, 0);
            assert_eq!(repl.status, 0);
            assert_eq!(repl.stdout, batch.stdout, "{format} {mode}");
        }
    }
}

#[test]
fn repl_keeps_going_after_errors() {
    let input = "event ghost.detected = true\ntick\nbogus line\nevent m10.detected = true\ntick\nstate\nquit\ntick\n";
    let out = run(&["repl", &corpus("building.ptg"), "--format", "jsonl"], input);
    assert_eq!(out.status, 0);
    let lines: Vec<Json> = out.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    // the failed tick prints nothing; the second tick is numbered 0
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["tick"], 0);
    assert_eq!(lines[1]["entities"]["m10"]["events"]["detected"], Json::Bool(true));
    assert_eq!(out.stderr.lines().count(), 2, "{}", out.stderr);
}

#[test]
fn text_output_shape() {
    let script = tmp("one.evs", "event m10.detected = true\ntick\n");
    let out = run(&["run", &corpus("building.ptg"), "--script", &script], "");
    let mut lines = out.stdout.lines();
    assert_eq!(lines.next(), Some("tick 0"));
    assert_eq!(lines.next(), Some("  changes: event m10.detected = true"));
    assert_eq!(lines.next(), Some("  fired: rule 1 {l=l10, m=m10}"));
    assert_eq!(lines.next(), Some("         rule 1 {l=l11, m=m10}"));
}

/// Reads a store back from its JSON form; used to show that the
/// serialization loses nothing.
fn parse_store(json: &Json) -> Store {
    let value = |v: &Json| match v {
        Json::Null => Value::Undef,
        Json::Bool(b) => Value::Tr(*b),
        Json::Number(n) => Value::Nat(n.as_u64().unwrap()),
        other => panic!("not a value: {other}"),
    };
    let members = |m: &Json| -> BTreeMap<String, Value> {
        m.as_object().unwrap().iter().map(|(k, v)| (k.clone(), value(v))).collect()
    };
    json.as_object()
        .unwrap()
        .iter()
        .map(|(id, e)| {
            let entity = Entity {
                interface: e["interface"].as_str().unwrap().to_string(),
                attributes: members(&e["attributes"]),
                events: members(&e["events"]),
            };
            (id.clone(), entity)
        })
        .collect()
}

fn store() -> impl Strategy<Value = Store> {
    let value = prop_oneof![Just(Value::Undef), any::<bool>().prop_map(Value::Tr), any::<u64>().prop_map(Value::Nat)];
    let members = prop::collection::btree_map("[a-z]{1,3}", value, 0..3);
    let entity = ("[A-Z][a-z]{0,3}", members.clone(), members).prop_map(|(interface, attributes, events)| Entity {
        interface,
        attributes,
        events,
    });
    prop::collection::btree_map("[a-z][a-z0-9]{0,3}", entity, 0..4).prop_map(|m| m.into_iter().collect())
}

proptest! {
    #[test]
    fn serialization_is_injective(a in store(), b in store()) {
        let (ja, jb) = (store_json(&a).to_string(), store_json(&b).to_string());
        prop_assert_eq!(parse_store(&serde_json::from_str(&ja).unwrap()), a.clone());
        prop_assert_eq!(ja == jb, a == b);
    }
}
