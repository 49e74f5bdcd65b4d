mod common;

use std::process::{Command, Output};

use common::fixture_path;
use qlp::OutputRecord;

fn qlp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn pu() -> String {
    fixture_path("pu.qlp").display().to_string()
}

fn pw() -> String {
    fixture_path("pw.qlp").display().to_string()
}

const EXAMPLE_GOAL: &str = "eats(father(X),Y)#W1, human(father(X))#W2 | W1>=0.4, W2>=0.6";

#[test]
fn solve_prints_the_certainty_answer_first() {
    let o = qlp(&["solve", &pu(), EXAMPLE_GOAL, "--domain", "u", "--max-answers", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("{X = adam} | {W1 = 0.64, W2 = 0.9}"));
    assert_eq!(text.lines().nth(1), Some("% truncated after 4 steps"));
}

#[test]
fn solve_trace_shows_four_steps() {
    let o = qlp(&["solve", &pu(), EXAMPLE_GOAL, "--max-answers", "1", "--trace"]);
    let text = stdout(&o);
    let steps: Vec<&str> = text.lines().filter(|l| l.starts_with("% ") && l.contains(" via ")).collect();
    assert_eq!(steps.len(), 4);
    assert!(steps[0].starts_with("% 1. eats(father(X),Y)#W1 via eats.4"));
    assert!(steps[3].ends_with("W4 = 1 * glb{}"));
}

#[test]
fn json_records_follow_the_schema() {
    let args = ["solve", &pw(), "eats(X,Y)#W | W<=5.0", "--domain", "w", "--max-answers", "1", "--json"];
    let o = qlp(&args);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let records: Vec<OutputRecord> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0].bindings.get("X").map(String::as_str), Some("adam"));
    let w: f64 = records[0].qualifications["W"].parse().unwrap();
    assert!(w <= 5.0);
    for (line, r) in text.lines().zip(&records) {
        assert_eq!(line, r.to_json());
    }
    // identical inputs give identical bytes
    assert_eq!(qlp(&args).stdout, o.stdout);
}

#[test]
fn weight_answer_for_father_of_adam() {
    let o = qlp(&["solve", &pw(), "eats(X,Y)#W | W<=5.0", "--domain", "w", "--max-answers", "40"]);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "{X = father(adam)} | {W = 2}"), "{text}");
}

#[test]
fn no_answer_exits_one() {
    let o = qlp(&["solve", &pu(), "cruel(X)#W | W>=0.95"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "% exhausted after 0 steps");
}

#[test]
fn malformed_input_exits_two() {
    let o = qlp(&["solve", &pu(), "eats(X"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("goal:1:"));
    let o = qlp(&["solve", &pu(), "eats(X,Y)#W", "--domain", "v"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qlp(&["solve", "/nonexistent.qlp", "eats(X,Y)#W"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn program_errors_report_positions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.qlp");
    std::fs::write(&path, "p(a) <-1.0-\nq(X) <-0.5 p(X)\n").unwrap();
    let o = qlp(&["model", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("bad.qlp:2:"), "{err}");
}

#[test]
fn model_dumps() {
    let u = stdout(&qlp(&["model", &pu(), "--domain", "u", "--depth", "2"]));
    assert!(u.lines().any(|l| l == "cruel(mother(eve)) # 0.189"));
    let w = stdout(&qlp(&["model", &pw(), "--domain", "w", "--depth", "2"]));
    assert!(w.lines().any(|l| l == "cruel(mother(eve)) # 4"));
    let mut sorted: Vec<&str> = u.lines().collect();
    sorted.sort();
    assert_eq!(sorted, u.lines().collect::<Vec<_>>());

    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.qlp");
    std::fs::write(&empty, "% nothing\n").unwrap();
    let o = qlp(&["model", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn translate_dialects() {
    let toy = stdout(&qlp(&["translate", &pu(), "--dialect", "toy_like"]));
    assert!(toy.starts_with("min1 [] = 1\n"));
    assert!(toy.contains("data being = bird | cat | oak | apple | adam | eve\n             | father being | mother being\n"));
    assert!(toy.contains("eats(adam,X,F,W,M) :- F*0.8>=M, W == 0.8 * min1 []\n"));
    let generic = stdout(&qlp(&["translate", &pu()]));
    assert!(generic.contains("human(adam,Alpha,W,Beta) :- 1.0*Alpha >= Beta, W = 1.0 * glb{}."));
    let w = stdout(&qlp(&["translate", &pw(), "--domain", "w", "--dialect", "toy_like"]));
    assert!(w.starts_with("max1 [] = 0\n"));
    assert!(w.contains("human(father(X),F,W,M) :- F+1.0<=M,"));
}

#[test]
fn check_verdicts() {
    let answer = "X = adam, Y = apple | W1 = 0.64, W2 = 0.9";
    let o = qlp(&["check", &pu(), EXAMPLE_GOAL, answer]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "valid"));
    let inflated = "X = adam, Y = apple | W1 = 0.7, W2 = 0.9";
    let o = qlp(&["check", &pu(), EXAMPLE_GOAL, inflated]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(1), "invalid"));
    let o = qlp(&["check", &pu(), EXAMPLE_GOAL, answer, "--oracle-depth", "1"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(3), "unknown"));
    let handwritten = "{X -> adam, Y -> apple} | {W1 -> 0.50, W2 -> 0.75}";
    let o = qlp(&["check", &pu(), EXAMPLE_GOAL, handwritten]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "valid"));
    let depth = "X = father(adam), Y = apple | W = 4.0";
    let o = qlp(&["check", &pw(), "eats(X,Y)#W | W<=5.0", depth, "--domain", "w"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "valid"));
    let o = qlp(&["check", &pu(), EXAMPLE_GOAL, "X = = adam"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selection_rules_agree_on_answers() {
    let left = stdout(&qlp(&["solve", &pu(), "cruel(X)#W | W>=0.3", "--max-depth", "30"]));
    let right = stdout(&qlp(&["solve", &pu(), "cruel(X)#W | W>=0.3", "--select", "rightmost", "--max-depth", "30"]));
    let answers = |s: &str| -> std::collections::BTreeSet<String> {
        s.lines().filter(|l| !l.starts_with('%')).map(String::from).collect()
    };
    assert_eq!(answers(&left), answers(&right));
}
