// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! End-to-end runs of the command-line tool.

mod common;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use common::check_lp_grammar;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conflict-cliques"))
        .args(args)
        .output()
        .unwrap()
}

fn run_with_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_conflict-cliques"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn code(output: &Output) -> i32 {
    output.status.code().unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let file = dir.path().join(name);
    std::fs::write(&file, text).unwrap();
    file
}

#[test]
fn cliques_match_committed_report() {
    let output = run(&["cliques", path(&fixture("path3.json"))]);
    assert_eq!(code(&output), 0, "{}", stderr(&output));
    let expected = std::fs::read_to_string(fixture("path3.cliques.json")).unwrap();
    assert_eq!(stdout(&output), expected);
}

#[test]
fn cliques_to_file_and_from_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let output = run(&["cliques", path(&fixture("path3.json")), "--out", path(&out)]);
    assert_eq!(code(&output), 0);
    assert!(output.stdout.is_empty());
    let written = std::fs::read_to_string(&out).unwrap();

    let input = std::fs::read(fixture("path3.json")).unwrap();
    let piped = run_with_stdin(&["cliques", "-"], &input);
    assert_eq!(code(&piped), 0);
    assert_eq!(stdout(&piped), written);
}

#[test]
fn periodic_report_flags_missed_clique() {
    let output = run(&["cliques", path(&fixture("helly_gap.json"))]);
    assert_eq!(code(&output), 0);
    let text = stdout(&output);
    assert!(text.contains("\"complete\": false"), "{text}");
    assert!(text.contains("\"missed\""), "{text}");
}

#[test]
fn lp_formulations_are_grammatical() {
    for formulation in ["pairwise", "clique"] {
        let output = run(&[
            "lp",
            path(&fixture("station.json")),
            "--formulation",
            formulation,
        ]);
        assert_eq!(code(&output), 0, "{}", stderr(&output));
        let lp = stdout(&output);
        check_lp_grammar(&lp).unwrap();
        assert!(lp.contains("t1: x_IC1_1 + x_IC1_2 = 1\n"), "{lp}");
        assert_eq!(
            lp,
            stdout(&run(&[
                "lp",
                path(&fixture("station.json")),
                "--formulation",
                formulation
            ]))
        );
    }
}

#[test]
fn lp_needs_labels() {
    let output = run(&[
        "lp",
        path(&fixture("path3.json")),
        "--formulation",
        "clique",
    ]);
    assert_eq!(code(&output), 2);
    assert!(stderr(&output).contains("no train/assignment label"));
}

#[test]
fn unreadable_and_malformed_input() {
    assert_eq!(code(&run(&["cliques", "/nonexistent/input.json"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let broken = write_temp(&dir, "broken.json", "{\"version\": 1, \"resources\": [");
    let output = run(&["cliques", path(&broken)]);
    assert_eq!(code(&output), 1);
    assert!(stderr(&output).contains("line 1"));
    let bad_time = write_temp(
        &dir,
        "time.json",
        r#"{"version": 1, "resources": [{"id": "r", "intervals": [{"id": "A", "start": "-1", "end": "2"}]}]}"#,
    );
    assert_eq!(code(&run(&["cliques", path(&bad_time)])), 1);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["lp", path(&fixture("station.json"))])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn invalid_schema_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_temp(
        &dir,
        "invalid.json",
        r#"{"version": 1, "resources": [{"id": "r", "intervals": [
            {"id": "A", "start": "5", "end": "3"},
            {"id": "A", "start": "1", "end": "2"}]}]}"#,
    );
    let output = run(&["cliques", path(&input)]);
    assert_eq!(code(&output), 2);
    let message = stderr(&output);
    assert!(message.contains("start > end for A"), "{message}");
    assert!(message.contains("duplicate"), "{message}");
}

#[test]
fn strict_mode_rejects_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_temp(
        &dir,
        "extra.json",
        r#"{"version": 1, "resources": [{"id": "r", "intervals": [
            {"id": "A", "start": "0", "end": "3", "note": "late"}]}]}"#,
    );
    let lenient = run(&["cliques", path(&input)]);
    assert_eq!(code(&lenient), 0);
    assert!(
        stderr(&lenient).contains("warning: ignored unknown field resources.0.intervals.0.note")
    );
    let strict = run(&["--strict", "cliques", path(&input)]);
    assert_eq!(code(&strict), 1);
    assert!(stderr(&strict).contains("unknown fields"));
}

#[test]
fn verify_against_expected_reports() {
    let input = fixture("path3.json");
    let good = run(&[
        "verify",
        path(&input),
        "--expected",
        path(&fixture("path3.cliques.json")),
    ]);
    assert_eq!(code(&good), 0, "{}", stdout(&good));
    assert!(stdout(&good).contains("minimum edge clique cover 2"));

    let bad = run(&[
        "verify",
        path(&input),
        "--expected",
        path(&fixture("path3.bad.cliques.json")),
    ]);
    assert_eq!(code(&bad), 3);
    assert!(stdout(&bad).contains("MISMATCH"));
}

#[test]
fn verify_periodic_and_labeled_fixtures() {
    for name in ["helly_gap.json", "station.json", "c5.json", "c7.json"] {
        let output = run(&["verify", path(&fixture(name))]);
        assert_eq!(code(&output), 0, "{name}: {}", stdout(&output));
    }
    assert!(stdout(&run(&["verify", path(&fixture("helly_gap.json"))]))
        .contains("greedy missed {A,B,C}"));
}

#[test]
fn verify_guard_and_sampling() {
    let intervals: Vec<String> = (0..30)
        .map(|i| {
            format!(
                r#"{{"id": "i{i:02}", "start": "{}", "end": "{}"}}"#,
                2 * i,
                2 * i + 3
            )
        })
        .collect();
    let text = format!(
        r#"{{"version": 1, "resources": [{{"id": "long", "intervals": [{}]}}]}}"#,
        intervals.join(",")
    );
    let dir = tempfile::tempdir().unwrap();
    let input = write_temp(&dir, "long.json", &text);

    let guarded = run(&["verify", path(&input)]);
    assert_eq!(code(&guarded), 4);
    assert!(stdout(&guarded).contains("pass --seed to sample"));

    let sampled = run(&["--seed", "7", "verify", path(&input)]);
    assert_eq!(code(&sampled), 0, "{}", stdout(&sampled));
    assert_eq!(
        stdout(&sampled),
        stdout(&run(&["verify", path(&input), "--seed", "7"]))
    );
}

#[test]
fn odd_cycle_witness() {
    let c5 = run(&["witness-oddcycle", path(&fixture("c5.json"))]);
    assert_eq!(code(&c5), 0);
    assert!(stdout(&c5).contains("sum x = 5/2 > 2 = max stable set size"));
    let c7 = run(&["witness-oddcycle", path(&fixture("c7.json"))]);
    assert_eq!(code(&c7), 0);
    assert!(stdout(&c7).contains("sum x = 7/2 > 3"));
    assert_eq!(
        code(&run(&["witness-oddcycle", path(&fixture("path3.json"))])),
        2
    );
}
