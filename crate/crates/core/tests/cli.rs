use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sp70(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sp70")).args(args).output().unwrap()
}

fn write_corpus(dir: &Path, text: &str) -> String {
    let path = dir.join("corpus.txt");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_writes_requested_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), "thatboyruns\nthatgirlruns\n");
    let out = dir.path().join("out");
    let o = sp70(&[
        "--corpus",
        &corpus,
        "--mode",
        "chars",
        "--emit",
        "grammar,metrics,alignments,repo",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    for key in ["members ", "G ", "E ", "T ", "compression "] {
        assert!(stdout.lines().any(|l| l.starts_with(key)), "{stdout}");
    }
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 3);
    assert!(metrics.starts_with("pattern,G,E,T,original,compression\n"));
    assert!(out.join("grammar.txt").exists());
    assert!(fs::read_to_string(out.join("alignments.txt")).unwrap().contains("# pattern 2"));
    assert!(!fs::read_to_string(out.join("repo.txt")).unwrap().is_empty());
}

#[test]
fn default_emit_is_grammar_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), "the cat\nthe dog\n");
    let o = sp70(&["--corpus", &corpus, "--mode", "tokens", "--cost", "sfe", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("grammar.txt").exists());
    assert!(dir.path().join("metrics.csv").exists());
    assert!(!dir.path().join("repo.txt").exists());
}

#[test]
fn usage_errors_exit_one() {
    let o = sp70(&[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--corpus"));
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), "ab\n");
    assert_eq!(sp70(&["--corpus", &corpus, "--beam", "0"]).status.code(), Some(1));
    assert_eq!(sp70(&["--corpus", &corpus, "--mode", "words"]).status.code(), Some(1));
    assert_eq!(sp70(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let collision = write_corpus(dir.path(), "a < b\n");
    let o = sp70(&["--corpus", &collision, "--mode", "tokens", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let missing = dir.path().join("nope.txt");
    assert_eq!(sp70(&["--corpus", missing.to_str().unwrap()]).status.code(), Some(2));
}
