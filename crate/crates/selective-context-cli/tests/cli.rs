//! End-to-end runs of the compiled binary: exit codes, output formats, batch
//! handling, and the evaluate table.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use selective_context::segmentation::tokenize;
use selective_context::NgramModel;
use selective_context_cli::report::Report;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_selective-context"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write(path: &Path, content: &str) {
    fs::write(path, content).unwrap();
}

fn token_texts(text: &str) -> Vec<String> {
    tokenize(text)
        .iter()
        .map(|span| span.slice(text).to_string())
        .collect()
}

/// Trains a small bigram model over the given text and saves it.
fn save_model(dir: &Path, corpus: &str) -> PathBuf {
    let tokens: Vec<&str> = corpus.split_whitespace().collect();
    let model = NgramModel::train(&tokens, 2, 0.1).unwrap();
    let path = dir.join("model.scng");
    model.save(&path).unwrap();
    path
}

#[test]
fn ratio_zero_reproduces_the_token_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let model = save_model(dir.path(), "the quick brown fox jumps over the lazy dog again");
    let input = dir.path().join("doc.txt");
    let text = "The quick brown fox jumps over the lazy dog. The dog sleeps.";
    write(&input, text);

    let output = run(&[
        "compress",
        input.to_str().unwrap(),
        "--scorer",
        &format!("ngram:{}", model.display()),
        "--ratio",
        "0",
        "--level",
        "token",
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    assert_eq!(token_texts(stdout_of(&output).trim()), token_texts(text));
}

#[test]
fn json_format_emits_a_schema_v1_report() {
    let dir = tempfile::tempdir().unwrap();
    let model = save_model(dir.path(), "alpha beta gamma delta alpha beta gamma");
    let input = dir.path().join("doc.txt");
    write(&input, "Alpha beta gamma delta. Beta gamma alpha delta.");

    let output = run(&[
        "compress",
        input.to_str().unwrap(),
        "--scorer",
        &format!("ngram:{}", model.display()),
        "--ratio",
        "0.5",
        "--format",
        "json",
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let report = Report::from_json(stdout_of(&output).trim()).unwrap();
    assert_eq!(report.schema, 1);
    assert_eq!(report.id, "doc");
    assert_eq!(report.requested_ratio, 0.5);
    assert!(report.threshold_bits.is_some());
    assert!(!report.units.is_empty());
    assert_eq!(report.to_json(), stdout_of(&output).trim());
}

#[test]
fn batches_write_one_file_per_document_and_jobs_do_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let model = save_model(dir.path(), "one two three four five six seven eight nine ten");
    let input = dir.path().join("batch.jsonl");
    write(
        &input,
        "{\"id\": \"a\", \"body\": \"One two three four. Five six seven.\"}\n\
         {\"id\": \"b\", \"body\": \"Two four six eight. Ten nine one.\"}\n\
         {\"id\": \"c\", \"body\": \"Three one two five. Six ten four.\"}\n\
         {\"id\": \"d\", \"body\": \"Five five five five. One two ten.\"}\n",
    );

    let serial_dir = dir.path().join("serial");
    let parallel_dir = dir.path().join("parallel");
    for (out, jobs) in [(&serial_dir, "1"), (&parallel_dir, "4")] {
        let output = run(&[
            "compress",
            input.to_str().unwrap(),
            "--input-format",
            "jsonl",
            "--scorer",
            &format!("ngram:{}", model.display()),
            "--format",
            "json",
            "--jobs",
            jobs,
            "--output",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success(), "{}", stderr_of(&output));
    }

    for id in ["a", "b", "c", "d"] {
        let serial = fs::read(serial_dir.join(format!("{id}.json"))).unwrap();
        let parallel = fs::read(parallel_dir.join(format!("{id}.json"))).unwrap();
        assert!(!serial.is_empty());
        assert_eq!(serial, parallel, "document {id}");
    }
}

#[test]
fn failing_documents_set_the_exit_code_but_do_not_stop_the_batch() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("batch.jsonl");
    write(
        &input,
        "{\"id\": \"good\", \"body\": \"Plenty of words to work with here.\"}\n\
         {\"id\": \"hollow\", \"body\": \"\"}\n\
         {\"id\": \"fine\", \"body\": \"More words arrive in this line.\"}\n",
    );
    let out_dir = dir.path().join("out");

    let output = run(&[
        "compress",
        input.to_str().unwrap(),
        "--input-format",
        "jsonl",
        "--scorer",
        "uniform:64",
        "--ratio",
        "0",
        "--output",
        out_dir.to_str().unwrap(),
    ]);
    assert!(!output.status.success());
    let diagnostics = stderr_of(&output);
    assert!(diagnostics.contains("hollow"), "{diagnostics}");
    assert!(diagnostics.contains("1 of 3 documents failed"), "{diagnostics}");
    assert!(out_dir.join("good.txt").exists());
    assert!(out_dir.join("fine.txt").exists());
    assert!(!out_dir.join("hollow.txt").exists());
}

#[test]
fn empty_input_is_a_successful_empty_batch() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.txt");
    write(&input, "");

    let output = run(&[
        "compress",
        input.to_str().unwrap(),
        "--scorer",
        "uniform:64",
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    assert!(stdout_of(&output).is_empty());
}

#[test]
fn conversations_carry_the_final_turn_verbatim() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("chat.json");
    write(
        &input,
        r#"{"id": "chat", "turns": [
            {"speaker": "user", "text": "Tell me about token entropy in long prompts."},
            {"speaker": "assistant", "text": "Predictable tokens carry little information."},
            {"speaker": "user", "text": "So which parts can I safely delete?"}
        ]}"#,
    );

    let output = run(&[
        "compress",
        input.to_str().unwrap(),
        "--input-format",
        "convo-json",
        "--scorer",
        "uniform:64",
        "--baseline",
        "random",
        "--seed",
        "9",
        "--ratio",
        "0.5",
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let text = stdout_of(&output);
    let last_line = text.trim_end().lines().last().unwrap();
    assert_eq!(last_line, "user: So which parts can I safely delete?");
}

#[test]
fn random_baseline_is_reproducible_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("doc.txt");
    write(
        &input,
        "Ten little words stand here waiting for the random axe.",
    );

    let args = [
        "compress",
        input.to_str().unwrap(),
        "--scorer",
        "uniform:64",
        "--level",
        "token",
        "--baseline",
        "random",
        "--seed",
        "42",
        "--ratio",
        "0.5",
        "--format",
        "json",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(stdout_of(&first), stdout_of(&second));

    let report = Report::from_json(stdout_of(&first).trim()).unwrap();
    let removed = report.units.iter().filter(|u| !u.retained).count();
    // 11 token units (ten words and the period); round(0.5 * 11) = 6.
    assert_eq!(report.units.len(), 11);
    assert_eq!(removed, 6);
    assert!(report.threshold_bits.is_none());
}

#[test]
fn visualize_always_renders_html() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("doc.txt");
    write(&input, "A short document. It has two sentences.");

    let output = run(&[
        "visualize",
        input.to_str().unwrap(),
        "--scorer",
        "uniform:64",
        "--ratio",
        "0",
        "--format",
        "text",
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let html = stdout_of(&output);
    assert!(html.starts_with("<!DOCTYPE html>"));
    assert!(html.contains("id=\"original\""));
    assert!(html.contains("id=\"filtered\""));
}

#[test]
fn train_ngram_is_deterministic_and_reports_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.txt");
    write(&corpus, "one ring to rule them all one ring to find them");

    let first_path = dir.path().join("first.scng");
    let second_path = dir.path().join("second.scng");
    for path in [&first_path, &second_path] {
        let output = run(&[
            "train-ngram",
            corpus.to_str().unwrap(),
            "--order",
            "2",
            "--k",
            "0.5",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(output.status.success(), "{}", stderr_of(&output));
        let line = stdout_of(&output);
        assert!(line.contains("7 vocabulary entries"), "{line}");
        assert!(line.contains("11 corpus tokens"), "{line}");
    }
    assert_eq!(fs::read(&first_path).unwrap(), fs::read(&second_path).unwrap());

    let model = NgramModel::load(&first_path).unwrap();
    assert_eq!(model.order(), 2);
    assert_eq!(model.vocab_size(), 7);
}

#[test]
fn train_ngram_rejects_a_corpus_shorter_than_the_order() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.txt");
    write(&corpus, "lonely");

    let output = run(&[
        "train-ngram",
        corpus.to_str().unwrap(),
        "--order",
        "2",
        "--output",
        dir.path().join("m.scng").to_str().unwrap(),
    ]);
    assert!(!output.status.success());
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn evaluate_scores_identical_files_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let candidates = dir.path().join("cand.txt");
    let references = dir.path().join("refs.txt");
    let lines = "The cat sat on the mat.\nEntropy measures surprise.\n";
    write(&candidates, lines);
    write(&references, lines);

    let output = run(&[
        "evaluate",
        candidates.to_str().unwrap(),
        references.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let table = stdout_of(&output);
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0], "pair\tbleu\trouge1_f1\trouge2_f1\trouge_l_f1");
    assert_eq!(rows[1], "1\t1\t1\t1\t1");
    assert_eq!(rows[2], "2\t1\t1\t1\t1");
    assert_eq!(rows[3], "mean\t1\t1\t1\t1");
}

#[test]
fn evaluate_emits_json_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let candidates = dir.path().join("cand.txt");
    let references = dir.path().join("refs.txt");
    write(&candidates, "a b c d\n");
    write(&references, "a b x y\n");

    let output = run(&[
        "evaluate",
        candidates.to_str().unwrap(),
        references.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let value: serde_json::Value = serde_json::from_str(stdout_of(&output).trim()).unwrap();
    assert_eq!(value["pairs"].as_array().unwrap().len(), 1);
    assert_eq!(value["pairs"][0]["rouge1_f1"], 0.5);
    assert_eq!(value["mean"]["rouge1_f1"], 0.5);
}

#[test]
fn evaluate_rejects_mismatched_line_counts() {
    let dir = tempfile::tempdir().unwrap();
    let candidates = dir.path().join("cand.txt");
    let references = dir.path().join("refs.txt");
    write(&candidates, "only one line\n");
    write(&references, "first line\nsecond line\n");

    let output = run(&[
        "evaluate",
        candidates.to_str().unwrap(),
        references.to_str().unwrap(),
    ]);
    assert!(!output.status.success());
    let err = stderr_of(&output);
    assert!(err.contains("cand.txt"), "{err}");
    assert!(err.contains("refs.txt"), "{err}");
}

#[test]
fn usage_errors_exit_with_code_two() {
    let output = run(&["compress", "--no-such-flag"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn out_of_range_ratio_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("doc.txt");
    write(&input, "Words to compress.");

    let output = run(&[
        "compress",
        input.to_str().unwrap(),
        "--scorer",
        "uniform:64",
        "--ratio",
        "1.5",
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("ratio"), "{}", stderr_of(&output));
}

#[test]
fn help_documents_the_auth_token_variable() {
    let output = run(&["compress", "--help"]);
    assert!(output.status.success());
    assert!(stdout_of(&output).contains("SELECTIVE_CONTEXT_AUTH_TOKEN"));
}
