use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn semisup(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semisup"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = semisup(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SMALL: &[&str] = &[
    "--rows",
    "160",
    "--features",
    "4",
    "--separation",
    "1.5",
    "--labeled-count",
    "30",
    "--training-cycles",
    "60",
];

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn selftrain_then_evaluate_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    for run in ["a", "b"] {
        ok(d, &with(&["selftrain"], &with(SMALL, &["--out", &format!("st_{run}")])));
        ok(
            d,
            &[
                "evaluate",
                "--model",
                &format!("st_{run}/model.json"),
                "--test",
                &format!("st_{run}/test.csv"),
                "--out",
                &format!("ev_{run}"),
            ],
        );
    }
    for f in ["model.json", "selftrain_log.csv", "selftrain_log.json", "test.csv"] {
        assert_eq!(
            fs::read(d.join("st_a").join(f)).unwrap(),
            fs::read(d.join("st_b").join(f)).unwrap(),
            "{f}"
        );
    }
    for f in ["metrics.json", "metrics.csv"] {
        assert_eq!(
            fs::read(d.join("ev_a").join(f)).unwrap(),
            fs::read(d.join("ev_b").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn replaying_run_json_reproduces_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &with(
            &["compare"],
            &with(SMALL, &["--learners", "mlp,ssl-nb", "--out", "first"]),
        ),
    );
    let before: Vec<(String, Vec<u8>)> = fs::read_dir(d.join("first"))
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    fs::copy(d.join("first/run.json"), d.join("saved.json")).unwrap();
    fs::remove_dir_all(d.join("first")).unwrap();
    ok(d, &["compare", "--config", "saved.json"]);
    assert_eq!(before.len(), 4);
    for (name, bytes) in before {
        assert_eq!(fs::read(d.join("first").join(&name)).unwrap(), bytes, "{name}");
    }
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("run.toml"),
        "synth_rows = 80\nsynth_features = 3\ntraining_cycles = 7\nlearning_rate = 0.1\nlabeled_count = 20\n",
    )
    .unwrap();
    ok(
        d,
        &["train", "--config", "run.toml", "--learning-rate", "0.2", "--out", "o"],
    );
    let run: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("o/run.json")).unwrap()).unwrap();
    assert_eq!(run["training_cycles"], 7);
    assert_eq!(run["learning_rate"], 0.2);
    assert_eq!(run["error_epsilon"], 1e-5);
    assert_eq!(run["test_fraction"], 0.3);
    assert_eq!(run["command"], "train");
    let history = fs::read_to_string(d.join("o/history.csv")).unwrap();
    assert_eq!(history.lines().next(), Some("cycle,error"));
    assert!(history.lines().count() <= 8);
}

#[test]
fn sweep_emits_both_formula_variants() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "sweep",
            "--rows",
            "120",
            "--labeled-count",
            "30",
            "--training-cycles",
            "5",
            "--max-iterations",
            "2",
            "--divisors",
            "1,2,3,4,5,6",
            "--both-variants",
            "--out",
            "s",
        ],
    );
    let csv = fs::read_to_string(d.join("s/sweep.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(
        csv.lines().next(),
        Some("divisor,hidden_size,error_percent,formula_variant")
    );
    assert_eq!(rows.len(), 12);
    let sizes: Vec<&str> = rows.iter().map(|r| r[1]).collect();
    assert_eq!(
        sizes,
        ["33", "16", "11", "8", "6", "5", "34", "17", "12", "9", "7", "6"]
    );
    assert!(rows[..6].iter().all(|r| r[3] == "divided"));
    assert!(rows[6..].iter().all(|r| r[3] == "divided_plus_one"));
}

#[test]
fn compare_has_one_row_per_learner_in_table_order() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &with(&["compare"], &with(SMALL, &["--learners", "mlp,knn,nb", "--out", "c"])),
    );
    let csv = fs::read_to_string(d.join("c/compare.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "Operator,Accuracy (%),True yes (%),True no (%),False yes (%),False no (%)"
    );
    let names: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["Neural Net", "KNN", "Naive Bayes"]);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("c/compare.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn split_writes_a_partition_and_leaves_the_input_alone() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["synth", "--rows", "50", "--features", "2", "--out", "data"]);
    let original = fs::read(d.join("data/data.csv")).unwrap();
    ok(
        d,
        &[
            "split",
            "--data",
            "data/data.csv",
            "--labeled-count",
            "10",
            "--out",
            "parts",
        ],
    );
    assert_eq!(fs::read(d.join("data/data.csv")).unwrap(), original);
    let manifest = fs::read_to_string(d.join("parts/manifest.csv")).unwrap();
    let parts: Vec<&str> = manifest.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(parts.len(), 50);
    assert_eq!(parts.iter().filter(|p| **p == "test").count(), 15);
    assert_eq!(parts.iter().filter(|p| **p == "labeled").count(), 10);
    assert_eq!(parts.iter().filter(|p| **p == "unlabeled").count(), 25);
    let unlabeled = fs::read_to_string(d.join("parts/unlabeled.csv")).unwrap();
    assert!(unlabeled.lines().skip(1).all(|l| l.ends_with(',')));
}

#[test]
fn knn_and_bayes_models_evaluate_from_disk() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    for learner in ["knn", "nb"] {
        ok(
            d,
            &with(&["train", "--learner", learner], &with(SMALL, &["--out", learner])),
        );
        assert!(!d.join(learner).join("history.csv").exists());
        let out = ok(
            d,
            &[
                "evaluate",
                "--model",
                &format!("{learner}/model.json"),
                "--test",
                &format!("{learner}/test.csv"),
                "--positive-class",
                "no",
                "--out",
                &format!("{learner}_ev"),
            ],
        );
        assert!(String::from_utf8_lossy(&out.stdout).contains("positive class `no`"));
    }
}

#[test]
fn validation_failures_exit_1_with_one_line() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("bad.toml"), "training_cycles = \"many\"\n").unwrap();
    fs::write(d.join("typo.toml"), "trainin_cycles = 3\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["train", "--bogus"],
        vec!["nonsense"],
        vec!["train", "--data", "missing.csv"],
        vec!["train", "--config", "bad.toml"],
        vec!["train", "--config", "typo.toml"],
        vec!["train", "--rows", "40", "--hidden-divisor", "0", "--out", "x"],
        vec!["train", "--rows", "40", "--test-fraction", "1.5", "--out", "x"],
        vec!["compare", "--rows", "40", "--learners", "svm"],
        vec!["selftrain", "--rows", "40", "--confidence-threshold", "0", "--out", "x"],
        vec!["evaluate", "--test", "missing.csv"],
        vec!["sweep", "--rows", "40", "--divisors", "0,1", "--out", "x"],
        vec!["compare", "--rows", "40", "--positive-class", "maybe", "--out", "x"],
    ];
    for args in cases {
        let out = semisup(d, &args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
        let err = stderr(&out);
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("semisup: error: "), "{err}");
    }
    assert!(!d.join("x").exists(), "failed runs leave no output directory");
}

#[test]
fn divergence_is_a_runtime_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let out = semisup(
        d,
        &[
            "train",
            "--rows",
            "40",
            "--features",
            "2",
            "--learning-rate",
            "1e300",
            "--momentum",
            "1e300",
            "--training-cycles",
            "20",
            "--out",
            "x",
        ],
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(!d.join("x").exists());
}

#[test]
fn unwritable_output_is_a_runtime_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("taken"), "a file, not a directory").unwrap();
    let out = semisup(d, &["synth", "--rows", "10", "--features", "1", "--out", "taken"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(fs::read_to_string(d.join("taken")).unwrap(), "a file, not a directory");
}

#[test]
fn help_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ok(tmp.path(), &["--help"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("selftrain"));
}
