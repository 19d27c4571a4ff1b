use std::path::Path;
use std::process::{Command, Output};

use sonar_belief::MassFunction;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sonar-belief"))
        .args(args)
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn misuse_exits_with_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(
        run(&["fuse", "--rule", "nope", "--in", "x", "--out", "y"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "fuse",
        "--rule",
        "pcr",
        "--in",
        p(&dir.path().join("missing.json")),
        "--out",
        p(&dir.path().join("o.json")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn fuse_reproduces_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pair.json");
    std::fs::write(
        &input,
        r#"[{"frame":["A","B"],"masses":{"A":0.6,"A|B":0.4}},
            {"frame":["A","B"],"masses":{"A":0.3,"B":0.2,"A|B":0.5}}]"#,
    )
    .unwrap();
    let expect = [
        (
            "conjunctive",
            vec![("{}", 0.12), ("A", 0.6), ("B", 0.08), ("A|B", 0.2)],
        ),
        ("pcr", vec![("A", 0.69), ("B", 0.11), ("A|B", 0.2)]),
        ("dp", vec![("A", 0.6), ("B", 0.08), ("A|B", 0.32)]),
    ];
    for (rule, table) in expect {
        let out = dir.path().join(format!("{rule}.json"));
        let report = dir.path().join(format!("{rule}.csv"));
        let status = run(&[
            "fuse",
            "--rule",
            rule,
            "--in",
            p(&input),
            "--out",
            p(&out),
            "--report",
            p(&report),
        ]);
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        let m: MassFunction =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(m.focal_count(), table.len());
        for (key, v) in table {
            let set = m.frame().parse_set(key).unwrap();
            assert!((m.mass(set) - v).abs() < 1e-9, "{rule} {key}");
        }
        let report = std::fs::read_to_string(&report).unwrap();
        assert!(report.starts_with("measure,source,value\nconflict,all,0.12"));
        assert_eq!(
            report
                .lines()
                .filter(|l| l.starts_with("auto_conflict_3"))
                .count(),
            2
        );
    }
}

#[test]
fn full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = |name: &str| dir.path().join(name);
    let ok = |args: &[&str]| {
        let out = run(args);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    ok(&[
        "synth",
        "--out",
        p(&d("corpus")),
        "--seed",
        "3",
        "--tiles-per-class",
        "8",
        "--tile-size",
        "24",
    ]);
    ok(&[
        "features",
        "--in",
        p(&d("corpus").join("tiles")),
        "--out",
        p(&d("features.csv")),
    ]);
    ok(&[
        "reality",
        "--in",
        p(&d("corpus").join("annotations.json")),
        "--out",
        p(&d("reality.csv")),
        "--compare-rule",
        "conjunctive",
    ]);
    let reality = std::fs::read_to_string(d("reality.csv")).unwrap();
    assert!(reality.starts_with("tile_id,decided_label,conflict\n"));
    assert_eq!(reality.lines().count(), 25);
    assert!(d("reality.json").exists());

    ok(&[
        "train",
        "--features",
        p(&d("features.csv")),
        "--targets",
        p(&d("reality.json")),
        "--out",
        p(&d("model.json")),
        "--hidden",
        "6",
        "--epochs",
        "20",
    ]);
    ok(&[
        "classify",
        "--model",
        p(&d("model.json")),
        "--features",
        p(&d("features.csv")),
        "--out",
        p(&d("labels.csv")),
    ]);
    let labels = std::fs::read_to_string(d("labels.csv")).unwrap();
    assert!(labels.starts_with("tile_id,label\n"));
    assert_eq!(labels.lines().count(), 25);

    ok(&[
        "eval",
        "--features",
        p(&d("features.csv")),
        "--annotations",
        p(&d("corpus").join("annotations.json")),
        "--labels",
        p(&d("corpus").join("labels.csv")),
        "--trials",
        "3",
        "--hidden",
        "6",
        "--epochs",
        "20",
        "--target-mode",
        "crisp",
        "--out",
        p(&d("eval.csv")),
    ]);
    let eval = std::fs::read_to_string(d("eval.csv")).unwrap();
    assert!(eval.contains("targets=crisp"));
    assert_eq!(
        eval.lines()
            .filter(|l| l.starts_with(char::is_numeric))
            .count(),
        4
    );
}
