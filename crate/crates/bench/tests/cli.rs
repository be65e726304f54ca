use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn aiaco(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aiaco"))
        .args(args)
        .current_dir(cwd)
        .env_remove("AIACO_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_matrix(dir: &Path, name: &str, n: usize) -> String {
    let mut text = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| {
                if i == j {
                    "0".into()
                } else {
                    ((i * 7 + j * 7) % 11 + 1).to_string()
                }
            })
            .collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_matrix(dir.path(), "g.txt", 10);
    let run = || {
        aiaco(
            &["solve", "--solver", "ai_aco", "--seed", "42", &file],
            dir.path(),
        )
    };
    let (a, b) = (run(), run());
    assert!(a.status.success(), "{}", stderr(&a));
    let length = |o: &Output| {
        stdout(o)
            .lines()
            .find(|l| l.starts_with("length:"))
            .unwrap()
            .to_string()
    };
    assert_eq!(length(&a), length(&b));
    let tour = |o: &Output| {
        stdout(o)
            .lines()
            .find(|l| l.starts_with("tour:"))
            .unwrap()
            .to_string()
    };
    assert_eq!(tour(&a), tour(&b));
    assert_eq!(tour(&a).split_whitespace().count(), 11);
}

#[test]
fn solve_prints_json_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_matrix(dir.path(), "g.txt", 6);
    let o = aiaco(
        &["--format", "json", "solve", "--solver", "nn", &file],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["solver"], "nn");
    assert_eq!(doc["tour"].as_array().unwrap().len(), 6);
}

#[test]
fn bench_writes_table_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = aiaco(
        &[
            "bench", "--sizes", "25", "--graphs", "5", "--seed", "1", "--out", "res",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(dir.path().join("res/summary.csv")).unwrap();
    let labels: Vec<&str> = summary
        .lines()
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(
        labels,
        vec![
            "Metric",
            "NN Tour Length (mean)",
            "NN Tour Length (std)",
            "ACO Tour Length (mean)",
            "ACO Tour Length (std)",
            "AI ACO Tour Length (mean)",
            "AI ACO Tour Length (std)",
            "Improvement % (mean)",
            "Improvement % (std)",
            "NN Time s (mean)",
            "NN Time s (std)",
            "ACO Time s (mean)",
            "ACO Time s (std)",
            "AI ACO Time s (mean)",
            "AI ACO Time s (std)",
            "Time Increase s",
            "Time Increase %",
        ]
    );
    assert!(summary.starts_with("Metric,25 Nodes\n"));
    let runs = fs::read_to_string(dir.path().join("res/runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 5 * 3);
    assert!(dir.path().join("res/tests.csv").exists());
}

#[test]
fn bench_honours_the_output_directory_variable() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_aiaco"))
        .args([
            "bench",
            "--sizes",
            "6",
            "--graphs",
            "2",
            "--solvers",
            "nn",
            "--format",
            "json",
        ])
        .current_dir(dir.path())
        .env("AIACO_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("from-env/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["runs"].as_array().unwrap().len(), 2);
    assert!(report["sizes"][0]["comparison"].is_null());
}

#[test]
fn bench_reads_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("exp.toml"),
        "node_sizes = [7]\ngraphs_per_size = 3\nsolvers = [\"aco\", \"ai_aco\"]\nmaster_seed = 5\n[aco_params]\nnum_iterations = 5\n",
    )
    .unwrap();
    let o = aiaco(&["bench", "--config", "exp.toml", "--out", "r"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let runs = fs::read_to_string(dir.path().join("r/runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 3 * 2);
    assert!(runs
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(1) == Some("7")));
}

#[test]
fn gen_output_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let o = aiaco(
        &[
            "gen", "--n", "9", "--count", "2", "--seed", "3", "--out", "g",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let files: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(files.len(), 2);
    let o = aiaco(&["oracle", &files[0]], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("length: "));
}

#[test]
fn oracle_refuses_large_instances() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_matrix(dir.path(), "big.txt", 12);
    let o = aiaco(&["oracle", &file], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("12"), "{}", stderr(&o));
}

#[test]
fn stats_runs_the_battery() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("d.csv"), "x,y\n1,0\n2,0\n3,0\n4,0\n5,0\n").unwrap();
    let o = aiaco(&["stats", "d.csv", "--a", "x", "--b", "y"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let t_line = out.lines().find(|l| l.starts_with("paired_t,")).unwrap();
    let p: f64 = t_line.split(',').nth(2).unwrap().parse().unwrap();
    assert!((p - 0.0132).abs() < 0.0005, "{out}");
    assert!(out.lines().any(|l| l.starts_with("wilcoxon,")));
    assert!(out.lines().any(|l| l.starts_with("mann_whitney,")));
    assert!(out.lines().any(|l| l.starts_with("spearman,")));

    let o = aiaco(&["stats", "d.csv", "--a", "x", "--b", "nope"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("nope"));
}

#[test]
fn bad_input_fails_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("asym.txt"), "2\n0 1\n2 0\n").unwrap();
    let o = aiaco(&["solve", "asym.txt"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("asymmetric"), "{}", stderr(&o));

    let o = aiaco(&["solve", "missing.txt"], dir.path());
    assert_eq!(o.status.code(), Some(1));

    let o = aiaco(&["--rho", "1.5", "solve", "asym.txt"], dir.path());
    assert!(!o.status.success());
}

#[test]
fn unknown_flags_and_subcommands_print_usage() {
    let dir = tempfile::tempdir().unwrap();
    for args in [vec!["frobnicate"], vec!["bench", "--bogus"], vec![]] {
        let o = aiaco(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains("Usage"), "{args:?}: {}", stderr(&o));
    }
    let o = aiaco(&["--help"], dir.path());
    assert!(o.status.success());
    for sub in ["gen", "solve", "bench", "stats", "oracle"] {
        assert!(stdout(&o).contains(sub));
    }
}
