use std::fs;

use aiaco_bench::config::{ExperimentConfig, OutputFormat};
use aiaco_bench::experiment::{build_report, improvement_pct, run_experiment, Report};
use aiaco_bench::io::{load_instance, write_matrix, InstanceFormat};
use aiaco_bench::report::{read_report_json, write_report, RUNS_HEADER};
use aiaco_core::{generate_instance, AcoParams, GenConfig, SolverKind};

fn config() -> ExperimentConfig {
    ExperimentConfig {
        node_sizes: vec![10, 14],
        graphs_per_size: 5,
        aco_params: AcoParams {
            num_ants: 5,
            num_iterations: 20,
            ..AcoParams::default()
        },
        master_seed: 21,
        ..ExperimentConfig::default()
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * a.abs().max(1.0)
}

fn assert_aggregates_close(a: &Report, b: &Report) {
    assert_eq!(a.sizes.len(), b.sizes.len());
    for (x, y) in a.sizes.iter().zip(&b.sizes) {
        assert_eq!(x.n, y.n);
        for (s, t) in x.solvers.iter().zip(&y.solvers) {
            assert_eq!(s.solver, t.solver);
            assert!(close(s.length.mean, t.length.mean) && close(s.time.mean, t.time.mean));
        }
        let (cx, cy) = (
            x.comparison.as_ref().unwrap(),
            y.comparison.as_ref().unwrap(),
        );
        assert!(close(cx.improvement_pct.mean, cy.improvement_pct.mean));
        assert!(close(cx.time_increase_pct, cy.time_increase_pct));
        let (tx, ty) = (
            cx.tests.time_paired_t.as_ref().unwrap(),
            cy.tests.time_paired_t.as_ref().unwrap(),
        );
        assert!(close(tx.p_value, ty.p_value));
    }
}

#[test]
fn json_round_trip() {
    let report = run_experiment(&config()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = write_report(&report, OutputFormat::Json, dir.path()).unwrap();
    assert_eq!(files, vec![dir.path().join("report.json")]);
    let back = read_report_json(&files[0]).unwrap();
    assert_aggregates_close(&report, &back);
    assert_eq!(back.runs, report.runs);
}

#[test]
fn csv_files_have_pinned_columns() {
    let report = run_experiment(&config()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = write_report(&report, OutputFormat::Csv, dir.path()).unwrap();
    let names: Vec<String> = files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        names,
        ["runs.csv", "summary.csv", "tests.csv", "correlations.csv"]
    );

    let runs = fs::read_to_string(dir.path().join("runs.csv")).unwrap();
    let mut lines = runs.lines();
    assert_eq!(lines.next().unwrap(), RUNS_HEADER.join(","));
    assert_eq!(lines.count(), report.runs.len());

    let tests = fs::read_to_string(dir.path().join("tests.csv")).unwrap();
    assert!(tests.lines().any(|l| l.starts_with("10,length_paired_t,")));
    assert!(tests.lines().any(|l| l.starts_with("14,time_paired_t,")));
    let correlations = fs::read_to_string(dir.path().join("correlations.csv")).unwrap();
    assert!(correlations.lines().any(|l| l.starts_with("14,density,")));
}

#[test]
fn empty_run_list_gives_header_only_csv() {
    let report = build_report(config(), Vec::new(), Vec::new());
    let dir = tempfile::tempdir().unwrap();
    write_report(&report, OutputFormat::Csv, dir.path()).unwrap();
    let runs = fs::read_to_string(dir.path().join("runs.csv")).unwrap();
    assert_eq!(runs, format!("{}\n", RUNS_HEADER.join(",")));
    assert_eq!(
        fs::read_to_string(dir.path().join("summary.csv")).unwrap(),
        "Metric\n"
    );
}

#[test]
fn unwritable_destination_is_an_error() {
    let report = build_report(config(), Vec::new(), Vec::new());
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    assert!(write_report(&report, OutputFormat::Csv, &blocker).is_err());
}

#[test]
fn rerun_gives_identical_non_timing_fields() {
    let a = run_experiment(&config()).unwrap();
    let b = run_experiment(&config()).unwrap();
    let strip = |r: &Report| {
        r.runs
            .iter()
            .map(|x| (x.n, x.graph_id, x.solver, x.tour_length, x.seed))
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&a), strip(&b));
    for (x, y) in a.sizes.iter().zip(&b.sizes) {
        let (cx, cy) = (
            x.comparison.as_ref().unwrap(),
            y.comparison.as_ref().unwrap(),
        );
        assert_eq!(cx.per_graph, cy.per_graph);
        assert_eq!(cx.tests.length_paired_t, cy.tests.length_paired_t);
        assert_eq!(cx.correlations, cy.correlations);
    }
}

#[test]
fn improvement_identity_holds_for_every_graph() {
    let report = run_experiment(&config()).unwrap();
    for size in &report.sizes {
        for g in &size.comparison.as_ref().unwrap().per_graph {
            let len = |kind| {
                report
                    .runs
                    .iter()
                    .find(|r| r.n == size.n && r.graph_id == g.graph_id && r.solver == kind)
                    .unwrap()
                    .tour_length
            };
            assert_eq!(
                g.improvement_pct,
                (len(SolverKind::Aco) - len(SolverKind::AiAco)) / len(SolverKind::Aco) * 100.0
            );
            assert_eq!(
                g.improvement_pct,
                improvement_pct(g.aco_length, g.ai_aco_length)
            );
        }
    }
}

#[test]
fn matrix_files_round_trip_exactly() {
    let inst = generate_instance(&GenConfig::with_n(13), 4).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    write_matrix(&inst, &path).unwrap();
    let back = load_instance(&path, InstanceFormat::Matrix).unwrap();
    assert_eq!(back.weights(), inst.weights());
}

#[test]
fn tsplib_euclidean_pair() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.tsp");
    fs::write(&path, "NAME: pair\nTYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 3 4\nEOF\n").unwrap();
    let inst = load_instance(&path, InstanceFormat::from_path(&path)).unwrap();
    assert_eq!(inst.weight(0, 1), 5.0);
    assert_eq!(inst.weight(1, 0), 5.0);
}
