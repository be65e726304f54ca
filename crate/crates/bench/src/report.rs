//! Report emission: CSV tables or one JSON document.

use std::fs;
use std::path::{Path, PathBuf};

use aiaco_core::stats::TestResult;
use aiaco_core::SolverKind;

use crate::config::OutputFormat;
use crate::error::{BenchError, Result};
use crate::experiment::{MeanStd, Report, SizeSummary};

pub const RUNS_HEADER: [&str; 11] = [
    "graph_id",
    "n",
    "solver",
    "tour_length",
    "wall_time_s",
    "seed",
    "density",
    "avg_edge_weight",
    "std_edge_weight",
    "cv_edge_weight",
    "edge_weight_range",
];

/// Formats like C's `%.6g`: six significant digits, trailing zeros
/// dropped, scientific notation outside `[1e-4, 1e6)`.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    // the exponent after rounding to six digits
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa.to_string()),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

fn solver_label(kind: SolverKind) -> &'static str {
    match kind {
        SolverKind::Nn => "NN",
        SolverKind::Aco => "ACO",
        SolverKind::AiAco => "AI ACO",
    }
}

/// Rows of the summary table, one value per size.
type Row = (String, Vec<Option<f64>>);

pub fn summary_rows(report: &Report) -> Vec<Row> {
    let sizes = &report.sizes;
    let per = |f: &dyn Fn(&SizeSummary) -> Option<f64>| sizes.iter().map(f).collect::<Vec<_>>();
    let solvers: Vec<SolverKind> = SolverKind::ALL
        .into_iter()
        .filter(|k| sizes.iter().any(|s| s.solver(*k).is_some()))
        .collect();
    let has_comparison = sizes.iter().any(|s| s.comparison.is_some());
    let mut rows: Vec<Row> = Vec::new();

    let stat = |m: &MeanStd, mean: bool| if mean { Some(m.mean) } else { m.std };
    for &k in &solvers {
        for mean in [true, false] {
            let label = format!(
                "{} Tour Length ({})",
                solver_label(k),
                if mean { "mean" } else { "std" }
            );
            rows.push((
                label,
                per(&|s| s.solver(k).and_then(|x| stat(&x.length, mean))),
            ));
        }
    }
    if has_comparison {
        rows.push((
            "Improvement % (mean)".into(),
            per(&|s| s.comparison.as_ref().map(|c| c.improvement_pct.mean)),
        ));
        rows.push((
            "Improvement % (std)".into(),
            per(&|s| s.comparison.as_ref().and_then(|c| c.improvement_pct.std)),
        ));
    }
    for &k in &solvers {
        for mean in [true, false] {
            let label = format!(
                "{} Time s ({})",
                solver_label(k),
                if mean { "mean" } else { "std" }
            );
            rows.push((
                label,
                per(&|s| s.solver(k).and_then(|x| stat(&x.time, mean))),
            ));
        }
    }
    if has_comparison {
        rows.push((
            "Time Increase s".into(),
            per(&|s| s.comparison.as_ref().map(|c| c.time_increase_s)),
        ));
        rows.push((
            "Time Increase %".into(),
            per(&|s| s.comparison.as_ref().map(|c| c.time_increase_pct)),
        ));
    }
    rows
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| BenchError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_runs_csv(report: &Report, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(RUNS_HEADER)?;
    for r in &report.runs {
        let c = &r.characteristics;
        w.write_record([
            r.graph_id.to_string(),
            r.n.to_string(),
            r.solver.to_string(),
            fmt_sig(r.tour_length),
            fmt_sig(r.wall_time_s),
            r.seed.to_string(),
            fmt_sig(c.density),
            fmt_sig(c.avg_edge_weight),
            fmt_sig(c.std_edge_weight),
            fmt_sig(c.cv_edge_weight),
            fmt_sig(c.edge_weight_range),
        ])?;
    }
    w.flush().map_err(|e| BenchError::io(path, e))
}

pub fn write_summary_csv(report: &Report, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["Metric".to_string()];
    header.extend(report.sizes.iter().map(|s| format!("{} Nodes", s.n)));
    w.write_record(&header)?;
    for (label, values) in summary_rows(report) {
        let mut record = vec![label];
        record.extend(values.into_iter().map(opt));
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| BenchError::io(path, e))
}

fn test_cells(t: &TestResult) -> [String; 4] {
    [
        fmt_sig(t.statistic),
        fmt_sig(t.p_value),
        t.n_effective.to_string(),
        t.degenerate.map(|d| format!("{d:?}")).unwrap_or_default(),
    ]
}

pub fn write_tests_csv(report: &Report, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "n",
        "test",
        "statistic",
        "p_value",
        "n_effective",
        "degenerate",
    ])?;
    for size in &report.sizes {
        let Some(cmp) = &size.comparison else {
            continue;
        };
        let t = &cmp.tests;
        for (name, result) in [
            ("length_paired_t", &t.length_paired_t),
            ("length_wilcoxon", &t.length_wilcoxon),
            ("length_mann_whitney", &t.length_mann_whitney),
            ("time_paired_t", &t.time_paired_t),
        ] {
            if let Some(r) = result {
                let mut record = vec![size.n.to_string(), name.to_string()];
                record.extend(test_cells(r));
                w.write_record(&record)?;
            }
        }
    }
    w.flush().map_err(|e| BenchError::io(path, e))
}

pub fn write_correlations_csv(report: &Report, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "n",
        "characteristic",
        "rho",
        "p_value",
        "n_effective",
        "degenerate",
    ])?;
    for size in &report.sizes {
        let Some(cmp) = &size.comparison else {
            continue;
        };
        for c in &cmp.correlations {
            if let Some(r) = &c.result {
                let mut record = vec![size.n.to_string(), c.characteristic.clone()];
                record.extend(test_cells(r));
                w.write_record(&record)?;
            }
        }
    }
    w.flush().map_err(|e| BenchError::io(path, e))
}

pub fn write_errors_csv(report: &Report, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["n", "graph_id", "solver", "message"])?;
    for e in &report.errors {
        w.write_record([
            e.n.to_string(),
            e.graph_id.to_string(),
            e.solver.map(|s| s.to_string()).unwrap_or_default(),
            e.message.clone(),
        ])?;
    }
    w.flush().map_err(|e| BenchError::io(path, e))
}

/// Writes the report into directory `dir` and returns the files written.
///
/// CSV: `runs.csv`, `summary.csv`, `tests.csv`, `correlations.csv` and,
/// when something failed, `errors.csv`. JSON: `report.json`.
pub fn write_report(report: &Report, format: OutputFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let mut written = Vec::new();
    match format {
        OutputFormat::Csv => {
            type Writer = fn(&Report, &Path) -> Result<()>;
            let mut outputs: Vec<(&str, Writer)> = vec![
                ("runs.csv", write_runs_csv),
                ("summary.csv", write_summary_csv),
                ("tests.csv", write_tests_csv),
                ("correlations.csv", write_correlations_csv),
            ];
            if !report.errors.is_empty() {
                outputs.push(("errors.csv", write_errors_csv));
            }
            for (name, write) in outputs {
                let path = dir.join(name);
                write(report, &path)?;
                written.push(path);
            }
        }
        OutputFormat::Json => {
            let path = dir.join("report.json");
            let text = serde_json::to_string_pretty(report)?;
            fs::write(&path, text).map_err(|e| BenchError::io(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}

pub fn read_report_json(path: &Path) -> Result<Report> {
    let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (123.456789, "123.457"),
            (0.000123456789, "0.000123457"),
            (1234567.0, "1.23457e+06"),
            (999999.5, "1e+06"),
            (0.00001, "1e-05"),
            (0.0001, "0.0001"),
            (-2.5, "-2.5"),
            (9.9999996, "10"),
            (f64::INFINITY, "inf"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_sig(x), s, "{x}");
        }
    }

    #[test]
    fn labels() {
        assert_eq!(solver_label(SolverKind::AiAco), "AI ACO");
    }
}
