//! Seeded benchmark runs and their per-size aggregation.
//!
//! Seeds: size `n` gets `derive_seed(master, [n])`; graph `k` of that size
//! is generated exactly like member `k` of `generate_batch` under the size
//! seed; solver `s` on that graph runs with `derive_seed(graph_seed, [tag(s)])`.

use std::time::Instant;

use aiaco_core::gen::batch_seed;
use aiaco_core::seed::derive_seed;
use aiaco_core::stats::{
    descriptive, mann_whitney_u, paired_t_test, spearman, wilcoxon_signed_rank, TestResult,
};
use aiaco_core::{
    generate_instance, instance_characteristics, solve, GenConfig, InstanceCharacteristics,
    SolverKind,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{BenchError, Result};

pub fn size_seed(master_seed: u64, n: usize) -> u64 {
    derive_seed(master_seed, &[n as u64])
}

pub fn graph_seed(master_seed: u64, n: usize, graph_id: usize) -> u64 {
    batch_seed(size_seed(master_seed, n), graph_id)
}

pub fn run_seed(master_seed: u64, n: usize, graph_id: usize, solver: SolverKind) -> u64 {
    derive_seed(graph_seed(master_seed, n, graph_id), &[solver.tag()])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub graph_id: usize,
    pub n: usize,
    pub solver: SolverKind,
    pub tour_length: f64,
    pub wall_time_s: f64,
    pub seed: u64,
    pub characteristics: InstanceCharacteristics,
    /// Other runs were executing at the same time.
    pub concurrent: bool,
}

/// A graph or run that could not be completed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunError {
    pub n: usize,
    pub graph_id: usize,
    /// `None` when generating the instance itself failed.
    pub solver: Option<SolverKind>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation; absent for a single observation.
    pub std: Option<f64>,
}

impl MeanStd {
    fn of(values: &[f64]) -> Option<Self> {
        let d = descriptive(values).ok()?;
        Some(Self {
            mean: d.mean,
            std: (!d.single_sample).then_some(d.std),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub solver: SolverKind,
    pub runs: usize,
    pub length: MeanStd,
    pub time: MeanStd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphImprovement {
    pub graph_id: usize,
    pub aco_length: f64,
    pub ai_aco_length: f64,
    pub improvement_pct: f64,
}

/// Improvement of the active-inference colony over basic ACO, in percent
/// of the basic ACO length.
pub fn improvement_pct(aco_length: f64, ai_aco_length: f64) -> f64 {
    (aco_length - ai_aco_length) / aco_length * 100.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTests {
    pub length_paired_t: Option<TestResult>,
    pub length_wilcoxon: Option<TestResult>,
    pub length_mann_whitney: Option<TestResult>,
    pub time_paired_t: Option<TestResult>,
    /// Why a test is missing.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub characteristic: String,
    pub result: Option<TestResult>,
    pub note: Option<String>,
}

/// Basic ACO against the active-inference colony over the graphs where
/// both finished.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub pairs: usize,
    pub per_graph: Vec<GraphImprovement>,
    pub improvement_pct: MeanStd,
    pub time_increase_s: f64,
    pub time_increase_pct: f64,
    pub tests: ComparisonTests,
    pub correlations: Vec<Correlation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub n: usize,
    pub graphs: usize,
    pub solvers: Vec<SolverSummary>,
    pub comparison: Option<Comparison>,
}

impl SizeSummary {
    pub fn solver(&self, kind: SolverKind) -> Option<&SolverSummary> {
        self.solvers.iter().find(|s| s.solver == kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub sequential: bool,
    /// Some graph or run failed; see `errors`.
    pub partial: bool,
    pub runs: Vec<RunRecord>,
    pub errors: Vec<RunError>,
    pub sizes: Vec<SizeSummary>,
}

impl Report {
    pub fn size(&self, n: usize) -> Option<&SizeSummary> {
        self.sizes.iter().find(|s| s.n == n)
    }
}

#[derive(Default)]
struct GraphOutcome {
    runs: Vec<RunRecord>,
    errors: Vec<RunError>,
}

fn run_graph(
    config: &ExperimentConfig,
    n: usize,
    graph_id: usize,
    concurrent: bool,
) -> GraphOutcome {
    let mut out = GraphOutcome::default();
    let gen = GenConfig {
        n,
        distribution: config.distribution,
        ..GenConfig::default()
    };
    let instance = match generate_instance(&gen, graph_seed(config.master_seed, n, graph_id)) {
        Ok(instance) => instance,
        Err(e) => {
            out.errors.push(RunError {
                n,
                graph_id,
                solver: None,
                message: e.to_string(),
            });
            return out;
        }
    };
    let characteristics = instance_characteristics(&instance);
    for &solver in &config.solvers {
        let seed = run_seed(config.master_seed, n, graph_id, solver);
        let clock = Instant::now();
        let result = solve(solver, &instance, &config.aco_params, seed);
        let wall_time_s = clock.elapsed().as_secs_f64();
        match result {
            Ok(r) => out.runs.push(RunRecord {
                graph_id,
                n,
                solver,
                tour_length: r.best_length,
                wall_time_s,
                seed,
                characteristics,
                concurrent,
            }),
            Err(e) => out.errors.push(RunError {
                n,
                graph_id,
                solver: Some(solver),
                message: e.to_string(),
            }),
        }
    }
    out
}

/// Generates every graph, runs every selected solver on it and aggregates.
/// Non-timing fields are a pure function of `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let mut sizes = config.node_sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let units: Vec<(usize, usize)> = sizes
        .iter()
        .flat_map(|&n| (0..config.graphs_per_size).map(move |g| (n, g)))
        .collect();

    let outcomes: Vec<GraphOutcome> = if config.sequential() {
        units
            .iter()
            .map(|&(n, g)| run_graph(config, n, g, false))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| {
                BenchError::Config(format!("cannot start {} workers: {e}", config.jobs))
            })?;
        pool.install(|| {
            units
                .par_iter()
                .map(|&(n, g)| run_graph(config, n, g, true))
                .collect()
        })
    };

    let mut runs = Vec::new();
    let mut errors = Vec::new();
    for o in outcomes {
        runs.extend(o.runs);
        errors.extend(o.errors);
    }
    Ok(build_report(config.clone(), runs, errors))
}

/// Sorts the runs and computes every per-size block.
pub fn build_report(
    config: ExperimentConfig,
    mut runs: Vec<RunRecord>,
    mut errors: Vec<RunError>,
) -> Report {
    runs.sort_by_key(|r| (r.n, r.graph_id, r.solver));
    errors.sort_by_key(|e| (e.n, e.graph_id, e.solver));
    let mut ns: Vec<usize> = runs.iter().map(|r| r.n).collect();
    ns.dedup();
    let sizes = ns.iter().map(|&n| summarize_size(n, &runs)).collect();
    Report {
        sequential: config.sequential(),
        partial: !errors.is_empty(),
        config,
        runs,
        errors,
        sizes,
    }
}

fn summarize_size(n: usize, all_runs: &[RunRecord]) -> SizeSummary {
    let runs: Vec<&RunRecord> = all_runs.iter().filter(|r| r.n == n).collect();
    let mut graph_ids: Vec<usize> = runs.iter().map(|r| r.graph_id).collect();
    graph_ids.dedup();

    let mut solvers = Vec::new();
    for kind in SolverKind::ALL {
        let mine: Vec<&&RunRecord> = runs.iter().filter(|r| r.solver == kind).collect();
        let lengths: Vec<f64> = mine.iter().map(|r| r.tour_length).collect();
        let times: Vec<f64> = mine.iter().map(|r| r.wall_time_s).collect();
        if let (Some(length), Some(time)) = (MeanStd::of(&lengths), MeanStd::of(&times)) {
            solvers.push(SolverSummary {
                solver: kind,
                runs: mine.len(),
                length,
                time,
            });
        }
    }
    SizeSummary {
        n,
        graphs: graph_ids.len(),
        solvers,
        comparison: compare(&runs),
    }
}

fn compare(runs: &[&RunRecord]) -> Option<Comparison> {
    let find =
        |g: usize, kind: SolverKind| runs.iter().find(|r| r.graph_id == g && r.solver == kind);
    let mut pairs: Vec<(&RunRecord, &RunRecord)> = Vec::new();
    for r in runs.iter().filter(|r| r.solver == SolverKind::Aco) {
        if let Some(ai) = find(r.graph_id, SolverKind::AiAco) {
            pairs.push((r, ai));
        }
    }
    if pairs.is_empty() {
        return None;
    }

    let per_graph: Vec<GraphImprovement> = pairs
        .iter()
        .map(|(aco, ai)| GraphImprovement {
            graph_id: aco.graph_id,
            aco_length: aco.tour_length,
            ai_aco_length: ai.tour_length,
            improvement_pct: improvement_pct(aco.tour_length, ai.tour_length),
        })
        .collect();
    let improvements: Vec<f64> = per_graph.iter().map(|g| g.improvement_pct).collect();
    let aco_len: Vec<f64> = pairs.iter().map(|p| p.0.tour_length).collect();
    let ai_len: Vec<f64> = pairs.iter().map(|p| p.1.tour_length).collect();
    let aco_time: Vec<f64> = pairs.iter().map(|p| p.0.wall_time_s).collect();
    let ai_time: Vec<f64> = pairs.iter().map(|p| p.1.wall_time_s).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let time_increase_s = mean(&ai_time) - mean(&aco_time);
    let time_increase_pct = time_increase_s / mean(&aco_time) * 100.0;

    let mut notes = Vec::new();
    let mut attempt = |label: &str, r: aiaco_core::Result<TestResult>| match r {
        Ok(t) => Some(t),
        Err(e) => {
            notes.push(format!("{label}: {e}"));
            None
        }
    };
    let length_paired_t = attempt("length paired t", paired_t_test(&aco_len, &ai_len));
    let length_wilcoxon = attempt("length wilcoxon", wilcoxon_signed_rank(&aco_len, &ai_len));
    let length_mann_whitney = attempt("length mann-whitney", mann_whitney_u(&aco_len, &ai_len));
    let time_paired_t = attempt("time paired t", paired_t_test(&aco_time, &ai_time));
    let tests = ComparisonTests {
        length_paired_t,
        length_wilcoxon,
        length_mann_whitney,
        time_paired_t,
        notes,
    };

    type Column = (&'static str, fn(&InstanceCharacteristics) -> f64);
    let characteristic_columns: [Column; 5] = [
        ("density", |c| c.density),
        ("avg_edge_weight", |c| c.avg_edge_weight),
        ("std_edge_weight", |c| c.std_edge_weight),
        ("cv_edge_weight", |c| c.cv_edge_weight),
        ("edge_weight_range", |c| c.edge_weight_range),
    ];
    let correlations = characteristic_columns
        .iter()
        .map(|(name, get)| {
            let column: Vec<f64> = pairs.iter().map(|p| get(&p.0.characteristics)).collect();
            match spearman(&column, &improvements) {
                Ok(r) => Correlation {
                    characteristic: name.to_string(),
                    result: Some(r),
                    note: None,
                },
                Err(e) => Correlation {
                    characteristic: name.to_string(),
                    result: None,
                    note: Some(e.to_string()),
                },
            }
        })
        .collect();

    Some(Comparison {
        pairs: pairs.len(),
        improvement_pct: MeanStd::of(&improvements).expect("at least one pair"),
        per_graph,
        time_increase_s,
        time_increase_pct,
        tests,
        correlations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use aiaco_core::AcoParams;
    use std::collections::HashSet;

    fn small(solvers: Vec<SolverKind>) -> ExperimentConfig {
        ExperimentConfig {
            node_sizes: vec![12, 8],
            graphs_per_size: 4,
            solvers,
            aco_params: AcoParams {
                num_ants: 4,
                num_iterations: 10,
                ..AcoParams::default()
            },
            master_seed: 11,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn runs_are_sorted_and_complete() {
        let report = run_experiment(&small(SolverKind::ALL.to_vec())).unwrap();
        assert_eq!(report.runs.len(), 2 * 4 * 3);
        assert!(!report.partial && report.sequential);
        let keys: Vec<_> = report
            .runs
            .iter()
            .map(|r| (r.n, r.graph_id, r.solver))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(
            report.sizes.iter().map(|s| s.n).collect::<Vec<_>>(),
            vec![8, 12]
        );
        for r in &report.runs {
            assert!(r.tour_length > 0.0 && r.wall_time_s >= 0.0 && !r.concurrent);
        }
    }

    #[test]
    fn improvement_matches_lengths() {
        let report = run_experiment(&small(SolverKind::ALL.to_vec())).unwrap();
        for size in &report.sizes {
            let cmp = size.comparison.as_ref().unwrap();
            assert_eq!(cmp.pairs, 4);
            assert_eq!(cmp.correlations.len(), 5);
            for g in &cmp.per_graph {
                let aco = report
                    .runs
                    .iter()
                    .find(|r| {
                        r.n == size.n && r.graph_id == g.graph_id && r.solver == SolverKind::Aco
                    })
                    .unwrap();
                let ai = report
                    .runs
                    .iter()
                    .find(|r| {
                        r.n == size.n && r.graph_id == g.graph_id && r.solver == SolverKind::AiAco
                    })
                    .unwrap();
                assert_eq!(
                    g.improvement_pct,
                    (aco.tour_length - ai.tour_length) / aco.tour_length * 100.0
                );
            }
        }
    }

    #[test]
    fn single_solver_has_no_comparison() {
        let report = run_experiment(&small(vec![SolverKind::Nn])).unwrap();
        assert!(report
            .sizes
            .iter()
            .all(|s| s.comparison.is_none() && s.solvers.len() == 1));
    }

    #[test]
    fn parallel_matches_sequential_lengths() {
        let seq = run_experiment(&small(SolverKind::ALL.to_vec())).unwrap();
        let par = run_experiment(&ExperimentConfig {
            jobs: 3,
            ..small(SolverKind::ALL.to_vec())
        })
        .unwrap();
        assert!(!par.sequential && par.runs.iter().all(|r| r.concurrent));
        let lengths = |r: &Report| {
            r.runs
                .iter()
                .map(|x| (x.n, x.graph_id, x.solver, x.tour_length, x.seed))
                .collect::<Vec<_>>()
        };
        assert_eq!(lengths(&seq), lengths(&par));
    }

    #[test]
    fn seeds_are_pairwise_distinct() {
        let report = run_experiment(&small(SolverKind::ALL.to_vec())).unwrap();
        let seeds: HashSet<u64> = report.runs.iter().map(|r| r.seed).collect();
        assert_eq!(seeds.len(), report.runs.len());
    }

    #[test]
    fn failures_become_error_rows() {
        let config = small(SolverKind::ALL.to_vec());
        let ok = run_experiment(&config).unwrap();
        let mut runs = ok.runs.clone();
        runs.retain(|r| !(r.n == 8 && r.graph_id == 1 && r.solver == SolverKind::AiAco));
        let errors = vec![RunError {
            n: 8,
            graph_id: 1,
            solver: Some(SolverKind::AiAco),
            message: "boom".into(),
        }];
        let report = build_report(config, runs, errors);
        assert!(report.partial);
        assert_eq!(
            report.size(8).unwrap().comparison.as_ref().unwrap().pairs,
            3
        );
    }

    #[test]
    fn invalid_config_is_rejected() {
        assert!(run_experiment(&ExperimentConfig {
            node_sizes: vec![],
            ..small(vec![SolverKind::Nn])
        })
        .is_err());
    }
}
