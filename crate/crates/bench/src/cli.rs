use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use aiaco_core::stats::{
    mann_whitney_u, paired_t_test, spearman, wilcoxon_signed_rank, TestResult,
};
use aiaco_core::tsp::BRUTE_FORCE_MAX_N;
use aiaco_core::{
    brute_force_optimum, generate_batch, solve, AcoParams, DistributionChoice, GenConfig,
    SolverKind,
};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::{default_output_dir, ExperimentConfig, OutputFormat};
use crate::error::{BenchError, Result};
use crate::experiment::{run_experiment, size_seed};
use crate::io::{load_instance, write_matrix, InstanceFormat};
use crate::report::{fmt_sig, summary_rows, write_report};

#[derive(Debug, Parser)]
#[command(
    name = "aiaco",
    version,
    about = "TSP solvers and seeded benchmarks: Nearest Neighbor, ACO and active-inference ACO"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Ants per iteration.
    #[arg(long, global = true)]
    pub ants: Option<usize>,
    /// Colony iterations per run.
    #[arg(long, global = true)]
    pub iterations: Option<usize>,
    /// Pheromone exponent.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Distance exponent.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Evaporation rate.
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    /// Pheromone deposit.
    #[arg(long, global = true)]
    pub deposit: Option<f64>,
    /// Output format: csv or json.
    #[arg(long, global = true)]
    pub format: Option<OutputFormat>,
    /// Output directory (default: $AIACO_OUT_DIR, else ./results).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl GlobalArgs {
    fn apply(&self, params: &mut AcoParams) {
        if let Some(v) = self.ants {
            params.num_ants = v;
        }
        if let Some(v) = self.iterations {
            params.num_iterations = v;
        }
        if let Some(v) = self.alpha {
            params.alpha = v;
        }
        if let Some(v) = self.beta {
            params.beta = v;
        }
        if let Some(v) = self.rho {
            params.evaporation_rate = v;
        }
        if let Some(v) = self.deposit {
            params.pheromone_deposit = v;
        }
    }

    fn params(&self) -> Result<AcoParams> {
        let mut p = AcoParams::default();
        self.apply(&mut p);
        p.validate()?;
        Ok(p)
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(default_output_dir)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate random instances as matrix files.
    Gen {
        /// Nodes per instance.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// random, uniform, normal, exponential or lognormal.
        #[arg(long, default_value = "random")]
        distribution: DistributionChoice,
    },
    /// Solve one instance file with one solver.
    Solve {
        file: PathBuf,
        /// nn, aco or ai_aco.
        #[arg(long, default_value = "ai_aco")]
        solver: SolverKind,
        /// matrix or tsplib (default: by extension, .tsp is TSPLIB).
        #[arg(long)]
        input_format: Option<InstanceFormat>,
    },
    /// Run a seeded benchmark and write the report.
    Bench {
        /// TOML or JSON experiment config; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated node counts.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Graphs per node count.
        #[arg(long)]
        graphs: Option<usize>,
        /// Comma-separated solvers.
        #[arg(long, value_delimiter = ',')]
        solvers: Option<Vec<SolverKind>>,
        /// Weight distribution; random draws one per graph.
        #[arg(long)]
        distribution: Option<DistributionChoice>,
        /// Worker threads; 1 keeps timings free of contention.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Paired t, Wilcoxon, Mann-Whitney and Spearman on two CSV columns.
    Stats {
        file: PathBuf,
        /// First column (header name).
        #[arg(long)]
        a: String,
        /// Second column (header name).
        #[arg(long)]
        b: String,
    },
    /// Exact optimum by exhaustive search.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        input_format: Option<InstanceFormat>,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn line(out: &mut dyn Write, text: impl AsRef<str>) -> Result<()> {
    writeln!(out, "{}", text.as_ref()).map_err(|e| BenchError::io("<stdout>", e))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Gen {
            n,
            count,
            distribution,
        } => {
            let config = GenConfig {
                n: *n,
                distribution: *distribution,
                ..GenConfig::default()
            };
            let seed = size_seed(g.seed.unwrap_or(0), *n);
            let batch = generate_batch(&config, *count, seed)?;
            let dir = g.out_dir();
            std::fs::create_dir_all(&dir).map_err(|e| BenchError::io(&dir, e))?;
            for (k, instance) in batch.iter().enumerate() {
                let path = dir.join(format!("graph-n{n}-{k:03}.txt"));
                write_matrix(instance, &path)?;
                line(out, path.display().to_string())?;
            }
            Ok(())
        }
        Command::Solve {
            file,
            solver,
            input_format,
        } => {
            let instance = load(file, *input_format)?;
            let params = g.params()?;
            let r = solve(*solver, &instance, &params, g.seed.unwrap_or(0))?;
            let order: Vec<String> = r.best_tour.order().iter().map(|v| v.to_string()).collect();
            if g.format == Some(OutputFormat::Json) {
                let doc = json!({
                    "solver": solver,
                    "n": instance.n(),
                    "length": r.best_length,
                    "wall_time_s": r.wall_time,
                    "tour": r.best_tour.order(),
                });
                line(out, serde_json::to_string_pretty(&doc)?)
            } else {
                line(out, format!("solver: {solver}"))?;
                line(out, format!("length: {}", r.best_length))?;
                line(out, format!("time_s: {}", fmt_sig(r.wall_time)))?;
                line(out, format!("tour: {}", order.join(" ")))
            }
        }
        Command::Bench {
            config,
            sizes,
            graphs,
            solvers,
            distribution,
            jobs,
        } => {
            let mut cfg = match config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(v) = sizes {
                cfg.node_sizes.clone_from(v);
            }
            if let Some(v) = graphs {
                cfg.graphs_per_size = *v;
            }
            if let Some(v) = solvers {
                cfg.solvers.clone_from(v);
            }
            if let Some(v) = distribution {
                cfg.distribution = *v;
            }
            if let Some(v) = jobs {
                cfg.jobs = *v;
            }
            if let Some(v) = g.seed {
                cfg.master_seed = v;
            }
            if let Some(v) = g.format {
                cfg.output_format = v;
            }
            if let Some(v) = &g.out {
                cfg.output_path.clone_from(v);
            }
            g.apply(&mut cfg.aco_params);
            cfg.validate()?;

            let report = run_experiment(&cfg)?;
            for path in write_report(&report, cfg.output_format, &cfg.output_path)? {
                line(out, format!("wrote {}", path.display()))?;
            }
            for (label, values) in summary_rows(&report) {
                let cells: Vec<String> = values
                    .into_iter()
                    .map(|v| v.map(fmt_sig).unwrap_or_else(|| "-".into()))
                    .collect();
                line(out, format!("{label:<26} {}", cells.join("  ")))?;
            }
            if report.partial {
                line(
                    out,
                    format!(
                        "warning: {} graph(s) or run(s) failed; see errors.csv",
                        report.errors.len()
                    ),
                )?;
            }
            Ok(())
        }
        Command::Stats { file, a, b } => {
            let (xs, ys) = read_columns(file, a, b)?;
            let battery: [(&str, aiaco_core::Result<TestResult>); 4] = [
                ("paired_t", paired_t_test(&xs, &ys)),
                ("wilcoxon", wilcoxon_signed_rank(&xs, &ys)),
                ("mann_whitney", mann_whitney_u(&xs, &ys)),
                ("spearman", spearman(&xs, &ys)),
            ];
            if g.format == Some(OutputFormat::Json) {
                let doc: serde_json::Map<String, serde_json::Value> = battery
                    .iter()
                    .map(|(name, r)| {
                        let v = match r {
                            Ok(t) => serde_json::to_value(t).unwrap_or(serde_json::Value::Null),
                            Err(e) => json!({ "error": e.to_string() }),
                        };
                        (name.to_string(), v)
                    })
                    .collect();
                return line(out, serde_json::to_string_pretty(&doc)?);
            }
            line(out, "test,statistic,p_value,n_effective,note")?;
            for (name, r) in battery {
                match r {
                    Ok(t) => line(
                        out,
                        format!(
                            "{name},{},{},{},{}",
                            fmt_sig(t.statistic),
                            fmt_sig(t.p_value),
                            t.n_effective,
                            t.degenerate.map(|d| format!("{d:?}")).unwrap_or_default()
                        ),
                    )?,
                    Err(e) => line(out, format!("{name},,,,{e}"))?,
                }
            }
            Ok(())
        }
        Command::Oracle { file, input_format } => {
            let instance = load(file, *input_format)?;
            if instance.n() > BRUTE_FORCE_MAX_N {
                return Err(aiaco_core::Error::TooLarge {
                    n: instance.n(),
                    max: BRUTE_FORCE_MAX_N,
                }
                .into());
            }
            let (tour, length) = brute_force_optimum(&instance)?;
            let order: Vec<String> = tour.order().iter().map(|v| v.to_string()).collect();
            line(out, format!("length: {length}"))?;
            line(out, format!("tour: {}", order.join(" ")))
        }
    }
}

fn load(file: &Path, format: Option<InstanceFormat>) -> Result<aiaco_core::TspInstance> {
    load_instance(
        file,
        format.unwrap_or_else(|| InstanceFormat::from_path(file)),
    )
}

fn read_columns(path: &Path, a: &str, b: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let file = std::fs::File::open(path).map_err(|e| BenchError::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers()?.clone();
    let index = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| BenchError::parse(path, 1, format!("no column named '{name}'")))
    };
    let (ia, ib) = (index(a)?, index(b)?);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record?;
        let line = k + 2;
        let cell = |i: usize| -> Result<f64> {
            let text = record.get(i).unwrap_or("").trim();
            text.parse::<f64>()
                .map_err(|_| BenchError::parse(path, line, format!("'{text}' is not a number")))
        };
        xs.push(cell(ia)?);
        ys.push(cell(ib)?);
    }
    Ok((xs, ys))
}
