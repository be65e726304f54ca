//! Benchmark harness: instance files, seeded experiments over the three
//! solvers, per-size aggregation with the statistical battery, report
//! files and the `aiaco` command line.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod report;

pub use config::{ExperimentConfig, OutputFormat};
pub use error::{BenchError, Result};
pub use experiment::{run_experiment, Report, RunRecord};
pub use io::{load_instance, write_matrix, InstanceFormat};
pub use report::write_report;
