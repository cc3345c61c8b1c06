//! Experiment harness for hard-core thinning studies.
//!
//! [`run`] executes one configured experiment: replicates run in parallel on
//! a dedicated pool and are collected in replicate order, so the metric
//! columns of the CSV do not depend on the number of workers.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::PathBuf;

use rayon::prelude::*;
use thiserror::Error;

pub use config::{parse_config, ConfigError, ExperimentConfig, ExperimentKind};
pub use output::{Row, Summary};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "HARDCORE_THIN_THREADS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Rows and summary of a finished run.
pub struct RunOutput {
    pub rows: Vec<Row>,
    pub summary: Summary,
    pub csv: PathBuf,
    pub json: PathBuf,
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Result<Option<usize>, HarnessError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(HarnessError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

/// Computes all rows of `config` with at most `threads` workers.
pub fn compute(config: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<Row>, HarnessError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| HarnessError::Pool(e.to_string()))?;
    let per_replicate: Vec<Vec<Row>> =
        pool.install(|| (0..config.replicates).into_par_iter().map(|i| experiments::replicate(config, i)).collect());
    Ok(per_replicate.into_iter().flatten().collect())
}

fn io(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

/// Runs the experiment and writes `<out>/<experiment>.csv` and
/// `<out>/<experiment>.summary.json`.
pub fn run(config: &ExperimentConfig, threads: Option<usize>) -> Result<RunOutput, HarnessError> {
    let rows = compute(config, threads)?;
    let layout = experiments::layout(config.experiment);
    let summary = output::build_summary(config, &layout, &rows, experiments::assess(config, &rows));
    std::fs::create_dir_all(&config.out).map_err(io(&config.out))?;
    let name = config.experiment.name();
    let csv = config.out.join(format!("{name}.csv"));
    let json = config.out.join(format!("{name}.summary.json"));
    output::write_csv(&csv, name, &layout, &rows, config.record_wall_time).map_err(io(&csv))?;
    output::write_summary(&json, &summary).map_err(io(&json))?;
    Ok(RunOutput { rows, summary, csv, json })
}
