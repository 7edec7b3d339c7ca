//! Drivers behind the `qwalk` binary: each experiment reads a JSON config,
//! runs the ensemble machinery and writes CSV/JSON tables into an output
//! directory together with `config_echo.json`, the fully resolved config.
//!
//! Exit codes: 0 success, 2 configuration error, 3 simulation error, 4 I/O
//! error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::config::{Experiment, ExperimentConfig};
use crate::ensemble::{run_ensemble, run_fss, run_profile, run_theta_scan, EnsembleResult};
use crate::noise::NoiseKind;
use crate::observables::{fit_exponential_tail, MomentSeries, ProbabilityDistribution};

/// Name of the subdirectory holding the uncorrelated twin of an experiment.
pub const BASELINE_DIR: &str = "random_baseline";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("simulation error: {0}")]
    Simulation(#[from] crate::Error),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Simulation(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl OutputFormat {
    fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

#[derive(Clone, Debug)]
pub struct Invocation {
    pub experiment: Experiment,
    pub config_path: PathBuf,
    pub overrides: Vec<String>,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    pub with_random_baseline: bool,
}

/// Formats a float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

struct Output<'a> {
    dir: &'a Path,
    format: OutputFormat,
}

impl Output<'_> {
    fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
    }

    fn json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Config(format!("cannot serialize {name}: {e}")))?;
        text.push('\n');
        self.write(name, &text)
    }

    fn table(&self, stem: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        if !self.format.csv() {
            return Ok(());
        }
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.write(&format!("{stem}.csv"), &text)
    }

    fn table_json<T: Serialize + ?Sized>(&self, stem: &str, value: &T) -> Result<(), CliError> {
        if self.format.json() {
            self.json(&format!("{stem}.json"), value)
        } else {
            Ok(())
        }
    }
}

pub fn load_config(inv: &Invocation) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(&inv.config_path).map_err(|source| CliError::Io {
        path: inv.config_path.clone(),
        source,
    })?;
    ExperimentConfig::from_json_with_overrides(&text, &inv.overrides)
        .and_then(|c| c.resolve(inv.experiment))
        .map_err(CliError::Config)
}

/// Runs an invocation end to end.
pub fn execute(inv: &Invocation) -> Result<(), CliError> {
    let config = load_config(inv)?;
    run_experiment(&config, &inv.output_dir, inv.format)?;
    if inv.with_random_baseline {
        if config.noise.kind == NoiseKind::BinaryPair {
            let mut twin = config.clone();
            twin.noise.kind = NoiseKind::RandomBinary;
            run_experiment(&twin, &inv.output_dir.join(BASELINE_DIR), inv.format)?;
        } else {
            log::warn!("--with-random-baseline ignored: noise is not binary-pair correlated");
        }
    }
    Ok(())
}

/// Runs a resolved config and writes its outputs into `dir`.
pub fn run_experiment(
    config: &ExperimentConfig,
    dir: &Path,
    format: OutputFormat,
) -> Result<(), CliError> {
    let experiment = config
        .experiment
        .ok_or_else(|| CliError::Config("config is not resolved".into()))?;
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let out = Output { dir, format };
    out.json("config_echo.json", config)?;
    match experiment {
        Experiment::Run => write_run(&out, &run_ensemble(&config.simulation())?),
        Experiment::Scan => write_scan(&out, config),
        Experiment::Fss => write_fss(&out, config),
        Experiment::Profile => write_profile(&out, config),
    }
}

#[derive(Serialize)]
struct FitDocument<'a> {
    alpha: f64,
    stderr: f64,
    window: (u64, u64),
    r2: f64,
    log_prefactor: f64,
    points: usize,
    realizations: usize,
    inhomogeneity: f64,
    realization_alphas: &'a [Option<f64>],
}

fn write_run(out: &Output<'_>, result: &EnsembleResult) -> Result<(), CliError> {
    let series = &result.series;
    let stderr = stderr_column(series);
    let rows: Vec<_> = (0..series.len())
        .map(|k| {
            vec![
                series.times[k].to_string(),
                fmt_float(series.sigma[k]),
                fmt_float(stderr[k]),
            ]
        })
        .collect();
    out.table("sigma_series", &["t", "sigma_mean", "sigma_stderr"], &rows)?;
    let rows: Vec<_> = (0..series.len())
        .map(|k| {
            vec![
                series.times[k].to_string(),
                fmt_float(series.mean_n[k]),
                fmt_float(series.mean_n2[k]),
                fmt_float(series.sigma[k]),
                fmt_float(stderr[k]),
            ]
        })
        .collect();
    out.table(
        "moments",
        &["t", "mean_n", "mean_n2", "sigma", "sigma_stderr"],
        &rows,
    )?;
    out.table_json("sigma_series", series)?;
    let fit = &result.fit;
    out.json(
        "fit.json",
        &FitDocument {
            alpha: fit.alpha,
            stderr: fit.stderr_alpha,
            window: fit.window,
            r2: fit.r_squared,
            log_prefactor: fit.log_prefactor,
            points: fit.points,
            realizations: result.realizations,
            inhomogeneity: result.config.noise.inhomogeneity(),
            realization_alphas: &result.realization_alphas,
        },
    )
}

fn stderr_column(series: &MomentSeries) -> Vec<f64> {
    series
        .sigma_stderr
        .clone()
        .unwrap_or_else(|| vec![0.0; series.len()])
}

fn write_scan(out: &Output<'_>, config: &ExperimentConfig) -> Result<(), CliError> {
    let grid = config.theta1_values().map_err(CliError::Config)?;
    let rows = run_theta_scan(&config.simulation(), &grid)?;
    let table: Vec<_> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_float(r.theta1),
                fmt_float(r.alpha),
                fmt_float(r.alpha_stderr),
            ]
        })
        .collect();
    out.table(
        "alpha_vs_theta1",
        &["theta1", "alpha", "alpha_stderr"],
        &table,
    )?;
    out.table_json("alpha_vs_theta1", &rows)
}

fn write_fss(out: &Output<'_>, config: &ExperimentConfig) -> Result<(), CliError> {
    let sizes = config
        .sizes
        .as_deref()
        .ok_or_else(|| CliError::Config("missing field `sizes`".into()))?;
    let result = run_fss(&config.simulation(), sizes, config.tail_fraction)?;
    let table: Vec<_> = result
        .rows
        .iter()
        .map(|r| {
            vec![
                r.lattice_size.to_string(),
                fmt_float(r.sigma_bar),
                fmt_float(r.stderr),
            ]
        })
        .collect();
    out.table("sigma_vs_N", &["N", "sigma_bar", "stderr"], &table)?;
    out.table_json("sigma_vs_N", &result.rows)?;
    out.json("scaling_fit.json", &result.scaling)
}

fn write_profile(out: &Output<'_>, config: &ExperimentConfig) -> Result<(), CliError> {
    let dist = run_profile(&config.simulation())?;
    write_distribution(out, &dist)?;
    if let Some(region) = config.tail_region {
        let fit = fit_exponential_tail(&dist, region)?;
        out.json("tail_fit.json", &fit)?;
    }
    Ok(())
}

fn write_distribution(out: &Output<'_>, dist: &ProbabilityDistribution) -> Result<(), CliError> {
    if out.format.csv() {
        let mut text = String::from("n_relative,probability_mean\n");
        for (n, p) in dist.iter_relative() {
            let _ = writeln!(text, "{n},{}", fmt_float(p));
        }
        out.write("profile.csv", &text)?;
    }
    out.table_json("profile", dist)
}
