//! Single walks, disorder ensembles, θ₁ scans and finite-size scaling.
//!
//! Realization `i` draws its schedule from stream `i` of the generator keyed
//! by the master seed, so every realization is a pure function of
//! `(config, i)` and an ensemble can be extended without touching earlier
//! members. Realizations may run in
//! parallel; results are always reduced sequentially in index order, which
//! keeps aggregates bit-identical between serial and parallel execution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::noise::{generate_schedule_stream, NoiseKind, NoiseSpec};
use crate::observables::{
    fit_line, fit_power_law, long_time_average, moments_and_sigma, ExponentFit, MomentSeries,
    ProbabilityDistribution,
};
use crate::walker::{evolve, initial_state, Spinor};

/// Default tail fraction used to estimate σ̄(t_∞).
pub const DEFAULT_TAIL_FRACTION: f64 = 0.1;

/// Smallest lattice accepted by the finite-size-scaling sweep.
pub const MIN_FSS_SIZE: usize = 1001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeSize {
    Sites(usize),
    #[serde(with = "auto")]
    Auto,
}

mod auto {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("auto")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "auto" {
            Ok(())
        } else {
            Err(D::Error::custom(format!(
                "expected \"auto\" or an integer, got {s:?}"
            )))
        }
    }
}

/// Smallest odd lattice that contains the light cone of `steps` steps.
pub fn minimal_lattice(steps: usize) -> usize {
    2 * steps + 3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub steps: usize,
    pub lattice_size: LatticeSize,
    pub noise: NoiseSpec,
    pub realizations: usize,
    pub qubit: Spinor,
    /// Record moments every `observable_stride` steps.
    pub observable_stride: usize,
    /// Power-law fit window; `[T/2, T]` when absent.
    pub fit_window: Option<(u64, u64)>,
}

impl SimulationConfig {
    pub fn new(steps: usize, noise: NoiseSpec, realizations: usize) -> Self {
        Self {
            steps,
            lattice_size: LatticeSize::Auto,
            noise,
            realizations,
            qubit: Spinor::balanced(),
            observable_stride: 1,
            fit_window: None,
        }
    }

    pub fn lattice_sites(&self) -> usize {
        match self.lattice_size {
            LatticeSize::Sites(n) => n,
            LatticeSize::Auto => minimal_lattice(self.steps),
        }
    }

    pub fn fit_window(&self) -> (u64, u64) {
        self.fit_window
            .unwrap_or((self.steps as u64 / 2, self.steps as u64))
    }

    /// Realizations actually simulated; a noiseless walk needs only one.
    pub fn effective_realizations(&self) -> usize {
        if self.noise.kind == NoiseKind::Homogeneous {
            1
        } else {
            self.realizations
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.lattice_sites();
        if self.steps == 0 {
            return Err(invalid("steps must be positive"));
        }
        if n.is_multiple_of(2) {
            return Err(invalid(format!("lattice_size must be odd, got {n}")));
        }
        if n < minimal_lattice(self.steps) {
            return Err(invalid(format!(
                "lattice_size {n} cannot hold {} steps (needs at least {})",
                self.steps,
                minimal_lattice(self.steps)
            )));
        }
        if self.realizations == 0 {
            return Err(invalid("realizations must be at least 1"));
        }
        if self.observable_stride == 0 {
            return Err(invalid("observable_stride must be at least 1"));
        }
        if let Some((a, b)) = self.fit_window {
            if a < 1 || a > b || b > self.steps as u64 {
                return Err(invalid(format!(
                    "fit window [{a}, {b}] must satisfy 1 <= t_min <= t_max <= steps"
                )));
            }
        }
        self.noise.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

/// Evolves realization `index` and returns its moment series and final
/// distribution.
pub fn run_single(
    config: &SimulationConfig,
    index: u64,
) -> Result<(MomentSeries, ProbabilityDistribution)> {
    config.validate()?;
    simulate(config, index)
}

fn simulate(
    config: &SimulationConfig,
    index: u64,
) -> Result<(MomentSeries, ProbabilityDistribution)> {
    let sites = config.lattice_sites();
    let noise = &config.noise;
    let length = noise.schedule_length(sites, config.steps);
    let schedule = generate_schedule_stream(noise, length, index)?;
    let mut state = initial_state(sites, config.qubit)?;
    let stride = config.observable_stride;
    let mut series = MomentSeries::with_capacity(config.steps / stride);
    evolve(&mut state, &schedule, config.steps, |s| {
        if s.time() % stride == 0 {
            series.push(s.time() as u64, moments_and_sigma(s)?);
        }
        Ok(())
    })?;
    Ok((series, ProbabilityDistribution::from_state(&state)))
}

fn simulate_all(
    config: &SimulationConfig,
    execution: Execution,
) -> Result<Vec<(MomentSeries, ProbabilityDistribution)>> {
    config.validate()?;
    if config.noise.kind == NoiseKind::Homogeneous && config.realizations > 1 {
        log::warn!(
            "homogeneous noise has no disorder to average; running 1 realization instead of {}",
            config.realizations
        );
    }
    let count = config.effective_realizations() as u64;
    let outcomes: Vec<_> = match execution {
        Execution::Serial => (0..count).map(|i| simulate(config, i)).collect(),
        Execution::Parallel => (0..count)
            .into_par_iter()
            .map(|i| simulate(config, i))
            .collect(),
    };
    // First failure by realization index wins.
    outcomes.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub config: SimulationConfig,
    pub realizations: usize,
    /// Ensemble mean of the moments, with the standard error of σ.
    pub series: MomentSeries,
    pub distribution: ProbabilityDistribution,
    pub fit: ExponentFit,
    /// Exponent fitted on each realization separately; `None` where the fit
    /// was impossible.
    pub realization_alphas: Vec<Option<f64>>,
    /// σ̄(t_∞) of each realization over the final tenth of its series.
    pub realization_long_time_sigma: Vec<f64>,
}

/// Sample mean and standard error of the mean of `values`.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Averages σ (not amplitudes) entrywise over realizations, in order.
pub fn average_series(members: &[MomentSeries]) -> Result<MomentSeries> {
    let first = members
        .first()
        .ok_or_else(|| invalid("cannot average an empty ensemble"))?;
    if members.iter().any(|m| m.times != first.times) {
        return Err(invalid("ensemble members were sampled at different times"));
    }
    let r = members.len() as f64;
    let len = first.len();
    let mut out = MomentSeries::with_capacity(len);
    let mut stderr = Vec::with_capacity(len);
    let mut column = Vec::with_capacity(members.len());
    for k in 0..len {
        out.times.push(first.times[k]);
        out.mean_n
            .push(members.iter().map(|m| m.mean_n[k]).sum::<f64>() / r);
        out.mean_n2
            .push(members.iter().map(|m| m.mean_n2[k]).sum::<f64>() / r);
        column.clear();
        column.extend(members.iter().map(|m| m.sigma[k]));
        let (mean, se) = mean_and_stderr(&column);
        out.sigma.push(mean);
        stderr.push(se);
    }
    out.sigma_stderr = Some(stderr);
    Ok(out)
}

fn average_distribution(members: &[ProbabilityDistribution]) -> ProbabilityDistribution {
    let r = members.len() as f64;
    let len = members[0].probs.len();
    let mut probs = vec![0.0; len];
    for m in members {
        for (acc, p) in probs.iter_mut().zip(&m.probs) {
            *acc += p;
        }
    }
    for p in &mut probs {
        *p /= r;
    }
    ProbabilityDistribution {
        probs,
        origin: members[0].origin,
    }
}

pub fn run_ensemble(config: &SimulationConfig) -> Result<EnsembleResult> {
    run_ensemble_with(config, Execution::Parallel)
}

pub fn run_ensemble_with(
    config: &SimulationConfig,
    execution: Execution,
) -> Result<EnsembleResult> {
    let members = simulate_all(config, execution)?;
    let (series, dists): (Vec<_>, Vec<_>) = members.into_iter().unzip();
    let window = config.fit_window();
    let mean = average_series(&series)?;
    let fit = fit_power_law(&mean, window)?;
    let realization_alphas = series
        .iter()
        .map(|s| fit_power_law(s, window).ok().map(|f| f.alpha))
        .collect();
    let realization_long_time_sigma = series
        .iter()
        .map(|s| long_time_average(s, DEFAULT_TAIL_FRACTION))
        .collect::<Result<_>>()?;
    Ok(EnsembleResult {
        config: config.clone(),
        realizations: series.len(),
        series: mean,
        distribution: average_distribution(&dists),
        fit,
        realization_alphas,
        realization_long_time_sigma,
    })
}

/// Ensemble-mean final distribution, without any fitting.
pub fn run_profile(config: &SimulationConfig) -> Result<ProbabilityDistribution> {
    let members = simulate_all(config, Execution::Parallel)?;
    let dists: Vec<_> = members.into_iter().map(|(_, d)| d).collect();
    Ok(average_distribution(&dists))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub theta1: f64,
    pub alpha: f64,
    pub alpha_stderr: f64,
    pub r_squared: f64,
}

/// One ensemble per θ₁ value, everything else fixed.
pub fn run_theta_scan(base: &SimulationConfig, theta1_values: &[f64]) -> Result<Vec<ScanRow>> {
    if theta1_values.is_empty() {
        return Err(invalid("theta1 grid is empty"));
    }
    theta1_values
        .iter()
        .map(|&theta1| {
            let mut config = base.clone();
            config.noise.theta1 = theta1;
            let result = run_ensemble(&config)?;
            Ok(ScanRow {
                theta1,
                alpha: result.fit.alpha,
                alpha_stderr: result.fit.stderr_alpha,
                r_squared: result.fit.r_squared,
            })
        })
        .collect()
}

/// Evenly spaced grid `start, start + step, …` strictly below `stop`.
pub fn theta_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() {
        return Err(invalid(
            "theta grid needs finite bounds and a positive step",
        ));
    }
    let count = ((stop - start) / step - 1e-9).ceil().max(0.0) as usize;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FssRow {
    pub lattice_size: usize,
    pub steps: usize,
    pub sigma_bar: f64,
    pub stderr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// Undefined with only two sizes.
    pub stderr: Option<f64>,
    pub r_squared: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FssResult {
    pub rows: Vec<FssRow>,
    pub scaling: ScalingFit,
}

pub fn validate_fss_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 {
        return Err(invalid(format!(
            "finite-size scaling needs at least 2 sizes, got {}",
            sizes.len()
        )));
    }
    for &n in sizes {
        if n % 2 == 0 || n < MIN_FSS_SIZE {
            return Err(invalid(format!(
                "sizes must be odd and at least {MIN_FSS_SIZE}, got {n}"
            )));
        }
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("sizes must be strictly ascending"));
    }
    Ok(())
}

/// For every size `N` evolves `T = (N − 3)/2` steps, so the front reaches but
/// never crosses the edge, averages σ over the final `tail_fraction` of the
/// ensemble-mean series, and fits `ln σ̄` against `ln N`.
pub fn run_fss(base: &SimulationConfig, sizes: &[usize], tail_fraction: f64) -> Result<FssResult> {
    validate_fss_sizes(sizes)?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut config = base.clone();
        config.lattice_size = LatticeSize::Sites(n);
        config.steps = (n - 3) / 2;
        config.fit_window = None;
        let members = simulate_all(&config, Execution::Parallel)?;
        let per_realization = members
            .iter()
            .map(|(s, _)| long_time_average(s, tail_fraction))
            .collect::<Result<Vec<_>>>()?;
        let series: Vec<_> = members.into_iter().map(|(s, _)| s).collect();
        let sigma_bar = long_time_average(&average_series(&series)?, tail_fraction)?;
        let (_, stderr) = mean_and_stderr(&per_realization);
        rows.push(FssRow {
            lattice_size: n,
            steps: config.steps,
            sigma_bar,
            stderr,
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| (r.lattice_size as f64).ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.sigma_bar.ln()).collect();
    let line = fit_line(&x, &y)?;
    Ok(FssResult {
        rows,
        scaling: ScalingFit {
            slope: line.slope,
            intercept: line.intercept,
            stderr: line.stderr_slope.is_finite().then_some(line.stderr_slope),
            r_squared: line.r_squared,
        },
    })
}
