//! Position distribution, moments, σ(t) and the two regressions used to
//! classify transport: a log-log power law for σ(t) and a semilog
//! exponential fit for profile tails.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::walker::WalkerState;

/// States whose norm is further than this from 1 are treated as corrupted.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Upper bound on the density of log-spaced fit points.
pub const POINTS_PER_DECADE: f64 = 200.0;

pub const MIN_FIT_POINTS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityDistribution {
    pub probs: Vec<f64>,
    pub origin: usize,
}

impl ProbabilityDistribution {
    pub fn from_state(state: &WalkerState) -> Self {
        let probs = (0..state.len()).map(|n| state.probability(n)).collect();
        Self {
            probs,
            origin: state.origin(),
        }
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Site offset `n − n₀` of array index `index`.
    pub fn relative(&self, index: usize) -> i64 {
        index as i64 - self.origin as i64
    }

    /// Probability at offset `offset` from the origin, if on the lattice.
    pub fn at(&self, offset: i64) -> Option<f64> {
        let index = self.origin as i64 + offset;
        usize::try_from(index)
            .ok()
            .and_then(|i| self.probs.get(i).copied())
    }

    /// `(n − n₀, probability)` pairs.
    pub fn iter_relative(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.relative(i), p))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub mean_n: f64,
    pub mean_n2: f64,
    pub sigma: f64,
}

/// `⟨n⟩`, `⟨n²⟩` and `σ = √(⟨n²⟩ − ⟨n⟩²)` with `n` measured from the origin.
pub fn moments_and_sigma(state: &WalkerState) -> Result<Moments> {
    let (lo, hi) = state.support();
    let origin = state.origin() as f64;
    let (mut norm, mut m1, mut m2) = (0.0, 0.0, 0.0);
    let up = &state.up()[lo..=hi];
    let down = &state.down()[lo..=hi];
    for (n, (u, d)) in (lo..=hi).zip(up.iter().zip(down)) {
        let p = u.norm_sqr() + d.norm_sqr();
        let x = n as f64 - origin;
        norm += p;
        m1 += x * p;
        m2 += x * x * p;
    }
    if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::CorruptedState { norm });
    }
    Ok(Moments {
        mean_n: m1,
        mean_n2: m2,
        sigma: sigma_from(m1, m2),
    })
}

pub(crate) fn sigma_from(mean_n: f64, mean_n2: f64) -> f64 {
    (mean_n2 - mean_n * mean_n).max(0.0).sqrt()
}

/// Moments recorded along a walk, or their ensemble mean.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MomentSeries {
    pub times: Vec<u64>,
    pub mean_n: Vec<f64>,
    pub mean_n2: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Standard error of `sigma` across an ensemble.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_stderr: Option<Vec<f64>>,
}

impl MomentSeries {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            mean_n: Vec::with_capacity(n),
            mean_n2: Vec::with_capacity(n),
            sigma: Vec::with_capacity(n),
            sigma_stderr: None,
        }
    }

    /// Series of σ values only (moments set so that `σ² = ⟨n²⟩`).
    pub fn from_sigma(times: Vec<u64>, sigma: Vec<f64>) -> Self {
        let mean_n2 = sigma.iter().map(|s| s * s).collect();
        Self {
            mean_n: vec![0.0; times.len()],
            mean_n2,
            times,
            sigma,
            sigma_stderr: None,
        }
    }

    pub fn push(&mut self, time: u64, m: Moments) {
        self.times.push(time);
        self.mean_n.push(m.mean_n);
        self.mean_n2.push(m.mean_n2);
        self.sigma.push(m.sigma);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Result of an ordinary least squares line fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr_slope: f64,
    pub r_squared: f64,
}

/// Least squares fit of `y = intercept + slope·x`. Needs at least two points
/// with distinct `x`; the slope error is NaN with only two points.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return Err(invalid(format!(
            "line fit needs at least 2 paired points, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        let (dx, dy) = (xi - mx, yi - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return Err(invalid("line fit needs distinct abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - intercept - slope * xi).powi(2))
        .sum();
    let stderr_slope = if n > 2 {
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    let r_squared = if syy > 0.0 {
        (1.0 - ssr / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(LineFit {
        slope,
        intercept,
        stderr_slope,
        r_squared,
    })
}

/// Power law `σ(t) ≈ e^{log_prefactor} · t^alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub alpha: f64,
    pub log_prefactor: f64,
    /// Requested `[t_min, t_max]`.
    pub window: (u64, u64),
    pub stderr_alpha: f64,
    pub r_squared: f64,
    /// Points that entered the regression after log-spaced subsampling.
    pub points: usize,
}

/// Keeps the first sample in every log-spaced bin of width
/// `1/POINTS_PER_DECADE` decades. `times` must be ascending and positive.
fn log_spaced(times: &[u64]) -> Vec<usize> {
    let mut keep = Vec::new();
    let mut last_bin = None;
    let Some(&first) = times.first() else {
        return keep;
    };
    for (i, &t) in times.iter().enumerate() {
        let bin = ((t as f64 / first as f64).log10() * POINTS_PER_DECADE).floor() as i64;
        if last_bin != Some(bin) {
            keep.push(i);
            last_bin = Some(bin);
        }
    }
    keep
}

/// Fits `ln σ = ln c + α ln t` over `t ∈ [t_min, t_max]`.
///
/// Entries at `t = 0` are skipped. Points are thinned to at most
/// [`POINTS_PER_DECADE`] per decade before the regression.
pub fn fit_power_law(series: &MomentSeries, window: (u64, u64)) -> Result<ExponentFit> {
    let (t_min, t_max) = window;
    if t_min > t_max {
        return Err(invalid(format!("empty fit window [{t_min}, {t_max}]")));
    }
    let mut times = Vec::new();
    let mut sigma = Vec::new();
    for (&t, &s) in series.times.iter().zip(&series.sigma) {
        if t == 0 || t < t_min || t > t_max {
            continue;
        }
        if s.is_nan() || s <= 0.0 {
            return Err(invalid(format!("sigma({t}) = {s} cannot enter a log fit")));
        }
        times.push(t);
        sigma.push(s);
    }
    let keep = log_spaced(&times);
    if keep.len() < MIN_FIT_POINTS {
        return Err(invalid(format!(
            "fit window [{t_min}, {t_max}] holds {} usable points, need {MIN_FIT_POINTS}",
            keep.len()
        )));
    }
    let x: Vec<f64> = keep.iter().map(|&i| (times[i] as f64).ln()).collect();
    let y: Vec<f64> = keep.iter().map(|&i| sigma[i].ln()).collect();
    let line = fit_line(&x, &y)?;
    Ok(ExponentFit {
        alpha: line.slope,
        log_prefactor: line.intercept,
        window,
        stderr_alpha: line.stderr_slope,
        r_squared: line.r_squared,
        points: keep.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// Positive for decaying tails, in inverse sites.
    pub decay_rate: f64,
    pub r_squared: f64,
}

/// Offset parity (0 or 1) carrying all of the probability, if any.
///
/// A walk started on one site occupies only offsets of the parity of `t`.
fn occupied_parity(dist: &ProbabilityDistribution) -> Option<i64> {
    let mut mass = [0.0; 2];
    for (n, p) in dist.iter_relative() {
        mass[n.rem_euclid(2) as usize] += p;
    }
    if mass[1] == 0.0 {
        Some(0)
    } else if mass[0] == 0.0 {
        Some(1)
    } else {
        None
    }
}

/// Fits `ln p(n) = a − decay_rate·|n − n₀|` over the offsets `region`
/// (inclusive, both on one side of the origin). Offsets on a sublattice that
/// holds no probability at all are skipped.
pub fn fit_exponential_tail(dist: &ProbabilityDistribution, region: (i64, i64)) -> Result<TailFit> {
    let (a, b) = region;
    if a > b {
        return Err(invalid(format!("empty tail region [{a}, {b}]")));
    }
    if a < 0 && b > 0 {
        return Err(invalid(format!(
            "tail region [{a}, {b}] straddles the origin"
        )));
    }
    let parity = occupied_parity(dist);
    let offsets: Vec<i64> = (a..=b)
        .filter(|n| parity.is_none_or(|p| n.rem_euclid(2) == p))
        .collect();
    let count = offsets.len();
    if count < MIN_FIT_POINTS {
        return Err(invalid(format!(
            "tail region holds {count} occupied sites, need {MIN_FIT_POINTS}"
        )));
    }
    let mut x = Vec::with_capacity(count);
    let mut y = Vec::with_capacity(count);
    for offset in offsets {
        let p = dist
            .at(offset)
            .ok_or_else(|| invalid(format!("offset {offset} lies off the lattice")))?;
        if p.is_nan() || p <= 0.0 {
            return Err(invalid(format!("zero probability at offset {offset}")));
        }
        x.push(offset.unsigned_abs() as f64);
        y.push(p.ln());
    }
    let line = fit_line(&x, &y)?;
    Ok(TailFit {
        decay_rate: -line.slope,
        r_squared: line.r_squared,
    })
}

/// Mean of σ over the last `tail_fraction` of the series (at least one entry).
pub fn long_time_average(series: &MomentSeries, tail_fraction: f64) -> Result<f64> {
    if series.sigma.is_empty() {
        return Err(invalid("cannot average an empty series"));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(invalid(format!(
            "tail fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    let len = series.sigma.len();
    let count = ((len as f64 * tail_fraction).ceil() as usize).clamp(1, len);
    Ok(series.sigma[len - count..].iter().sum::<f64>() / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walker::{initial_state, CoinField, CoinMatrix, Spinor};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn power_series(c: f64, a: f64, range: std::ops::RangeInclusive<u64>) -> MomentSeries {
        let times: Vec<u64> = range.collect();
        let sigma = times.iter().map(|&t| c * (t as f64).powf(a)).collect();
        MomentSeries::from_sigma(times, sigma)
    }

    #[test]
    fn point_source_moments() {
        let s = initial_state(9, Spinor::balanced()).unwrap();
        let m = moments_and_sigma(&s).unwrap();
        assert_eq!((m.mean_n, m.mean_n2, m.sigma), (0.0, 0.0, 0.0));
    }

    #[test]
    fn hadamard_moments_after_one_and_two_steps() {
        let mut s = initial_state(9, Spinor::balanced()).unwrap();
        let coin = CoinField::Uniform(CoinMatrix::new(FRAC_PI_4).unwrap());
        s.step_with(coin).unwrap();
        let m = moments_and_sigma(&s).unwrap();
        assert_abs_diff_eq!(m.mean_n, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.mean_n2, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.sigma, 1.0, epsilon = 1e-14);
        s.step_with(coin).unwrap();
        let m = moments_and_sigma(&s).unwrap();
        assert_abs_diff_eq!(m.mean_n, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.mean_n2, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.sigma, 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn corrupted_state_rejected() {
        use num_complex::Complex64;
        let z = Complex64::new(0.0, 0.0);
        let mut up = vec![z; 5];
        up[2] = Complex64::new(0.9, 0.0);
        let s = WalkerState::from_amplitudes(up, vec![z; 5], 2).unwrap();
        assert!(matches!(
            moments_and_sigma(&s),
            Err(Error::CorruptedState { .. })
        ));
    }

    #[test]
    fn exact_power_laws() {
        let fit = fit_power_law(&power_series(2.0, 0.74, 100..=3000), (100, 3000)).unwrap();
        assert_abs_diff_eq!(fit.alpha, 0.74, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.log_prefactor, 2f64.ln(), epsilon = 1e-8);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);

        let flat = fit_power_law(&power_series(3.0, 0.0, 1..=1000), (500, 1000)).unwrap();
        assert_abs_diff_eq!(flat.alpha, 0.0, epsilon = 1e-12);

        let ballistic = fit_power_law(&power_series(1.0, 1.0, 1..=1000), (500, 1000)).unwrap();
        assert_abs_diff_eq!(ballistic.alpha, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fit_thins_to_log_spacing() {
        let fit = fit_power_law(&power_series(1.0, 0.5, 1..=10_000), (1, 10_000)).unwrap();
        assert!(fit.points <= 4 * 200 + 1, "{} points", fit.points);
        assert!(fit.points > 300);
    }

    #[test]
    fn fit_skips_time_zero_and_rejects_bad_input() {
        let mut s = power_series(1.0, 1.0, 0..=100);
        s.sigma[0] = 0.0;
        assert!(fit_power_law(&s, (0, 100)).is_ok());
        s.sigma[50] = 0.0;
        assert!(fit_power_law(&s, (0, 100)).is_err());
        assert!(fit_power_law(&power_series(1.0, 1.0, 1..=5), (1, 5)).is_err());
    }

    #[test]
    fn exponential_tails() {
        let origin = 50;
        let probs = (0..101)
            .map(|i: i64| (-0.2 * (i - origin).abs() as f64).exp())
            .collect();
        let dist = ProbabilityDistribution {
            probs,
            origin: origin as usize,
        };
        let right = fit_exponential_tail(&dist, (5, 40)).unwrap();
        assert_abs_diff_eq!(right.decay_rate, 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(right.r_squared, 1.0, epsilon = 1e-12);
        let left = fit_exponential_tail(&dist, (-40, -5)).unwrap();
        assert_abs_diff_eq!(left.decay_rate, 0.2, epsilon = 1e-12);

        let flat = ProbabilityDistribution {
            probs: vec![0.01; 101],
            origin: 50,
        };
        assert_abs_diff_eq!(
            fit_exponential_tail(&flat, (0, 30)).unwrap().decay_rate,
            0.0
        );
    }

    #[test]
    fn tail_fit_errors() {
        let mut probs = vec![0.01; 101];
        probs[70] = 0.0;
        let dist = ProbabilityDistribution { probs, origin: 50 };
        assert!(fit_exponential_tail(&dist, (10, 30)).is_err());
        assert!(fit_exponential_tail(&dist, (-10, 10)).is_err());
        assert!(fit_exponential_tail(&dist, (1, 5)).is_err());
        assert!(fit_exponential_tail(&dist, (40, 60)).is_err());
    }

    #[test]
    fn tail_fit_skips_the_empty_sublattice() {
        let origin = 50;
        let probs = (0..101)
            .map(|i: i64| {
                let n = i - origin;
                if n % 2 == 0 {
                    (-0.3 * n.abs() as f64).exp()
                } else {
                    0.0
                }
            })
            .collect();
        let dist = ProbabilityDistribution { probs, origin: 50 };
        let fit = fit_exponential_tail(&dist, (5, 40)).unwrap();
        assert_abs_diff_eq!(fit.decay_rate, 0.3, epsilon = 1e-12);
        // 18 even offsets in [5, 40]; [5, 20] holds only 8.
        assert!(fit_exponential_tail(&dist, (5, 20)).is_err());
    }

    #[test]
    fn long_time_averages() {
        let constant = MomentSeries::from_sigma((1..=10).collect(), vec![3.0; 10]);
        for f in [0.05, 0.5, 1.0] {
            assert_eq!(long_time_average(&constant, f).unwrap(), 3.0);
        }
        let short = MomentSeries::from_sigma(vec![1, 2, 3, 4], vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(long_time_average(&short, 0.5).unwrap(), 3.5);
        // Mean of 901..=1000.
        let ballistic = power_series(1.0, 1.0, 1..=1000);
        assert_abs_diff_eq!(
            long_time_average(&ballistic, 0.1).unwrap(),
            950.5,
            epsilon = 1e-9
        );

        assert!(long_time_average(&MomentSeries::default(), 0.5).is_err());
        assert!(long_time_average(&short, 0.0).is_err());
    }
}
