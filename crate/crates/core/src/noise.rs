//! Coin-angle schedules: homogeneous, uncorrelated random binary, and
//! binary-pair correlated, either frozen in space or uniform in space and
//! varying in time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Tolerance used when matching schedule entries against θ₁ or θ₂.
pub const ANGLE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    Homogeneous,
    RandomBinary,
    BinaryPair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseAxis {
    /// Angles vary from site to site and are frozen in time.
    Spatial,
    /// Angles are equal on every site and vary from step to step.
    Temporal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub axis: NoiseAxis,
    pub theta1: f64,
    pub theta2: f64,
    /// Probability of a θ₂ entry.
    pub fraction_theta2: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn homogeneous(theta: f64) -> Self {
        Self {
            kind: NoiseKind::Homogeneous,
            axis: NoiseAxis::Spatial,
            theta1: theta,
            theta2: theta,
            fraction_theta2: 0.5,
            seed: 0,
        }
    }

    pub fn new(kind: NoiseKind, axis: NoiseAxis, theta1: f64, theta2: f64, seed: u64) -> Self {
        Self {
            kind,
            axis,
            theta1,
            theta2,
            fraction_theta2: 0.5,
            seed,
        }
    }

    /// Inhomogeneity degree `|θ₁ − θ₂|`.
    pub fn inhomogeneity(&self) -> f64 {
        (self.theta1 - self.theta2).abs()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta1.is_finite() && self.theta2.is_finite()) {
            return Err(invalid("noise angles must be finite"));
        }
        if !(0.0..=1.0).contains(&self.fraction_theta2) {
            return Err(invalid(format!(
                "fraction_theta2 must lie in [0, 1], got {}",
                self.fraction_theta2
            )));
        }
        Ok(())
    }

    /// The same spec with its correlations removed.
    pub fn uncorrelated(&self) -> Self {
        let kind = match self.kind {
            NoiseKind::BinaryPair => NoiseKind::RandomBinary,
            k => k,
        };
        Self { kind, ..*self }
    }

    /// Schedule length needed to cover a walk of `steps` steps on
    /// `lattice_size` sites.
    pub fn schedule_length(&self, lattice_size: usize, steps: usize) -> usize {
        match (self.kind, self.axis) {
            (NoiseKind::Homogeneous, _) => 1,
            (_, NoiseAxis::Spatial) => lattice_size,
            (_, NoiseAxis::Temporal) => steps,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleAxis {
    Spatial,
    Temporal,
    Homogeneous,
}

/// The map `(n, t) → θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleSchedule {
    axis: ScheduleAxis,
    values: Vec<f64>,
}

impl AngleSchedule {
    pub fn homogeneous(theta: f64) -> Self {
        Self {
            axis: ScheduleAxis::Homogeneous,
            values: vec![theta],
        }
    }

    pub fn spatial(values: Vec<f64>) -> Self {
        Self {
            axis: ScheduleAxis::Spatial,
            values,
        }
    }

    pub fn temporal(values: Vec<f64>) -> Self {
        Self {
            axis: ScheduleAxis::Temporal,
            values,
        }
    }

    pub fn axis(&self) -> ScheduleAxis {
        self.axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Angle of the coin on `site` at step `step`.
    pub fn angle_at(&self, site: usize, step: usize) -> Result<f64> {
        let index = match self.axis {
            ScheduleAxis::Homogeneous => 0,
            ScheduleAxis::Spatial => site,
            ScheduleAxis::Temporal => step,
        };
        self.values.get(index).copied().ok_or_else(|| {
            invalid(format!(
                "index {index} outside a {:?} schedule of length {}",
                self.axis,
                self.len()
            ))
        })
    }

    /// Fraction of entries equal to `theta` within [`ANGLE_TOLERANCE`].
    pub fn fraction_of(&self, theta: f64) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        let hits = self
            .values
            .iter()
            .filter(|&&v| same_angle(v, theta))
            .count();
        hits as f64 / self.values.len() as f64
    }

    /// Encodes a schedule over `{θ₁, θ₂}` as a bit string document.
    pub fn to_document(&self, theta1: f64, theta2: f64) -> Result<ScheduleDocument> {
        let mut bits = String::with_capacity(self.values.len());
        for &v in &self.values {
            if same_angle(v, theta2) {
                bits.push('1');
            } else if same_angle(v, theta1) {
                bits.push('0');
            } else {
                return Err(invalid(format!(
                    "schedule entry {v} is neither theta1 = {theta1} nor theta2 = {theta2}"
                )));
            }
        }
        Ok(ScheduleDocument {
            axis: self.axis,
            theta1,
            theta2,
            values_as_bits: bits,
        })
    }
}

/// JSON form of a binary schedule: bit `i` set means θ₂ at index `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDocument {
    pub axis: ScheduleAxis,
    pub theta1: f64,
    pub theta2: f64,
    pub values_as_bits: String,
}

impl ScheduleDocument {
    pub fn to_schedule(&self) -> Result<AngleSchedule> {
        let values = self
            .values_as_bits
            .chars()
            .map(|b| match b {
                '0' => Ok(self.theta1),
                '1' => Ok(self.theta2),
                other => Err(invalid(format!(
                    "unexpected character {other:?} in values_as_bits"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(invalid("values_as_bits is empty"));
        }
        if self.axis == ScheduleAxis::Homogeneous && values.len() != 1 {
            return Err(invalid("a homogeneous schedule holds exactly one value"));
        }
        Ok(AngleSchedule {
            axis: self.axis,
            values,
        })
    }
}

fn same_angle(a: f64, b: f64) -> bool {
    (a - b).abs() <= ANGLE_TOLERANCE
}

/// Probability of placing a single θ₁ slot (rather than a θ₂ dimer) that
/// yields an expected θ₂ fraction `f`: solves `2(1 − q)/(2 − q) = f`.
pub fn single_slot_probability(fraction_theta2: f64) -> f64 {
    (2.0 - 2.0 * fraction_theta2) / (2.0 - fraction_theta2)
}

/// Generates the schedule for `spec`. `length` counts sites for spatial
/// noise and steps for temporal noise; it is ignored for homogeneous noise.
///
/// The output is a pure function of `(spec, length)` and equals stream 0 of
/// [`generate_schedule_stream`].
pub fn generate_schedule(spec: &NoiseSpec, length: usize) -> Result<AngleSchedule> {
    generate_schedule_stream(spec, length, 0)
}

/// Like [`generate_schedule`], drawing from stream `stream` of the ChaCha8
/// generator keyed by `spec.seed`. Distinct streams are independent, which is
/// how ensemble realizations get their own disorder.
pub fn generate_schedule_stream(
    spec: &NoiseSpec,
    length: usize,
    stream: u64,
) -> Result<AngleSchedule> {
    spec.validate()?;
    if spec.kind == NoiseKind::Homogeneous {
        return Ok(AngleSchedule::homogeneous(spec.theta1));
    }
    if length == 0 {
        return Err(invalid("schedule length must be positive"));
    }
    if spec.kind == NoiseKind::BinaryPair && length < 2 {
        return Err(invalid(format!(
            "a binary-pair schedule needs at least 2 entries, got {length}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(stream);
    let mut values = Vec::with_capacity(length);
    match spec.kind {
        NoiseKind::RandomBinary => {
            for _ in 0..length {
                let deviated = rng.random::<f64>() < spec.fraction_theta2;
                values.push(if deviated { spec.theta2 } else { spec.theta1 });
            }
        }
        NoiseKind::BinaryPair => {
            let single = single_slot_probability(spec.fraction_theta2);
            while values.len() < length {
                let remaining = length - values.len();
                if remaining == 1 || rng.random::<f64>() < single {
                    values.push(spec.theta1);
                } else {
                    values.push(spec.theta2);
                    values.push(spec.theta2);
                }
            }
        }
        NoiseKind::Homogeneous => unreachable!(),
    }

    Ok(match spec.axis {
        NoiseAxis::Spatial => AngleSchedule::spatial(values),
        NoiseAxis::Temporal => AngleSchedule::temporal(values),
    })
}

/// Checks that every maximal run of θ₂ entries has even length.
///
/// Entries other than θ₂ must all share one angle; a third distinct angle is
/// an error.
pub fn validate_pair_constraint(schedule: &AngleSchedule, theta2: f64) -> Result<bool> {
    let mut other: Option<f64> = None;
    let mut run = 0usize;
    let mut ok = true;
    for &v in schedule.values() {
        if same_angle(v, theta2) {
            run += 1;
            continue;
        }
        match other {
            None => other = Some(v),
            Some(o) if same_angle(o, v) => {}
            Some(o) => {
                return Err(invalid(format!(
                    "schedule holds a third angle {v} besides {o} and {theta2}"
                )))
            }
        }
        ok &= run.is_multiple_of(2);
        run = 0;
    }
    Ok(ok && run.is_multiple_of(2))
}
