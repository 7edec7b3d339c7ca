//! JSON experiment configuration, `key=value` overrides, and angle literals
//! such as `"pi/4"` or `"4pi/15"`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::ensemble::{
    theta_grid, validate_fss_sizes, LatticeSize, SimulationConfig, DEFAULT_TAIL_FRACTION,
};
use crate::noise::{NoiseAxis, NoiseKind, NoiseSpec};
use crate::walker::Spinor;

/// Angle in radians, written either as a number or as `[k]pi[/d]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angle(pub f64);

impl Angle {
    pub fn radians(self) -> f64 {
        self.0
    }
}

/// Parses `"pi"`, `"-pi/3"`, `"4pi/15"`, `"2*pi/3"`, `"pi/4"` or a plain
/// decimal number of radians.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let lower = compact.to_ascii_lowercase();
    let Some(at) = lower.find("pi") else {
        return lower
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("cannot read angle {text:?}"));
    };
    let bad = || format!("cannot read angle {text:?}; expected a form like \"4pi/15\"");
    let head = lower[..at].trim_end_matches('*');
    let tail = &lower[at + 2..];
    let numerator = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let denominator = match tail {
        "" => 1.0,
        t => t
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(bad)?,
    };
    let value = numerator * PI / denominator;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct AngleVisitor;

        impl Visitor<'_> for AngleVisitor {
            type Value = Angle;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an angle in radians or a string like \"4pi/15\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Ok(Angle(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                parse_angle(v).map(Angle).map_err(E::custom)
            }
        }

        d.deserialize_any(AngleVisitor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Run,
    Scan,
    Fss,
    Profile,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Run => "run",
            Experiment::Scan => "scan",
            Experiment::Fss => "fss",
            Experiment::Profile => "profile",
        })
    }
}

fn default_axis() -> NoiseAxis {
    NoiseAxis::Spatial
}

fn default_fraction() -> f64 {
    0.5
}

fn default_realizations() -> usize {
    50
}

fn default_stride() -> usize {
    1
}

fn default_tail_fraction() -> f64 {
    DEFAULT_TAIL_FRACTION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
    #[serde(default = "default_axis")]
    pub axis: NoiseAxis,
    pub theta1: Angle,
    /// Defaults to `theta1`.
    #[serde(default)]
    pub theta2: Option<Angle>,
    #[serde(default = "default_fraction")]
    pub fraction_theta2: f64,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseConfig {
    pub fn spec(&self) -> NoiseSpec {
        NoiseSpec {
            kind: self.kind,
            axis: self.axis,
            theta1: self.theta1.0,
            theta2: self.theta2.unwrap_or(self.theta1).0,
            fraction_theta2: self.fraction_theta2,
            seed: self.seed,
        }
    }
}

/// θ₁ values of a scan: an explicit list or `start, start + step, …` below
/// `stop`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaGrid {
    List(Vec<Angle>),
    Range {
        start: Angle,
        stop: Angle,
        step: Angle,
    },
}

impl ThetaGrid {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        match self {
            ThetaGrid::List(v) => Ok(v.iter().map(|a| a.0).collect()),
            ThetaGrid::Range { start, stop, step } => {
                theta_grid(start.0, stop.0, step.0).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitConfig {
    /// `[re, im]`
    pub up: [f64; 2],
    pub down: [f64; 2],
}

impl QubitConfig {
    pub fn spinor(&self) -> Spinor {
        Spinor::new(
            Complex64::new(self.up[0], self.up[1]),
            Complex64::new(self.down[0], self.down[1]),
        )
    }
}

impl From<Spinor> for QubitConfig {
    fn from(s: Spinor) -> Self {
        Self {
            up: [s.up.re, s.up.im],
            down: [s.down.re, s.down.im],
        }
    }
}

/// The experiment document accepted by the command line tool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: Option<Experiment>,
    /// Required except for `fss`, which derives the step count from each size.
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub lattice_size: Option<LatticeSize>,
    pub noise: NoiseConfig,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub qubit: Option<QubitConfig>,
    #[serde(default = "default_stride")]
    pub observable_stride: usize,
    #[serde(default)]
    pub fit_window: Option<(u64, u64)>,
    #[serde(default)]
    pub theta1_grid: Option<ThetaGrid>,
    #[serde(default)]
    pub sizes: Option<Vec<usize>>,
    #[serde(default = "default_tail_fraction")]
    pub tail_fraction: f64,
    /// Offsets `[n_a, n_b]` of the profile tail to fit; no tail fit when absent.
    #[serde(default)]
    pub tail_region: Option<(i64, i64)>,
}

impl ExperimentConfig {
    /// Parses a document after applying `key=value` overrides.
    pub fn from_json_with_overrides(text: &str, overrides: &[String]) -> Result<Self, String> {
        let mut value: Value =
            serde_json::from_str(text).map_err(|e| format!("malformed JSON: {e}"))?;
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        serde_json::from_value(value).map_err(|e| format!("invalid config: {e}"))
    }

    /// Checks the document for `experiment` and fills in every default, so
    /// the result reproduces the run exactly when fed back.
    pub fn resolve(&self, experiment: Experiment) -> Result<Self, String> {
        if let Some(declared) = self.experiment {
            if declared != experiment {
                return Err(format!(
                    "config declares experiment \"{declared}\" but \"{experiment}\" was requested"
                ));
            }
        }
        let mut out = self.clone();
        out.experiment = Some(experiment);
        out.noise.theta2 = Some(self.noise.theta2.unwrap_or(self.noise.theta1));
        out.qubit = Some(self.qubit.unwrap_or_else(|| Spinor::balanced().into()));
        if !(self.tail_fraction > 0.0 && self.tail_fraction <= 1.0) {
            return Err(format!(
                "tail_fraction must lie in (0, 1], got {}",
                self.tail_fraction
            ));
        }

        if experiment == Experiment::Fss {
            let sizes = self
                .sizes
                .as_ref()
                .ok_or("missing field `sizes` (required by fss)")?;
            validate_fss_sizes(sizes).map_err(|e| e.to_string())?;
            out.steps = None;
            out.lattice_size = None;
            out.fit_window = None;
        } else {
            let steps = self
                .steps
                .ok_or_else(|| format!("missing field `steps` (required by {experiment})"))?;
            let sim = self.simulation_with(steps, self.lattice_size.unwrap_or(LatticeSize::Auto));
            out.lattice_size = Some(LatticeSize::Sites(sim.lattice_sites()));
            sim.validate().map_err(|e| e.to_string())?;
        }
        if experiment == Experiment::Scan {
            let grid = self
                .theta1_grid
                .as_ref()
                .ok_or("missing field `theta1_grid` (required by scan)")?;
            let values = grid.values()?;
            if values.is_empty() {
                return Err("theta1_grid is empty".into());
            }
            out.theta1_grid = Some(ThetaGrid::List(values.into_iter().map(Angle).collect()));
        }
        if let Some((a, b)) = self.tail_region {
            if a > b || (a < 0 && b > 0) {
                return Err(format!(
                    "tail_region [{a}, {b}] must lie on one side of the origin"
                ));
            }
        }
        out.noise.spec().validate().map_err(|e| e.to_string())?;
        Ok(out)
    }

    fn simulation_with(&self, steps: usize, lattice_size: LatticeSize) -> SimulationConfig {
        SimulationConfig {
            steps,
            lattice_size,
            noise: self.noise.spec(),
            realizations: self.realizations,
            qubit: self
                .qubit
                .map(|q| q.spinor())
                .unwrap_or_else(Spinor::balanced),
            observable_stride: self.observable_stride,
            fit_window: self.fit_window,
        }
    }

    /// Simulation settings for `run`, `scan` and `profile`. For `fss` the
    /// steps and lattice are placeholders overwritten per size.
    pub fn simulation(&self) -> SimulationConfig {
        let steps = self.steps.unwrap_or(1);
        self.simulation_with(steps, self.lattice_size.unwrap_or(LatticeSize::Auto))
    }

    pub fn theta1_values(&self) -> Result<Vec<f64>, String> {
        self.theta1_grid
            .as_ref()
            .map(ThetaGrid::values)
            .unwrap_or_else(|| Ok(Vec::new()))
    }
}

/// Applies `a.b.c=value` to a JSON document. The value is read as JSON when
/// possible and as a bare string otherwise.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), String> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| format!("override {assignment:?} is not of the form key=value"))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(format!("override key {path:?} is malformed"));
    }
    let value =
        serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = doc;
    for key in &keys[..keys.len() - 1] {
        let map = node
            .as_object_mut()
            .ok_or_else(|| format!("override {path:?} descends into a non-object"))?;
        node = map
            .entry(key.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    let map = node
        .as_object_mut()
        .ok_or_else(|| format!("override {path:?} descends into a non-object"))?;
    map.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}
