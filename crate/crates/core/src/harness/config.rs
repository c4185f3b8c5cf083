//! Experiment configuration, read from TOML.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::exact::IntegratorConfig;
use crate::functionals::FaceFunctional;
use crate::geometry::ConvexPolytope;
use crate::measures::{HyperplaneMeasureSpec, MeasureKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    MeanSurface,
    VarianceExact,
    Martingale,
    IncrementClt,
    #[serde(rename = "total_length_2d")]
    TotalLength2d,
    NonGaussian,
    Scaling,
    IsotropicConstants,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::MeanSurface,
        ExperimentKind::VarianceExact,
        ExperimentKind::Martingale,
        ExperimentKind::IncrementClt,
        ExperimentKind::TotalLength2d,
        ExperimentKind::NonGaussian,
        ExperimentKind::Scaling,
        ExperimentKind::IsotropicConstants,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::MeanSurface => "mean_surface",
            ExperimentKind::VarianceExact => "variance_exact",
            ExperimentKind::Martingale => "martingale",
            ExperimentKind::IncrementClt => "increment_clt",
            ExperimentKind::TotalLength2d => "total_length_2d",
            ExperimentKind::NonGaussian => "non_gaussian",
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::IsotropicConstants => "isotropic_constants",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment `{s}`")))
    }
}

/// Hyperplane measure without its dimension, which comes from the
/// experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    pub kind: MeasureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            kind: MeasureKind::Isotropic,
            directions: None,
            weights: None,
            scale: None,
        }
    }
}

impl MeasureConfig {
    pub fn of_kind(kind: MeasureKind) -> Self {
        MeasureConfig {
            kind,
            ..Default::default()
        }
    }

    pub fn to_spec(&self, d: usize) -> Result<HyperplaneMeasureSpec, HarnessError> {
        let spec = match self.kind {
            MeasureKind::Isotropic => HyperplaneMeasureSpec::isotropic(d)?,
            MeasureKind::AxisAligned => HyperplaneMeasureSpec::axis_aligned(d),
            MeasureKind::DiscreteDirections => {
                let dirs = self
                    .directions
                    .clone()
                    .ok_or_else(|| HarnessError::Config("discrete measures need `directions`".into()))?;
                let n = dirs.len().max(1);
                let weights = self.weights.clone().unwrap_or_else(|| vec![1.0 / n as f64; n]);
                return Ok(HyperplaneMeasureSpec::discrete(d, dirs, weights, self.scale.unwrap_or(1.0))?);
            }
        };
        Ok(match self.scale {
            Some(s) => spec.with_scale(s)?,
            None => spec,
        })
    }
}

/// Observation window: `[0, side]^d` or a polytope ball about the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum WindowConfig {
    Box {
        #[serde(default = "one")]
        side: f64,
    },
    Ball {
        #[serde(default = "one")]
        radius: f64,
    },
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig::Box { side: 1.0 }
    }
}

impl WindowConfig {
    pub fn build(&self, d: usize) -> Result<ConvexPolytope, HarnessError> {
        match *self {
            WindowConfig::Box { side } if side > 0.0 && side.is_finite() => Ok(ConvexPolytope::cube(d, side)),
            WindowConfig::Ball { radius } if radius > 0.0 && radius.is_finite() => Ok(ConvexPolytope::ball(d, radius)?),
            _ => Err(HarnessError::Config("window size must be positive".into())),
        }
    }
}

impl FromStr for WindowConfig {
    type Err = HarnessError;

    /// `box:<side>` or `ball:<radius>`; the size defaults to 1.
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        let (shape, size) = s.split_once(':').unwrap_or((s, "1"));
        let size: f64 = size
            .parse()
            .map_err(|_| HarnessError::Config(format!("bad window size in `{s}`")))?;
        match shape {
            "box" => Ok(WindowConfig::Box { side: size }),
            "ball" => Ok(WindowConfig::Ball { radius: size }),
            _ => Err(HarnessError::Config(format!("unknown window `{s}`; use box:<side> or ball:<radius>"))),
        }
    }
}

/// Time parameters. Which fields matter depends on the experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub t: f64,
    /// Start of the increment window.
    pub s0: f64,
    /// Intervals of the observation grid.
    pub grid_intervals: usize,
    /// Window scales `R`, ascending.
    pub r_list: Vec<f64>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            t: 1.0,
            s0: 0.5,
            grid_intervals: 5,
            r_list: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centring {
    /// Subtract sample means (works for every `ζ`).
    #[default]
    Empirical,
    /// Subtract `t · Vol_d(W) · density`; surface functional only.
    Exact,
}

fn one() -> f64 {
    1.0
}

fn default_alpha() -> f64 {
    0.01
}

fn default_replications() -> usize {
    1000
}

fn default_true() -> bool {
    true
}

fn default_base_states() -> usize {
    500
}

fn default_continuations() -> usize {
    20
}

fn default_hyperplanes() -> usize {
    20
}

fn default_vw_replications() -> usize {
    200
}

fn default_tail_sigmas() -> f64 {
    3.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub dimension: usize,
    #[serde(default)]
    pub measure: MeasureConfig,
    #[serde(default)]
    pub window: WindowConfig,
    #[serde(default = "FaceFunctional::surface")]
    pub functional: FaceFunctional,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Relative tolerance; each experiment has its own default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub centring: Centring,
    #[serde(default = "default_base_states")]
    pub base_states: usize,
    #[serde(default = "default_continuations")]
    pub continuations: usize,
    /// Sampled hyperplanes per tessellation for compensator estimates.
    #[serde(default = "default_hyperplanes")]
    pub hyperplanes: usize,
    /// Replications for `V_W` when no closed form applies.
    #[serde(default = "default_vw_replications")]
    pub vw_replications: usize,
    #[serde(default = "default_tail_sigmas")]
    pub tail_sigmas: f64,
    /// Compute finite-window QMC references where available.
    #[serde(default = "default_true")]
    pub qmc_references: bool,
    /// Write raw samples as CSV next to the JSON result.
    #[serde(default = "default_true")]
    pub csv: bool,
    #[serde(default)]
    pub integrator: IntegratorConfig,
}

impl ExperimentConfig {
    /// A configuration with defaults everywhere except the essentials.
    pub fn new(experiment: ExperimentKind, dimension: usize, measure: MeasureKind) -> Self {
        ExperimentConfig {
            experiment,
            dimension,
            measure: MeasureConfig::of_kind(measure),
            window: WindowConfig::default(),
            functional: FaceFunctional::surface(),
            time: TimeConfig::default(),
            replications: default_replications(),
            seed: 0,
            alpha: default_alpha(),
            tolerance: None,
            centring: Centring::Empirical,
            base_states: default_base_states(),
            continuations: default_continuations(),
            hyperplanes: default_hyperplanes(),
            vw_replications: default_vw_replications(),
            tail_sigmas: default_tail_sigmas(),
            qmc_references: true,
            csv: true,
            integrator: IntegratorConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.replications < 2 {
            return bad("replications must be at least 2");
        }
        if !(self.dimension >= 2) {
            return bad("dimension must be at least 2");
        }
        let r = &self.time.r_list;
        if r.iter().any(|x| !(*x > 0.0 && x.is_finite())) || r.windows(2).any(|w| w[1] <= w[0]) {
            return bad("r_list must be positive and strictly ascending");
        }
        if !(self.time.t >= 0.0 && self.time.t.is_finite()) {
            return bad("t must be finite and non-negative");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must lie in (0, 1)");
        }
        if self.tolerance.is_some_and(|t| !(t > 0.0)) {
            return bad("tolerance must be positive");
        }
        if self.time.grid_intervals == 0 {
            return bad("grid_intervals must be at least 1");
        }
        let needs_r = matches!(
            self.experiment,
            ExperimentKind::IncrementClt
                | ExperimentKind::TotalLength2d
                | ExperimentKind::NonGaussian
                | ExperimentKind::IsotropicConstants
        );
        if needs_r && r.is_empty() {
            return bad("this experiment needs a non-empty r_list");
        }
        if matches!(self.experiment, ExperimentKind::IncrementClt | ExperimentKind::Martingale)
            && !(self.time.s0 > 0.0 && self.time.s0 <= 1.0)
        {
            return bad("s0 must lie in (0, 1]");
        }
        if self.experiment == ExperimentKind::Martingale && !(self.time.s0 <= self.time.t) {
            return bad("s0 must not exceed t");
        }
        if self.experiment == ExperimentKind::Martingale && (self.base_states < 3 || self.continuations == 0) {
            return bad("need at least 3 base states and 1 continuation");
        }
        if self.experiment == ExperimentKind::TotalLength2d && r.iter().any(|x| *x <= std::f64::consts::E) {
            return bad("the time change needs R > e");
        }
        self.measure.to_spec(self.dimension)?;
        self.window.build(self.dimension)?;
        Ok(())
    }
}
