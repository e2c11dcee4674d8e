//! Versioned TOML configuration for sweeps.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::RotatingBlob;

pub const SCHEMA_VERSION: u32 = 1;

/// Initial vorticity family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    /// cos(k x₁).
    Shear { k: u32 },
    /// cos x₁ + cos x₂.
    TaylorGreen,
    /// Random trigonometric polynomial with modes |k|_∞ ≤ max_mode.
    RandomSmooth {
        seed: u64,
        #[serde(default = "default_max_mode")]
        max_mode: i64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Signed Gaussian blobs with Σ|mass| = total_mass.
    L1Blobs {
        seed: u64,
        count: usize,
        width: f64,
        #[serde(default = "one")]
        total_mass: f64,
    },
    /// Uniform nonnegative density on the segment {x₂ = 0, |x₁| ≤ half_length}
    /// with total mass `strength`, mollified per the mollification rule.
    Sheet {
        #[serde(default = "one")]
        strength: f64,
        #[serde(default = "one")]
        half_length: f64,
    },
    /// A mollified sheet plus a random smooth L^p part.
    MeasurePlusLp {
        seed: u64,
        #[serde(default = "one")]
        strength: f64,
        #[serde(default = "one")]
        half_length: f64,
        #[serde(default = "one")]
        lp_amplitude: f64,
        #[serde(default = "default_max_mode")]
        lp_max_mode: i64,
        #[serde(default = "two")]
        p: f64,
    },
}

impl DataSpec {
    /// The same spec with its seed replaced; seedless specs are unchanged.
    pub fn reseeded(&self, new_seed: u64) -> DataSpec {
        let mut spec = self.clone();
        match &mut spec {
            DataSpec::RandomSmooth { seed, .. }
            | DataSpec::L1Blobs { seed, .. }
            | DataSpec::MeasurePlusLp { seed, .. } => *seed = new_seed,
            DataSpec::Shear { .. } | DataSpec::TaylorGreen | DataSpec::Sheet { .. } => {}
        }
        spec
    }
}

fn default_max_mode() -> i64 {
    8
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

/// Mollification width as a function of ν.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum MollificationRule {
    /// Width w₀ for every ν.
    Fixed { width: f64 },
    /// Width c·ν^{1/2}.
    Coupled { coefficient: f64 },
}

impl Default for MollificationRule {
    fn default() -> Self {
        MollificationRule::Fixed { width: 0.1 }
    }
}

impl MollificationRule {
    pub fn width(&self, nu: f64) -> f64 {
        match *self {
            MollificationRule::Fixed { width } => width,
            MollificationRule::Coupled { coefficient } => coefficient * nu.sqrt(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingSpec {
    #[default]
    None,
    RotatingBlob(RotatingBlob),
}

/// A viscosity sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema_version: u32,
    /// Grid points per axis.
    pub n: usize,
    #[serde(rename = "T")]
    pub horizon: f64,
    /// Defaults to T/10.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Strictly decreasing viscosities.
    pub nu_list: Vec<f64>,
    pub data: DataSpec,
    #[serde(default)]
    pub mollification: MollificationRule,
    #[serde(default)]
    pub forcing: ForcingSpec,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// Radii for the concentration diagnostics.
    #[serde(default = "default_radii")]
    pub concentration_radii: Vec<f64>,
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_radii() -> Vec<f64> {
    vec![0.8, 0.4, 0.2, 0.1, 0.05]
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(self.horizon / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return fail(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.n < 8 || !self.n.is_power_of_two() {
            return fail(format!("n must be a power of two >= 8, got {}", self.n));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return fail(format!("T must be positive, got {}", self.horizon));
        }
        let delta = self.delta();
        if !(delta >= 0.0 && delta < self.horizon) {
            return fail(format!("delta must satisfy 0 <= delta < T, got {delta}"));
        }
        if self.nu_list.is_empty() {
            return fail("nu_list is empty".into());
        }
        if self.nu_list.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return fail("every viscosity must be positive".into());
        }
        if self.nu_list.windows(2).any(|w| w[1] >= w[0]) {
            return fail("nu_list must be strictly decreasing".into());
        }
        if self.snapshot_times.iter().any(|&t| !(t >= 0.0 && t <= self.horizon)) {
            return fail("snapshot times must lie in [0, T]".into());
        }
        if self.concentration_radii.iter().any(|&r| !(r > 0.0 && r <= std::f64::consts::PI)) {
            return fail("concentration radii must lie in (0, π]".into());
        }
        if self.workers == Some(0) {
            return fail("workers must be at least 1".into());
        }
        match self.mollification {
            MollificationRule::Fixed { width } if !(width > 0.0) => {
                return fail(format!("mollification width must be positive, got {width}"))
            }
            MollificationRule::Coupled { coefficient } if !(coefficient > 0.0) => {
                return fail(format!("mollification coefficient must be positive, got {coefficient}"))
            }
            _ => {}
        }
        if let ForcingSpec::RotatingBlob(b) = self.forcing {
            b.validate()?;
        }
        Ok(())
    }
}
