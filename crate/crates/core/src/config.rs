//! Experiment configuration: TOML with sections, or the same structure as JSON.
//!
//! ```toml
//! seed = 7
//!
//! [operator]
//! kind = "laplacian"      # laplacian | schrodinger | higher | random
//! alpha = [1.0, 0.0]
//! window = [-256, 256]
//!
//! [time]
//! t1 = 1.0
//! samples = 11
//! ```
//!
//! Every field has a default, so an empty file is a valid configuration.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice_ops::{build_higher_order_model, build_laplacian_1d, build_schrodinger_with_potential, BandedOperator};
use crate::sampling::{random_potential, random_scalar_operator, trial_rng, OperatorLimits};
use crate::state::Window;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Laplacian,
    Schrodinger,
    Higher,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    /// `[re, im]` coupling of the Laplacian part.
    pub alpha: [f64; 2],
    /// Half-bandwidth for `higher` and `random`.
    pub s: usize,
    /// Potential `V` is drawn uniformly from `[-potential_bound, potential_bound]`.
    pub potential_bound: f64,
    pub window: [i64; 2],
}

impl Default for OperatorSpec {
    fn default() -> Self {
        Self { kind: OperatorKind::Laplacian, alpha: [1.0, 0.0], s: 1, potential_bound: 1.0, window: [-64, 64] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self { t0: 0.0, t1: 1.0, samples: 11 }
    }
}

/// Rectangular grid `re, im in [-radius, radius]` with `points` per axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LambdaGrid {
    pub radius: f64,
    pub points: usize,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        Self { radius: 1.4, points: 5 }
    }
}

impl LambdaGrid {
    pub fn values(&self) -> Vec<Complex64> {
        let n = self.points.max(1);
        let axis: Vec<f64> = if n == 1 {
            vec![0.0]
        } else {
            (0..n).map(|i| -self.radius + 2.0 * self.radius * i as f64 / (n - 1) as f64).collect()
        };
        axis.iter().flat_map(|&re| axis.iter().map(move |&im| Complex64::new(re, im))).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSettings {
    pub eps: f64,
    /// Final time `T` of two-time audits.
    pub horizon: f64,
    pub thetas: Vec<f64>,
    pub radii: Vec<f64>,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self { eps: 0.1, horizon: 1.0, thetas: vec![0.0], radii: (0..10).map(|i| 8.0 + 1.2 * i as f64).collect() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Experiment name for `probe` (`entire`, `growth`, `indicator`, `decay`, `sharpness`).
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub tolerance_scale: Option<f64>,
    pub operator: OperatorSpec,
    pub time: TimeGrid,
    pub lambda: LambdaGrid,
    pub probe: ProbeSettings,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("{e}")))
    }

    /// Reads TOML, or JSON when the path ends in `.json`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") { Self::from_json(&text) } else { Self::from_toml(&text) };
        parsed.map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let canon = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&canon).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn window(&self) -> Result<Window> {
        Window::new(self.operator.window[0], self.operator.window[1]).map_err(|e| Error::Config(format!("operator.window: {e}")))
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.operator.alpha[0], self.operator.alpha[1])
    }

    pub fn tolerance_scale(&self) -> f64 {
        self.tolerance_scale.unwrap_or(1.0)
    }

    fn require_seed(&self, what: &str) -> Result<u64> {
        self.seed.ok_or_else(|| Error::Config(format!("{what} is randomized and needs a seed (`seed = N` or --seed)")))
    }

    pub fn validate(&self) -> Result<()> {
        self.window()?;
        if matches!(self.operator.kind, OperatorKind::Schrodinger | OperatorKind::Random) {
            self.require_seed("operator.kind")?;
        }
        if self.operator.s == 0 {
            return Err(Error::Config("operator.s must be at least 1".into()));
        }
        if !(self.time.t1 > self.time.t0) || self.time.samples < 2 {
            return Err(Error::Config("time grid needs t1 > t0 and at least 2 samples".into()));
        }
        if !(self.probe.horizon > 0.0) || self.probe.eps < 0.0 {
            return Err(Error::Config("probe.horizon must be positive and probe.eps non-negative".into()));
        }
        if let Some(x) = self.tolerance_scale {
            if !(x > 0.0) {
                return Err(Error::Config("tolerance_scale must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn build_operator(&self) -> Result<BandedOperator> {
        let w = self.window()?;
        match self.operator.kind {
            OperatorKind::Laplacian => build_laplacian_1d(self.alpha(), w),
            OperatorKind::Higher => build_higher_order_model(self.operator.s, w),
            OperatorKind::Schrodinger => {
                let mut rng = trial_rng(self.require_seed("operator.kind")?, 0);
                let v = random_potential(&mut rng, w, self.operator.potential_bound);
                build_schrodinger_with_potential(self.alpha(), &v, w)
            }
            OperatorKind::Random => {
                let mut rng = trial_rng(self.require_seed("operator.kind")?, 0);
                Ok(random_scalar_operator(&mut rng, self.operator.s, w, &OperatorLimits::default()))
            }
        }
    }
}
