//! Run configuration: one JSON document per run.
//!
//! ```json
//! {
//!   "id": "nm-blowup-T2.5",
//!   "model": { "kind": "nm" },
//!   "map": { "gamma_minus": 1, "gamma_plus": 1, "t_star": 1, "t_period": 2 },
//!   "profile": { "kind": "backward_construction", "layer": 1, "target_time": 2.5 },
//!   "grid": { "dim": 1, "half_width": 37.699111843077517, "points": 2048 },
//!   "dt_target": 0.0005,
//!   "t_end": 2.6
//! }
//! ```
//!
//! `map` is either a dispersion map or `{ "constant": -1 }` for a single
//! unmanaged layer. A catalog id can stand in for the whole document.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mnls_core::{BlowupPolicy, DispersionMap, GammaSchedule, Grid, ModelKind, ModelSpec};
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{BenchError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    /// Defaults to the mass-critical `1 + 4/dim`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub half_width: f64,
    pub points: usize,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    /// Pseudo-conformal blowup profile sampled at `t = 0`.
    PseudoConformal {
        blowup_time: f64,
        #[serde(default = "one")]
        omega: f64,
        #[serde(default)]
        conjugate: bool,
    },
    /// `amplitude * Q_omega` (1D).
    ScaledGroundState {
        amplitude: f64,
        #[serde(default = "one")]
        omega: f64,
    },
    /// `amplitude * sech(|x| / width)` (2D).
    Sech2d { amplitude: f64, width: f64 },
    /// Initial data from the backward construction on the run's own grid,
    /// step size and policy.
    BackwardConstruction {
        layer: u32,
        target_time: f64,
        #[serde(default = "one")]
        omega: f64,
    },
    /// A field snapshot written by an earlier run.
    Snapshot { path: PathBuf },
}

/// Where the run horizon comes from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonSource {
    /// Quoted or implied by the experiment being reproduced.
    Quoted,
    /// Not stated there; chosen by the catalog.
    #[default]
    Default,
}

fn ten() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub model: ModelConfig,
    pub map: GammaSchedule,
    pub profile: ProfileConfig,
    pub grid: GridConfig,
    pub dt_target: f64,
    pub t_end: f64,
    #[serde(default = "ten")]
    pub sample_every: usize,
    #[serde(default)]
    pub policy: BlowupPolicy,
    /// Write SVG plots of `linf` and `energy` next to the series.
    #[serde(default)]
    pub plots: bool,
    #[serde(default)]
    pub horizon: HorizonSource,
    /// Parameter values quoted for the experiment being reproduced (step
    /// sizes, mesh bounds, blowup times, amplitudes); copied to the metadata.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub quoted: BTreeMap<String, f64>,
}

/// Command-line overrides of individual fields.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub dt_target: Option<f64>,
    pub points: Option<usize>,
    pub half_width: Option<f64>,
    pub t_end: Option<f64>,
}

/// A validated configuration with its derived objects.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub config: RunConfig,
    pub model: ModelSpec,
    pub grid: Grid,
}

fn config_error(msg: impl Into<String>) -> BenchError {
    BenchError::Config(msg.into())
}

impl RunConfig {
    /// A catalog id, or else a path to a JSON document.
    pub fn resolve(target: &str) -> Result<Self> {
        if let Some(entry) = catalog::lookup(target) {
            return Ok(entry);
        }
        let path = Path::new(target);
        if !path.exists() {
            return Err(BenchError::UnknownExperiment(target.to_string()));
        }
        Self::from_path(path)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| BenchError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn with_overrides(mut self, o: &Overrides) -> Self {
        if let Some(dt) = o.dt_target {
            self.dt_target = dt;
        }
        if let Some(n) = o.points {
            self.grid.points = n;
        }
        if let Some(l) = o.half_width {
            self.grid.half_width = l;
        }
        if let Some(t) = o.t_end {
            self.t_end = t;
        }
        self
    }

    pub fn label(&self) -> &str {
        self.id.as_deref().unwrap_or("run")
    }

    pub fn model_spec(&self) -> ModelSpec {
        let mut spec = ModelSpec::mass_critical(self.model.kind, self.grid.dim);
        if let Some(p) = self.model.exponent {
            spec.exponent = p;
        }
        spec
    }

    /// Start time of the run (snapshots carry their own).
    pub fn t_begin(&self) -> Result<f64> {
        match &self.profile {
            ProfileConfig::Snapshot { path } => Ok(crate::snapshot::read_header(path)?.time),
            _ => Ok(0.0),
        }
    }

    /// Check every field and build the grid; no time stepping happens here.
    pub fn prepare(&self) -> Result<Prepared> {
        let model = self.model_spec();
        model.validate().map_err(|e| config_error(e.to_string()))?;
        self.map.validate().map_err(|e| config_error(e.to_string()))?;
        self.policy.validate().map_err(|e| config_error(e.to_string()))?;
        let g = &self.grid;
        let grid = Grid::new(g.dim, g.half_width, g.points).map_err(|e| config_error(e.to_string()))?;
        if !(self.dt_target > 0.0 && self.dt_target.is_finite()) {
            return Err(config_error(format!("dt_target must be positive, got {}", self.dt_target)));
        }
        if self.sample_every == 0 {
            return Err(config_error("sample_every must be at least 1"));
        }
        let t_begin = self.t_begin()?;
        if !(self.t_end > t_begin && self.t_end.is_finite()) {
            return Err(config_error(format!("t_end {} must exceed the start time {t_begin}", self.t_end)));
        }
        let require_dim = |d: usize, what: &str| {
            if g.dim == d {
                Ok(())
            } else {
                Err(config_error(format!("{what} needs a {d}D grid, got {}D", g.dim)))
            }
        };
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(config_error(format!("{name} must be positive, got {v}")))
            }
        };
        match &self.profile {
            ProfileConfig::PseudoConformal { blowup_time, omega, .. } => {
                require_dim(1, "pseudo_conformal")?;
                positive("blowup_time", *blowup_time)?;
                positive("omega", *omega)?;
            }
            ProfileConfig::ScaledGroundState { amplitude, omega } => {
                require_dim(1, "scaled_ground_state")?;
                positive("amplitude", *amplitude)?;
                positive("omega", *omega)?;
            }
            ProfileConfig::Sech2d { amplitude, width } => {
                require_dim(2, "sech2d")?;
                positive("amplitude", *amplitude)?;
                positive("width", *width)?;
            }
            ProfileConfig::BackwardConstruction { .. } => {
                self.construction_spec(&grid)?.validate().map_err(|e| config_error(e.to_string()))?;
                if model != ModelSpec::mass_critical(model.kind, 1) {
                    return Err(config_error("backward construction needs the mass-critical exponent"));
                }
                if self.map != GammaSchedule::Periodic(DispersionMap::normalized()) {
                    return Err(config_error("backward construction is defined for the normalised map"));
                }
            }
            ProfileConfig::Snapshot { path } => {
                let header = crate::snapshot::read_header(path)?;
                if header.dim != g.dim || header.points != g.points || header.half_width != g.half_width {
                    return Err(config_error(format!(
                        "snapshot {} is on a {}D grid with n = {}, L = {}; config asks for {}D, n = {}, L = {}",
                        path.display(),
                        header.dim,
                        header.points,
                        header.half_width,
                        g.dim,
                        g.points,
                        g.half_width
                    )));
                }
            }
        }
        Ok(Prepared {
            config: self.clone(),
            model,
            grid,
        })
    }

    /// Construction parameters for a `backward_construction` profile.
    pub fn construction_spec(&self, grid: &Grid) -> Result<mnls_core::BackwardConstructionSpec> {
        let ProfileConfig::BackwardConstruction {
            layer,
            target_time,
            omega,
        } = self.profile
        else {
            return Err(config_error("profile is not a backward construction"));
        };
        let mut spec = mnls_core::BackwardConstructionSpec::new(
            layer,
            target_time,
            self.model.kind,
            grid.clone(),
            self.dt_target,
        )
        .map_err(|e| config_error(e.to_string()))?;
        spec.omega = omega;
        spec.sample_every = self.sample_every;
        spec.policy = self.policy;
        Ok(spec)
    }
}
