//! Running one configuration and writing its output bundle.
//!
//! A bundle directory holds `series.csv`, `events.jsonl` and `meta.json`,
//! plus `final.mnls` when the run completes and `linf.svg`/`energy.svg` when
//! plots are requested. Backward constructions add `construction.csv`,
//! `construction_events.jsonl` and, on success, `initial.mnls`.

use std::collections::BTreeMap;
use std::path::Path;

use mnls_core::{
    backward_blowup_data, evolve, ground_state_1d, pseudo_conformal_field, sech_profile_2d, BlowupReason, Complex64,
    ComplexField, Error as CoreError, Evolution, PseudoConformalSpec, RunStatus, TrajectoryEvent, TrajectoryLog,
};
use serde::Serialize;

use crate::config::{HorizonSource, Prepared, ProfileConfig, RunConfig};
use crate::error::Result;
use crate::{output, plot, snapshot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Construction,
    Forward,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Completed,
    Blowup {
        stage: Stage,
        t_detect: f64,
        last_stable: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        reason: Option<BlowupReason>,
    },
}

impl Status {
    pub fn is_completed(&self) -> bool {
        matches!(self, Status::Completed)
    }

    pub fn blowup_time(&self) -> Option<f64> {
        match self {
            Status::Completed => None,
            Status::Blowup { t_detect, .. } => Some(*t_detect),
        }
    }

    fn of(log: &TrajectoryLog, stage: Stage) -> Self {
        match log.status {
            RunStatus::Completed => Status::Completed,
            RunStatus::BlowupDetected { t_detect, last_stable } => Status::Blowup {
                stage,
                t_detect,
                last_stable,
                reason: log.events.iter().rev().find_map(|e| match e {
                    TrajectoryEvent::Blowup { reason, .. } => Some(*reason),
                    _ => None,
                }),
            },
        }
    }
}

/// Everything a run produced, before it is written out.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub prepared: Prepared,
    /// Log of the auxiliary solve of a backward construction.
    pub construction: Option<TrajectoryLog>,
    /// Initial datum of the forward run (absent if the construction failed).
    pub initial: Option<ComplexField>,
    pub forward: Option<Evolution>,
}

impl Outcome {
    pub fn status(&self) -> Status {
        if let Some(f) = &self.forward {
            return Status::of(&f.log, Stage::Forward);
        }
        match &self.construction {
            Some(log) => Status::of(log, Stage::Construction),
            None => Status::Completed,
        }
    }

    /// Forward log, if the forward run took place.
    pub fn log(&self) -> Option<&TrajectoryLog> {
        self.forward.as_ref().map(|f| &f.log)
    }
}

fn initial_field(p: &Prepared) -> Result<(Option<TrajectoryLog>, Option<ComplexField>)> {
    let g = &p.grid;
    let field = match &p.config.profile {
        ProfileConfig::PseudoConformal {
            blowup_time,
            omega,
            conjugate,
        } => pseudo_conformal_field(&PseudoConformalSpec::at_origin(*blowup_time, *omega, *conjugate), g)?,
        ProfileConfig::ScaledGroundState { amplitude, omega } => {
            ground_state_1d(*omega, g)?.scaled(Complex64::new(*amplitude, 0.0))?
        }
        ProfileConfig::Sech2d { amplitude, width } => sech_profile_2d(*amplitude, *width, g)?,
        ProfileConfig::Snapshot { path } => snapshot::read(path)?,
        ProfileConfig::BackwardConstruction { .. } => {
            return match backward_blowup_data(&p.config.construction_spec(g)?) {
                Ok(c) => Ok((Some(c.log), Some(c.initial))),
                Err(CoreError::BlowupDuringConstruction { log, .. }) => Ok((Some(*log), None)),
                Err(e) => Err(e.into()),
            };
        }
    };
    Ok((None, Some(field)))
}

/// Initial data only: for constructions this is the backward solve.
pub fn construct(p: &Prepared) -> Result<Outcome> {
    let (construction, initial) = initial_field(p)?;
    Ok(Outcome {
        prepared: p.clone(),
        construction,
        initial,
        forward: None,
    })
}

/// Build the initial data and evolve it to `t_end`.
pub fn execute(p: &Prepared) -> Result<Outcome> {
    let mut out = construct(p)?;
    if let Some(u0) = &out.initial {
        let c = &p.config;
        out.forward = Some(evolve(
            &p.model,
            &c.map,
            u0,
            u0.time(),
            c.t_end,
            c.dt_target,
            c.sample_every,
            &c.policy,
        )?);
    }
    Ok(out)
}

/// Validate, run and write the bundle to `out_dir`.
pub fn run_experiment(config: &RunConfig, out_dir: &Path) -> Result<Outcome> {
    let prepared = config.prepare()?;
    let outcome = execute(&prepared)?;
    write_bundle(&outcome, out_dir)?;
    Ok(outcome)
}

#[derive(Serialize)]
struct Realized {
    dim: usize,
    points: usize,
    half_width: f64,
    dx: f64,
    dt_min: f64,
    dt_max: f64,
    steps: usize,
    layers: usize,
}

impl Realized {
    fn new(p: &Prepared, log: Option<&TrajectoryLog>) -> Self {
        let layers = log.map(|l| l.layers.as_slice()).unwrap_or(&[]);
        let dts = || layers.iter().filter(|r| r.steps > 0).map(|r| r.dt);
        Self {
            dim: p.grid.dim(),
            points: p.grid.points(),
            half_width: p.grid.half_width(),
            dx: p.grid.spacing(),
            dt_min: dts().fold(f64::INFINITY, f64::min),
            dt_max: dts().fold(0.0, f64::max),
            steps: layers.iter().map(|r| r.steps).sum(),
            layers: layers.len(),
        }
    }
}

#[derive(Serialize)]
struct Horizon {
    t_begin: f64,
    t_end: f64,
    source: HorizonSource,
}

#[derive(Serialize)]
struct Summary {
    samples: usize,
    final_time: f64,
    sup_linf: f64,
    max_mass_drift: f64,
    max_layer_energy_drift: f64,
}

impl Summary {
    fn new(log: &TrajectoryLog) -> Self {
        Self {
            samples: log.samples.len(),
            final_time: log.samples.last().map_or(0.0, |s| s.t),
            sup_linf: log.samples.iter().map(|s| s.linf).fold(0.0, f64::max),
            max_mass_drift: log.max_mass_drift(),
            max_layer_energy_drift: log.max_layer_energy_drift(),
        }
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    id: Option<&'a str>,
    description: Option<&'a str>,
    status: Status,
    horizon: Horizon,
    realized: Realized,
    #[serde(skip_serializing_if = "Option::is_none")]
    construction_realized: Option<Realized>,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<Summary>,
    quoted: &'a BTreeMap<String, f64>,
    versions: BTreeMap<&'static str, &'static str>,
    config: &'a RunConfig,
}

pub fn write_bundle(o: &Outcome, dir: &Path) -> Result<()> {
    let p = &o.prepared;
    let c = &p.config;
    if let Some(log) = &o.construction {
        output::write_series(&dir.join("construction.csv"), &log.samples)?;
        output::write_events(&dir.join("construction_events.jsonl"), &log.events)?;
        if let Some(u0) = &o.initial {
            snapshot::write(&dir.join("initial.mnls"), u0)?;
        }
    }
    if let Some(f) = &o.forward {
        let series = dir.join("series.csv");
        output::write_series(&series, &f.log.samples)?;
        output::write_events(&dir.join("events.jsonl"), &f.log.events)?;
        if let Some(u) = f.final_field() {
            snapshot::write(&dir.join("final.mnls"), u)?;
        }
        if c.plots && !f.log.samples.is_empty() {
            plot::emit_plot(&series, &["linf"], &dir.join("linf.svg"))?;
            plot::emit_plot(&series, &["energy"], &dir.join("energy.svg"))?;
        }
    }
    let meta = Meta {
        id: c.id.as_deref(),
        description: c.description.as_deref(),
        status: o.status(),
        horizon: Horizon {
            t_begin: o.initial.as_ref().map_or(0.0, |u| u.time()),
            t_end: c.t_end,
            source: c.horizon,
        },
        realized: Realized::new(p, o.log()),
        construction_realized: o.construction.as_ref().map(|l| Realized::new(p, Some(l))),
        summary: o.log().map(Summary::new),
        quoted: &c.quoted,
        versions: BTreeMap::from([("mnls-core", mnls_core::VERSION), ("mnls-bench", crate::VERSION)]),
        config: c,
    };
    output::write_json(&dir.join("meta.json"), &meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Overrides;

    fn small(id: &str) -> RunConfig {
        crate::catalog::lookup(id).unwrap().with_overrides(&Overrides {
            points: Some(256),
            half_width: Some(4.0 * std::f64::consts::PI),
            t_end: Some(0.2),
            dt_target: Some(1e-3),
        })
    }

    #[test]
    fn completed_run_writes_full_bundle() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small("nm-global-T1.5");
        c.plots = true;
        let o = run_experiment(&c, dir.path()).unwrap();
        assert!(o.status().is_completed());
        for f in ["series.csv", "events.jsonl", "meta.json", "final.mnls", "linf.svg", "energy.svg"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let meta: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("meta.json")).unwrap()).unwrap();
        assert_eq!(meta["status"]["status"], "completed");
        assert_eq!(meta["realized"]["points"], 256);
        assert_eq!(meta["versions"]["mnls-core"], mnls_core::VERSION);
        let last = snapshot::read(&dir.path().join("final.mnls")).unwrap();
        assert_eq!(&last, &o.forward.as_ref().unwrap().state);
    }

    #[test]
    fn failed_construction_is_a_blowup_status() {
        let dir = tempfile::tempdir().unwrap();
        let c = crate::catalog::lookup("dm-backward-T2.5").unwrap().with_overrides(&Overrides {
            points: Some(512),
            ..Default::default()
        });
        let o = run_experiment(&c, dir.path()).unwrap();
        assert!(matches!(
            o.status(),
            Status::Blowup {
                stage: Stage::Construction,
                ..
            }
        ));
        assert!(dir.path().join("construction.csv").exists());
        assert!(!dir.path().join("initial.mnls").exists());
        assert!(!dir.path().join("series.csv").exists());
    }
}
