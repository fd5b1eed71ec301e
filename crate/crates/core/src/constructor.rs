//! Backward construction of initial data with a prescribed late blowup.
//!
//! To make the nonlinearity-managed solution equal the conjugate
//! pseudo-conformal orbit at `t = 2n`, solve the auxiliary problem
//!
//! ```text
//! i v_t + Δv = gamma(2n - t) |v|^{4/d} v,   v(0) = P_{T*} R_w (2n)
//! ```
//!
//! over `(0, 2n]` and set `u0 = conj(v(2n))`, so that `u(t) = conj(v(2n - t))`.
//! Because the orbit only depends on `T* - t`, the seed is the profile with
//! blowup time `T* - 2n` sampled at zero.
//!
//! The dispersion-managed analogue solves `i v_t + gamma(2n - t) Δv = |v|^4 v`
//! from the conjugate seed; that auxiliary solve is expected to break down
//! before reaching `2n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{ComplexField, Grid};
use crate::management::{DispersionMap, GammaSchedule};
use crate::profiles::{pseudo_conformal_field, PseudoConformalSpec};
use crate::propagator::{evolve, BlowupPolicy, ModelKind, ModelSpec, RunStatus, TrajectoryLog};

/// Whether the target time lies inside the focusing layer `(2n, 2n+1)`
/// (blowup) or past it (the solution only re-concentrates).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstructionMode {
    Blowup,
    Revival,
}

#[derive(Clone, Debug)]
pub struct BackwardConstructionSpec {
    pub layer: u32,
    pub target_time: f64,
    pub omega: f64,
    pub kind: ModelKind,
    pub mode: ConstructionMode,
    pub dt_target: f64,
    pub sample_every: usize,
    pub policy: BlowupPolicy,
    pub grid: Grid,
}

impl BackwardConstructionSpec {
    /// Mode inferred from the target time.
    pub fn new(layer: u32, target_time: f64, kind: ModelKind, grid: Grid, dt_target: f64) -> Result<Self> {
        let n = layer as f64;
        let mode = if target_time < 2.0 * n + 1.0 {
            ConstructionMode::Blowup
        } else {
            ConstructionMode::Revival
        };
        let spec = Self {
            layer,
            target_time,
            omega: 1.0,
            kind,
            mode,
            dt_target,
            sample_every: 10,
            policy: BlowupPolicy::default(),
            grid,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `2n`, where the constructed solution must match the profile.
    pub fn match_time(&self) -> f64 {
        2.0 * self.layer as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer < 1 {
            return Err(Error::InvalidParameter("layer index must be at least 1".into()));
        }
        if self.grid.dim() != 1 {
            return Err(Error::WrongDimension {
                expected: 1,
                found: self.grid.dim(),
            });
        }
        let n2 = self.match_time();
        if !(self.target_time > n2 && self.target_time.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "target time {} must exceed 2n = {n2}",
                self.target_time
            )));
        }
        if self.mode == ConstructionMode::Blowup && !(self.target_time < n2 + 1.0) {
            return Err(Error::InvalidParameter(format!(
                "blowup target {} must lie in ({n2}, {})",
                self.target_time,
                n2 + 1.0
            )));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {}", self.omega)));
        }
        if !(self.dt_target > 0.0) || self.sample_every == 0 {
            return Err(Error::InvalidParameter("invalid time stepping".into()));
        }
        self.policy.validate()
    }

    /// Seed profile of the auxiliary solve (conjugated for the dispersion-managed attempt).
    pub fn seed_spec(&self) -> PseudoConformalSpec {
        PseudoConformalSpec::at_origin(
            self.target_time - self.match_time(),
            self.omega,
            self.kind == ModelKind::Dm,
        )
    }

    /// Normalised map reversed about `2n`.
    pub fn auxiliary_schedule(&self) -> GammaSchedule {
        GammaSchedule::Periodic(
            DispersionMap::normalized()
                .reversed(self.match_time())
                .expect("normalised map is valid"),
        )
    }
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub seed: ComplexField,
    /// Initial datum of the forward problem, stamped at `t = 0`.
    pub initial: ComplexField,
    pub log: TrajectoryLog,
}

/// Run the auxiliary backward solve and return the forward initial datum.
pub fn backward_blowup_data(spec: &BackwardConstructionSpec) -> Result<Construction> {
    spec.validate()?;
    let seed = pseudo_conformal_field(&spec.seed_spec(), &spec.grid)?;
    let model = ModelSpec::mass_critical(spec.kind, 1);
    let run = evolve(
        &model,
        &spec.auxiliary_schedule(),
        &seed,
        0.0,
        spec.match_time(),
        spec.dt_target,
        spec.sample_every,
        &spec.policy,
    )?;
    match run.log.status {
        RunStatus::Completed => Ok(Construction {
            seed,
            initial: run.state.conj().with_time(0.0),
            log: run.log,
        }),
        RunStatus::BlowupDetected {
            t_detect,
            last_stable,
        } => Err(Error::BlowupDuringConstruction {
            t_detect,
            last_stable,
            log: Box::new(run.log),
        }),
    }
}
