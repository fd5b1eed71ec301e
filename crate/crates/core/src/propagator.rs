//! Layer-aligned Strang splitting for the managed NLS models.
//!
//! On each layer the equation has constant coefficients,
//! `i u_t + a Δu = b |u|^{p-1} u`, with `(a, b) = (gamma, 1)` for dispersion
//! management and `(1, gamma)` for nonlinearity management. Both sub-flows
//! are solved exactly: the nonlinear one is a pointwise phase rotation and the
//! linear one a diagonal phase in Fourier space. Step sizes are adjusted per
//! layer so that no step straddles a discontinuity of `gamma`.
//!
//! Since both sub-flows are `L^2` isometries the discrete mass is conserved
//! to round-off and `|u|` can never exceed `sqrt(mass / dx^d)`, so numerical
//! blowup shows up as loss of accuracy rather than overflow: a collapsing
//! profile outruns the step size and the scheme steps over the singularity.
//! Besides the amplitude and mass checks, the [`BlowupPolicy`] therefore
//! watches the drift of the layer energy and the share of spectral mass in
//! the top third of the resolved band.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticsSample, Probe};
use crate::error::{Error, Result};
use crate::lattice::{ComplexField, Grid, Transform};
use crate::management::{GammaSchedule, Layer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// `gamma(t)` multiplies the Laplacian.
    Dm,
    /// `gamma(t)` multiplies the nonlinearity.
    Nm,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Dm => "dm",
            ModelKind::Nm => "nm",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub exponent: f64,
}

impl ModelSpec {
    /// Mass-critical exponent `1 + 4/dim`.
    pub fn mass_critical(kind: ModelKind, dim: usize) -> Self {
        Self {
            kind,
            exponent: 1.0 + 4.0 / dim as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.exponent > 1.0 && self.exponent.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "nonlinearity exponent must exceed 1, got {}",
                self.exponent
            )))
        }
    }

    /// `(a, b)` of the layer equation `i u_t + a Δu = b |u|^{p-1} u`.
    pub fn layer_coefficients(&self, gamma: f64) -> (f64, f64) {
        match self.kind {
            ModelKind::Dm => (gamma, 1.0),
            ModelKind::Nm => (1.0, gamma),
        }
    }

    /// Coefficient of `∫|u|^{p+1}/(p+1)` in the energy conserved on a layer.
    ///
    /// For dispersion management the invariant `a/2 ||∇u||^2 + ∫|u|^{p+1}/(p+1)`
    /// is divided by `a = gamma`; for `|gamma| = 1` both models give the
    /// familiar `||∇u||^2/2 + gamma/(p+1) ∫|u|^{p+1}`.
    pub fn energy_coefficient(&self, gamma: f64) -> f64 {
        match self.kind {
            ModelKind::Dm => 1.0 / gamma,
            ModelKind::Nm => gamma,
        }
    }
}

/// Thresholds that turn a run into a detected (numerical) blowup.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlowupPolicy {
    /// Trigger when `linf > amplitude_factor * linf(t_begin)`.
    pub amplitude_factor: f64,
    /// Trigger when `|mass - mass0| / mass0` exceeds this.
    pub mass_drift_tolerance: f64,
    /// Absolute ceiling on `linf`.
    pub amplitude_ceiling: f64,
    /// Trigger when modes with some `|m| > n/3` carry more than this share
    /// of the spectral mass.
    pub spectral_tail_tolerance: f64,
    /// Trigger when the layer energy has moved, since the layer began, by more
    /// than this fraction of the larger of its entry and current scales (see
    /// [`DiagnosticsSample::energy_scale`]).
    pub energy_drift_tolerance: f64,
}

impl Default for BlowupPolicy {
    fn default() -> Self {
        Self {
            amplitude_factor: 1e3,
            mass_drift_tolerance: 1e-4,
            amplitude_ceiling: 1e9,
            spectral_tail_tolerance: 1e-2,
            energy_drift_tolerance: 1e-4,
        }
    }
}

impl BlowupPolicy {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.amplitude_factor,
            self.mass_drift_tolerance,
            self.amplitude_ceiling,
            self.spectral_tail_tolerance,
            self.energy_drift_tolerance,
        ];
        if all.iter().all(|v| *v > 0.0 && !v.is_nan()) {
            Ok(())
        } else {
            Err(Error::InvalidParameter("blowup thresholds must be positive".into()))
        }
    }

    fn check(&self, s: &DiagnosticsSample, mass0: f64, linf0: f64, entry: &LayerEntry) -> Option<BlowupReason> {
        if !(s.linf <= self.amplitude_ceiling) {
            return Some(BlowupReason::AmplitudeCeiling { linf: s.linf });
        }
        if s.linf > self.amplitude_factor * linf0 {
            return Some(BlowupReason::AmplitudeCap {
                linf: s.linf,
                cap: self.amplitude_factor * linf0,
            });
        }
        if mass0 > 0.0 {
            let drift = (s.mass - mass0).abs() / mass0;
            if !(drift <= self.mass_drift_tolerance) {
                return Some(BlowupReason::MassDrift { drift });
            }
        }
        if s.spectral_tail > self.spectral_tail_tolerance {
            return Some(BlowupReason::SpectralTail {
                fraction: s.spectral_tail,
            });
        }
        let scale = entry.scale.max(s.energy_scale(entry.coefficient, entry.exponent));
        if scale > 0.0 {
            let drift = (s.energy - entry.energy).abs() / scale;
            if !(drift <= self.energy_drift_tolerance) {
                return Some(BlowupReason::EnergyDrift { drift });
            }
        }
        None
    }
}

/// Energy and energy scale of the state entering the current layer.
struct LayerEntry {
    energy: f64,
    scale: f64,
    coefficient: f64,
    exponent: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "criterion", rename_all = "snake_case")]
pub enum BlowupReason {
    AmplitudeCeiling { linf: f64 },
    AmplitudeCap { linf: f64, cap: f64 },
    MassDrift { drift: f64 },
    SpectralTail { fraction: f64 },
    EnergyDrift { drift: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    BlowupDetected { t_detect: f64, last_stable: f64 },
}

impl RunStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }

    pub fn blowup_time(&self) -> Option<f64> {
        match self {
            RunStatus::Completed => None,
            RunStatus::BlowupDetected { t_detect, .. } => Some(*t_detect),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TrajectoryEvent {
    /// Energies of the interface state under the outgoing and incoming
    /// coefficients.
    LayerSwitch {
        t: f64,
        gamma_before: f64,
        gamma_after: f64,
        energy_before: f64,
        energy_after: f64,
    },
    Blowup {
        t_detect: f64,
        last_stable: f64,
        reason: BlowupReason,
    },
}

/// Realised time stepping on one layer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub start: f64,
    pub end: f64,
    pub gamma: f64,
    pub steps: usize,
    pub dt: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryLog {
    pub model: ModelSpec,
    pub samples: Vec<DiagnosticsSample>,
    pub events: Vec<TrajectoryEvent>,
    pub layers: Vec<LayerRecord>,
    pub status: RunStatus,
}

impl TrajectoryLog {
    /// `max |mass - mass0| / mass0` over the samples.
    pub fn max_mass_drift(&self) -> f64 {
        let Some(first) = self.samples.first() else {
            return 0.0;
        };
        if first.mass == 0.0 {
            return 0.0;
        }
        self.samples
            .iter()
            .map(|s| (s.mass - first.mass).abs() / first.mass)
            .fold(0.0, f64::max)
    }

    /// Largest within-layer energy excursion, relative to the energy scale of
    /// the state entering the layer.
    pub fn max_layer_energy_drift(&self) -> f64 {
        let p = self.model.exponent;
        let mut worst: f64 = 0.0;
        for layer in &self.layers {
            let coefficient = self.model.energy_coefficient(layer.gamma);
            let Some(entry) = self.samples.iter().find(|s| s.t >= layer.start) else {
                continue;
            };
            if entry.t != layer.start {
                continue;
            }
            let reference = entry.energy_with(coefficient, p);
            let scale = entry.energy_scale(coefficient, p);
            if scale == 0.0 {
                continue;
            }
            for s in self.samples.iter().filter(|s| s.t > layer.start && s.t <= layer.end) {
                worst = worst.max((s.energy - reference).abs() / scale);
            }
        }
        worst
    }

    pub fn layer_switches(&self) -> impl Iterator<Item = &TrajectoryEvent> {
        self.events
            .iter()
            .filter(|e| matches!(e, TrajectoryEvent::LayerSwitch { .. }))
    }
}

/// Result of [`evolve`]: the log plus the last state reached (the final
/// state of a completed run, or the state at the detecting sample).
#[derive(Clone, Debug)]
pub struct Evolution {
    pub log: TrajectoryLog,
    pub state: ComplexField,
}

impl Evolution {
    pub fn final_field(&self) -> Option<&ComplexField> {
        self.log.status.is_completed().then_some(&self.state)
    }
}

/// In-place Strang stepper with cached linear propagators.
pub(crate) struct Stepper {
    grid: Grid,
    transform: Transform,
    cache: Vec<(f64, f64, Vec<Complex64>)>,
}

const CACHE_SLOTS: usize = 4;

impl Stepper {
    pub(crate) fn new(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            transform: Transform::new(grid),
            cache: Vec::new(),
        }
    }

    fn linear_factors(&mut self, a: f64, dt: f64) -> usize {
        if let Some(pos) = self.cache.iter().position(|(ca, cd, _)| *ca == a && *cd == dt) {
            return pos;
        }
        let factors = self
            .grid
            .k_squared()
            .iter()
            .map(|k2| Complex64::from_polar(1.0, -a * k2 * dt))
            .collect();
        if self.cache.len() == CACHE_SLOTS {
            self.cache.remove(0);
        }
        self.cache.push((a, dt, factors));
        self.cache.len() - 1
    }

    /// One Strang step; returns false if the state became non-finite.
    pub(crate) fn step(&mut self, values: &mut [Complex64], dt: f64, a: f64, b: f64, p: f64) -> bool {
        nonlinear_flow(values, b, p, 0.5 * dt);
        self.transform.forward(values);
        let slot = self.linear_factors(a, dt);
        for (v, f) in values.iter_mut().zip(&self.cache[slot].2) {
            *v *= f;
        }
        self.transform.inverse(values);
        nonlinear_flow(values, b, p, 0.5 * dt)
    }
}

/// Exact flow of `i u_t = b |u|^{p-1} u` over `h`; reports finiteness.
fn nonlinear_flow(values: &mut [Complex64], b: f64, p: f64, h: f64) -> bool {
    let mut finite = true;
    let rate = -b * h;
    let apply = |v: &mut Complex64, power: f64, finite: &mut bool| {
        let rot = Complex64::from_polar(1.0, rate * power);
        *v *= rot;
        *finite &= v.re.is_finite() && v.im.is_finite();
    };
    if p == 5.0 {
        for v in values.iter_mut() {
            let m = v.norm_sqr();
            apply(v, m * m, &mut finite);
        }
    } else if p == 3.0 {
        for v in values.iter_mut() {
            let m = v.norm_sqr();
            apply(v, m, &mut finite);
        }
    } else {
        let e = 0.5 * (p - 1.0);
        for v in values.iter_mut() {
            let m = v.norm_sqr();
            apply(v, m.powf(e), &mut finite);
        }
    }
    finite
}

/// One Strang step of `i u_t + a Δu = b |u|^{p-1} u`: half nonlinear, full
/// linear, half nonlinear.
pub fn strang_step(u: &ComplexField, dt: f64, a: f64, b: f64, p: f64) -> Result<ComplexField> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("exponent must exceed 1, got {p}")));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter("non-finite layer coefficients".into()));
    }
    let mut values = u.values().to_vec();
    let t = u.time() + dt;
    if !Stepper::new(u.grid()).step(&mut values, dt, a, b, p) {
        return Err(Error::NonFiniteState { t });
    }
    Ok(ComplexField::from_parts(u.grid().clone(), values, t))
}

/// Evolve `u0` from `t_begin` to `t_end` through the layers of `schedule`.
///
/// Each layer of length `len` is covered by `ceil(len / dt_target)` equal
/// steps. A sample is taken every `sample_every` steps and at the end of
/// every layer; the policy is checked at each sample and the first violation
/// ends the run with [`RunStatus::BlowupDetected`].
#[allow(clippy::too_many_arguments)]
pub fn evolve(
    model: &ModelSpec,
    schedule: &GammaSchedule,
    u0: &ComplexField,
    t_begin: f64,
    t_end: f64,
    dt_target: f64,
    sample_every: usize,
    policy: &BlowupPolicy,
) -> Result<Evolution> {
    model.validate()?;
    policy.validate()?;
    if !(dt_target > 0.0 && dt_target.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt_target must be positive, got {dt_target}")));
    }
    if sample_every == 0 {
        return Err(Error::InvalidParameter("sample_every must be at least 1".into()));
    }
    if u0.time() != t_begin {
        return Err(Error::InvalidParameter(format!(
            "initial field is stamped t = {}, run starts at {t_begin}",
            u0.time()
        )));
    }
    if !u0.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    let layers: Vec<Layer> = schedule.layer_partition(t_begin, t_end)?;

    let grid = u0.grid();
    let p = model.exponent;
    let mut probe = Probe::new(grid);
    let mut stepper = Stepper::new(grid);
    let mut state = u0.values().to_vec();

    let first_gamma = layers[0].gamma;
    let initial = probe.measure(&state, t_begin, first_gamma, model.energy_coefficient(first_gamma), p);
    let (mass0, linf0) = (initial.mass, initial.linf);

    let mut log = TrajectoryLog {
        model: *model,
        samples: vec![initial],
        events: Vec::new(),
        layers: Vec::with_capacity(layers.len()),
        status: RunStatus::Completed,
    };

    let mut step_count: usize = 0;
    let mut last_stable = t_begin;
    for (index, layer) in layers.iter().enumerate() {
        let steps = ((layer.length() / dt_target).ceil() as usize).max(1);
        let dt = layer.length() / steps as f64;
        log.layers.push(LayerRecord {
            start: layer.start,
            end: layer.end,
            gamma: layer.gamma,
            steps,
            dt,
        });
        if index > 0 {
            let entry = *log.samples.last().expect("interface sample");
            log.events.push(TrajectoryEvent::LayerSwitch {
                t: layer.start,
                gamma_before: layers[index - 1].gamma,
                gamma_after: layer.gamma,
                energy_before: entry.energy,
                energy_after: entry.energy_with(model.energy_coefficient(layer.gamma), p),
            });
        }
        let (a, b) = model.layer_coefficients(layer.gamma);
        let coefficient = model.energy_coefficient(layer.gamma);
        let entry = {
            let s = log.samples.last().expect("entry sample");
            LayerEntry {
                energy: s.energy_with(coefficient, p),
                scale: s.energy_scale(coefficient, p),
                coefficient,
                exponent: p,
            }
        };
        for i in 1..=steps {
            let finite = stepper.step(&mut state, dt, a, b, p);
            let t = if i == steps {
                layer.end
            } else {
                layer.start + i as f64 * dt
            };
            step_count += 1;
            if !finite {
                return Err(Error::NonFiniteState { t });
            }
            if step_count.is_multiple_of(sample_every) || i == steps {
                let sample = probe.measure(&state, t, layer.gamma, coefficient, p);
                log.samples.push(sample);
                if let Some(reason) = policy.check(&sample, mass0, linf0, &entry) {
                    log.events.push(TrajectoryEvent::Blowup {
                        t_detect: t,
                        last_stable,
                        reason,
                    });
                    log.status = RunStatus::BlowupDetected {
                        t_detect: t,
                        last_stable,
                    };
                    let state = ComplexField::from_parts(grid.clone(), state, t);
                    return Ok(Evolution { log, state });
                }
                last_stable = t;
            }
        }
    }
    let state = ComplexField::from_parts(grid.clone(), state, t_end);
    Ok(Evolution { log, state })
}
