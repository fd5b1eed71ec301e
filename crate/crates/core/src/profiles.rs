//! Closed-form initial data.
//!
//! The one-dimensional quintic ground state solves `Q'' + Q^5 = Q` and reads
//! `Q(x) = (3/16)^{1/4} * 2 / sqrt(cosh 2x)`. Its scaled copies
//! `Q_w(x) = w^{1/2} Q(w x)` and the pseudo-conformal orbit
//!
//! ```text
//! h_{T,w}(t, x) = (w/(T-t))^{1/2} exp(i|x|^2/(4(T-t)) - i w^2/(T-t)) Q(w x/(T-t))
//! ```
//!
//! give exact solutions of the focusing layer `i u_t - u_xx = |u|^4 u`; the
//! conjugate orbit solves the focusing layer of the nonlinearity-managed
//! model. Note that the standing wave of `i u_t - u_xx = |u|^4 u` with profile
//! `Q` rotates as `exp(-i t) Q`.
//!
//! Closed forms used by the diagnostics (with `w > 0`):
//!
//! * `I(h) = ((T-t)/w)^2 ||xQ||^2`
//! * `P(h) = (T-t)/(2 w^2) ||xQ||^2`, and `P(conj h) = -P(h)`
//! * `E_-(h) = ||xQ||^2 / (8 w^2)` for every `t < T`.
//!
//! One proof step in the literature writes `w` where the scaling above gives
//! `w^2`; these formulas follow the scaling.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{ComplexField, Grid};

/// `||Q||_2^2 = sqrt(3) pi / 2`.
pub const GROUND_STATE_MASS: f64 = 2.720_699_046_351_326_6;
/// `||x Q||_2^2 = sqrt(3) pi^3 / 32`.
pub const GROUND_STATE_VARIANCE: f64 = 1.678_263_955_119_292_2;

/// `Q(0) = 2 (3/16)^{1/4}`.
pub fn ground_state_peak() -> f64 {
    2.0 * (3.0f64 / 16.0).powf(0.25)
}

/// `Q(y)`, written through `sech` so that large arguments underflow to zero.
pub fn ground_state_value(y: f64) -> f64 {
    let a = 2.0 * y.abs();
    let e = (-a).exp();
    let sech = 2.0 * e / (1.0 + e * e);
    ground_state_peak() * sech.sqrt()
}

fn require_dim(grid: &Grid, expected: usize) -> Result<()> {
    if grid.dim() != expected {
        return Err(Error::WrongDimension {
            expected,
            found: grid.dim(),
        });
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

/// `Q_w(x) = w^{1/2} Q(w x)`, stamped at time 0.
pub fn ground_state_1d(omega: f64, grid: &Grid) -> Result<ComplexField> {
    require_dim(grid, 1)?;
    positive("omega", omega)?;
    let amp = omega.sqrt();
    let values = grid.sample(|[x, _]| Complex64::new(amp * ground_state_value(omega * x), 0.0));
    ComplexField::new(grid, values, 0.0)
}

/// Parameters of a pseudo-conformal blowup profile evaluated at `time`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoConformalSpec {
    pub blowup_time: f64,
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default)]
    pub shift: f64,
    #[serde(default)]
    pub phase: f64,
    #[serde(default)]
    pub conjugate: bool,
    #[serde(default)]
    pub time: f64,
}

fn one() -> f64 {
    1.0
}

impl PseudoConformalSpec {
    /// Centred, unrotated profile of blowup time `t_blow` sampled at `t = 0`.
    pub fn at_origin(blowup_time: f64, omega: f64, conjugate: bool) -> Self {
        Self {
            blowup_time,
            omega,
            shift: 0.0,
            phase: 0.0,
            conjugate,
            time: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("blowup_time", self.blowup_time)?;
        positive("omega", self.omega)?;
        if !(self.shift.is_finite() && self.phase.is_finite() && self.time.is_finite()) {
            return Err(Error::InvalidParameter("non-finite profile parameter".into()));
        }
        if self.time >= self.blowup_time {
            return Err(Error::TimePastBlowup {
                t: self.time,
                blowup_time: self.blowup_time,
            });
        }
        Ok(())
    }

    /// `I` of the exact profile.
    pub fn variance(&self) -> f64 {
        let s = self.blowup_time - self.time;
        (s / self.omega).powi(2) * GROUND_STATE_VARIANCE
    }

    /// `P` of the exact profile (sign flips for the conjugate orbit).
    pub fn virial(&self) -> f64 {
        let s = self.blowup_time - self.time;
        let p = s / (2.0 * self.omega * self.omega) * GROUND_STATE_VARIANCE;
        if self.conjugate {
            -p
        } else {
            p
        }
    }

    /// `E_-` of the exact profile.
    pub fn focusing_energy(&self) -> f64 {
        GROUND_STATE_VARIANCE / (8.0 * self.omega * self.omega)
    }

    /// Peak modulus `(w/(T-t))^{1/2} Q(0)`.
    pub fn peak(&self) -> f64 {
        (self.omega / (self.blowup_time - self.time)).sqrt() * ground_state_peak()
    }
}

/// Sample the pseudo-conformal profile (or its conjugate) on a 1D grid.
pub fn pseudo_conformal_field(spec: &PseudoConformalSpec, grid: &Grid) -> Result<ComplexField> {
    require_dim(grid, 1)?;
    spec.validate()?;
    let s = spec.blowup_time - spec.time;
    let w = spec.omega;
    let amp = (w / s).sqrt();
    let values = grid.sample(|[x, _]| {
        let y = x - spec.shift;
        let phase = y * y / (4.0 * s) - w * w / s + spec.phase;
        let v = Complex64::from_polar(amp * ground_state_value(w * y / s), phase);
        if spec.conjugate {
            v.conj()
        } else {
            v
        }
    });
    ComplexField::new(grid, values, spec.time)
}

/// `A sech(|x| / w)` on a 2D grid, stamped at time 0.
pub fn sech_profile_2d(amplitude: f64, width: f64, grid: &Grid) -> Result<ComplexField> {
    require_dim(grid, 2)?;
    positive("amplitude", amplitude)?;
    positive("width", width)?;
    let values = grid.sample(|[x, y]| {
        let r = (x * x + y * y).sqrt() / width;
        let e = (-r).exp();
        Complex64::new(amplitude * 2.0 * e / (1.0 + e * e), 0.0)
    });
    ComplexField::new(grid, values, 0.0)
}

/// Analytic mass of [`sech_profile_2d`] on the whole plane: `2 pi A^2 w^2 ln 2`.
pub fn sech_profile_2d_mass(amplitude: f64, width: f64) -> f64 {
    2.0 * PI * amplitude * amplitude * width * width * std::f64::consts::LN_2
}
