//! Conserved and virial functionals, and finite-difference checks of the
//! virial identities along logged trajectories.
//!
//! For a field `u` with exponent `p` and layer coefficient `gamma`:
//!
//! ```text
//! mass      = ∫ |u|^2
//! kinetic   = ∫ |∇u|^2
//! potential = ∫ |u|^{p+1}
//! energy    = kinetic / 2 + gamma / (p+1) * potential
//! I         = ∫ |x|^2 |u|^2
//! P         = Im ∫ x·∇u conj(u)
//! ```
//!
//! Positions are measured from the grid centre; integrals use the rectangle
//! rule and gradients are spectral.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{apply_derivative, ComplexField, Grid, Transform};
use crate::propagator::{ModelKind, ModelSpec, TrajectoryLog};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSample {
    pub t: f64,
    pub layer_gamma: f64,
    pub mass: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub energy: f64,
    pub variance: f64,
    pub virial: f64,
    pub linf: f64,
    /// Share of spectral mass in modes with some `|m| > n/3`.
    pub spectral_tail: f64,
}

impl DiagnosticsSample {
    /// Energy of the same state under a different potential coefficient.
    pub fn energy_with(&self, coefficient: f64, exponent: f64) -> f64 {
        0.5 * self.kinetic + coefficient / (exponent + 1.0) * self.potential
    }

    /// Sum of the magnitudes of the two energy terms; the natural scale for
    /// relative energy errors.
    pub fn energy_scale(&self, coefficient: f64, exponent: f64) -> f64 {
        0.5 * self.kinetic + coefficient.abs() / (exponent + 1.0) * self.potential
    }
}

/// All functionals of `u` with the energy taken at coefficient `gamma_now`.
pub fn sample_diagnostics(u: &ComplexField, gamma_now: f64, p: f64) -> DiagnosticsSample {
    let mut probe = Probe::new(u.grid());
    probe.measure(u.values(), u.time(), gamma_now, gamma_now, p)
}

/// Reusable buffers for repeated measurements on one grid.
pub(crate) struct Probe {
    grid: Grid,
    transform: Transform,
    spectrum: Vec<Complex64>,
    gradient: Vec<Complex64>,
}

impl Probe {
    pub(crate) fn new(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            transform: Transform::new(grid),
            spectrum: vec![Complex64::new(0.0, 0.0); grid.len()],
            gradient: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub(crate) fn measure(
        &mut self,
        values: &[Complex64],
        t: f64,
        layer_gamma: f64,
        energy_coefficient: f64,
        p: f64,
    ) -> DiagnosticsSample {
        let grid = &self.grid;
        let dv = grid.cell_volume();
        let half_power = 0.5 * (p + 1.0);

        let mut mass = 0.0;
        let mut potential = 0.0;
        let mut variance = 0.0;
        let mut linf: f64 = 0.0;
        for (i, v) in values.iter().enumerate() {
            let m = v.norm_sqr();
            mass += m;
            potential += m.powf(half_power);
            variance += grid.radius_squared(i) * m;
            linf = linf.max(m);
        }

        self.spectrum.copy_from_slice(values);
        self.transform.forward(&mut self.spectrum);
        let cutoff = (grid.points() / 3) as i64;
        let (mut total, mut tail) = (0.0, 0.0);
        for (idx, f) in self.spectrum.iter().enumerate() {
            let w = f.norm_sqr();
            total += w;
            let [a, b] = grid.modes(idx);
            if a.abs() > cutoff || b.abs() > cutoff {
                tail += w;
            }
        }
        let tail_fraction = if total > 0.0 { tail / total } else { 0.0 };

        let mut kinetic = 0.0;
        let mut virial = 0.0;
        for axis in 0..grid.dim() {
            self.gradient.copy_from_slice(&self.spectrum);
            apply_derivative(grid, &mut self.gradient, axis);
            self.transform.inverse(&mut self.gradient);
            for (i, (g, v)) in self.gradient.iter().zip(values).enumerate() {
                kinetic += g.norm_sqr();
                let x = grid.position(i)[axis];
                virial += x * (g * v.conj()).im;
            }
        }

        let kinetic = kinetic * dv;
        let potential = potential * dv;
        DiagnosticsSample {
            t,
            layer_gamma,
            mass: mass * dv,
            kinetic,
            potential,
            energy: 0.5 * kinetic + energy_coefficient / (p + 1.0) * potential,
            variance: variance * dv,
            virial: virial * dv,
            linf: linf.sqrt(),
            spectral_tail: tail_fraction,
        }
    }
}

/// Residuals of the virial identities at one interior sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VirialResidual {
    pub t: f64,
    pub gamma: f64,
    /// `|dI/dt - 4 c P|`
    pub variance_rate: f64,
    /// `|dP/dt - 4 c E|`
    pub virial_rate: f64,
}

/// Centred (non-uniform, second-order) derivative at the middle of three samples.
fn centred_derivative(t: [f64; 3], f: [f64; 3]) -> f64 {
    let h1 = t[1] - t[0];
    let h2 = t[2] - t[1];
    (h1 * h1 * f[2] - h2 * h2 * f[0] + (h2 * h2 - h1 * h1) * f[1]) / (h1 * h2 * (h1 + h2))
}

/// Finite-difference residuals of `dI/dt = 4cP` and `dP/dt = 4cE` (with
/// `c = gamma` for dispersion management, `c = 1` for nonlinearity
/// management) at every interior sample of every layer. Samples sitting on
/// interfaces only serve as stencil end points.
pub fn virial_residuals(log: &TrajectoryLog, model: &ModelSpec) -> Result<Vec<VirialResidual>> {
    let samples = &log.samples;
    let mut out = Vec::new();
    let mut best = 0;
    for layer in &log.layers {
        let members: Vec<_> = samples
            .iter()
            .filter(|s| s.t >= layer.start && s.t <= layer.end)
            .collect();
        best = best.max(members.len());
        if members.len() < 3 {
            continue;
        }
        let c = match model.kind {
            ModelKind::Dm => layer.gamma,
            ModelKind::Nm => 1.0,
        };
        for w in members.windows(3) {
            let ts = [w[0].t, w[1].t, w[2].t];
            let di = centred_derivative(ts, [w[0].variance, w[1].variance, w[2].variance]);
            let dp = centred_derivative(ts, [w[0].virial, w[1].virial, w[2].virial]);
            out.push(VirialResidual {
                t: w[1].t,
                gamma: layer.gamma,
                variance_rate: (di - 4.0 * c * w[1].virial).abs(),
                virial_rate: (dp - 4.0 * c * w[1].energy).abs(),
            });
        }
    }
    if out.is_empty() {
        return Err(Error::InsufficientSamples {
            needed: 3,
            found: best,
        });
    }
    Ok(out)
}
