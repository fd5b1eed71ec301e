//! Pseudo-spectral simulation of mass-critical nonlinear Schrödinger equations
//! under periodic dispersion management (the time-periodic coefficient
//! multiplies the Laplacian) or nonlinearity management (it multiplies the
//! nonlinearity).
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: periodic grids, FFT-based differentiation and quadrature.
//! * [`management`]: the piecewise-constant periodic coefficient and its
//!   layer structure.
//! * [`profiles`]: closed-form initial data (ground state, pseudo-conformal
//!   blowup profiles, 2D sech datum).
//! * [`diagnostics`]: mass, energy, variance and virial functionals.
//! * [`propagator`]: layer-aligned Strang splitting with blowup detection.
//! * [`constructor`]: backward construction of data that blows up in a
//!   prescribed later focusing layer.

// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructor;
pub mod diagnostics;
mod error;
pub mod lattice;
pub mod management;
pub mod profiles;
pub mod propagator;

pub use constructor::{backward_blowup_data, BackwardConstructionSpec, Construction, ConstructionMode};
pub use diagnostics::{sample_diagnostics, virial_residuals, DiagnosticsSample, VirialResidual};
pub use error::{Error, Result};
pub use lattice::{make_grid, spectral_gradient, ComplexField, Grid};
pub use management::{DispersionMap, GammaSchedule, Layer};
pub use profiles::{
    ground_state_1d, pseudo_conformal_field, sech_profile_2d, PseudoConformalSpec,
};
pub use propagator::{
    evolve, strang_step, BlowupPolicy, BlowupReason, Evolution, LayerRecord, ModelKind,
    ModelSpec, RunStatus, TrajectoryEvent, TrajectoryLog,
};

pub use num_complex::Complex64;

/// Crate version, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
