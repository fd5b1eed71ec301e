use thiserror::Error;

use crate::propagator::TrajectoryLog;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: only 1 and 2 are supported")]
    InvalidDimension(usize),
    #[error("invalid resolution {0}: points per axis must be a power of two and at least 8")]
    InvalidResolution(usize),
    #[error("invalid half width {0}: must be positive and finite")]
    InvalidHalfWidth(f64),
    #[error("field on a {found}D grid where a {expected}D grid is required")]
    WrongDimension { expected: usize, found: usize },
    #[error("field has {found} values, grid expects {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("field contains non-finite amplitudes")]
    NonFiniteInput,
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("empty time window ({begin}, {end}]")]
    EmptyWindow { begin: f64, end: f64 },
    #[error("invalid management map: {0}")]
    InvalidMap(String),
    #[error("evaluation time {t} is not before the blowup time {blowup_time}")]
    TimePastBlowup { t: f64, blowup_time: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("state became non-finite at t = {t} without a prior blowup trigger")]
    NonFiniteState { t: f64 },
    #[error("need at least {needed} samples inside one layer, found {found}")]
    InsufficientSamples { needed: usize, found: usize },
    #[error("auxiliary backward solve blew up at t = {t_detect} (last stable t = {last_stable})")]
    BlowupDuringConstruction {
        t_detect: f64,
        last_stable: f64,
        log: Box<TrajectoryLog>,
    },
}
