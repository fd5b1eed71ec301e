//! Manageability sweeps over map parameters.
//!
//! A solution is judged manageable on `[0, t_end]` when the run completes,
//! `sup_t |u|_inf <= upper` and the maximum of `|u|_inf` over every full map
//! period is at least `lower`.
//!
//! ```json
//! {
//!   "base": "dm-global-T1.5",
//!   "criterion": { "lower": 0.5, "upper": 2.0, "t_end": 30 },
//!   "axes": { "gamma_plus": [0.5, 1, 2] }
//! }
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use mnls_core::{GammaSchedule, TrajectoryLog};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{BenchError, Result};
use crate::output::write_atomic;
use crate::run::{execute, Status};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManageabilityCriterion {
    pub lower: f64,
    pub upper: f64,
    pub t_end: f64,
}

impl ManageabilityCriterion {
    pub fn validate(&self) -> Result<()> {
        if 0.0 < self.lower && self.lower < self.upper && self.upper.is_finite() && self.t_end > 0.0 {
            Ok(())
        } else {
            Err(BenchError::Config(format!(
                "criterion needs 0 < lower < upper < inf and t_end > 0, got {self:?}"
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    GammaMinus,
    GammaPlus,
    TStar,
    TPeriod,
    Epsilon,
}

impl Axis {
    pub const ALL: [Axis; 5] = [Axis::GammaMinus, Axis::GammaPlus, Axis::TStar, Axis::TPeriod, Axis::Epsilon];

    pub fn name(&self) -> &'static str {
        match self {
            Axis::GammaMinus => "gamma_minus",
            Axis::GammaPlus => "gamma_plus",
            Axis::TStar => "t_star",
            Axis::TPeriod => "t_period",
            Axis::Epsilon => "epsilon",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseConfig {
    Id(String),
    Inline(Box<RunConfig>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: BaseConfig,
    pub criterion: ManageabilityCriterion,
    pub axes: BTreeMap<Axis, Vec<f64>>,
}

impl SweepSpec {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| BenchError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn base_config(&self) -> Result<RunConfig> {
        match &self.base {
            BaseConfig::Id(s) => RunConfig::resolve(s),
            BaseConfig::Inline(c) => Ok((**c).clone()),
        }
    }

    /// Parameter tuples in row-major order of the axes.
    pub fn cells(&self) -> Result<Vec<BTreeMap<Axis, f64>>> {
        if self.axes.is_empty() || self.axes.values().any(Vec::is_empty) {
            return Err(BenchError::Config("sweep axes must be nonempty".into()));
        }
        let mut cells = vec![BTreeMap::new()];
        for (axis, values) in &self.axes {
            cells = cells
                .into_iter()
                .flat_map(|cell| {
                    values.iter().map(move |&v| {
                        let mut c = cell.clone();
                        c.insert(*axis, v);
                        c
                    })
                })
                .collect();
        }
        Ok(cells)
    }
}

/// Apply one parameter tuple to the base configuration.
pub fn cell_config(base: &RunConfig, criterion: &ManageabilityCriterion, cell: &BTreeMap<Axis, f64>) -> Result<RunConfig> {
    let mut c = base.clone();
    c.t_end = criterion.t_end;
    let GammaSchedule::Periodic(map) = &mut c.map else {
        return Err(BenchError::Config("sweeps need a periodic map".into()));
    };
    for (axis, &v) in cell {
        match axis {
            Axis::GammaMinus => map.gamma_minus = v,
            Axis::GammaPlus => map.gamma_plus = v,
            Axis::TStar => map.t_star = v,
            Axis::TPeriod => map.t_period = v,
            Axis::Epsilon => map.epsilon = v,
        }
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub params: BTreeMap<Axis, f64>,
    /// `Err` holds the message of a cell that could not be run.
    pub run: std::result::Result<CellRun, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellRun {
    pub status: Status,
    pub period_max: Vec<f64>,
    pub sup_linf: f64,
}

impl CellRun {
    pub fn from_log(log: &TrajectoryLog, status: Status, period: f64) -> Self {
        Self {
            status,
            period_max: period_maxima(log, period),
            sup_linf: log.samples.iter().map(|s| s.linf).fold(0.0, f64::max),
        }
    }

    pub fn min_period_max(&self) -> f64 {
        self.period_max.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn manageable(&self, c: &ManageabilityCriterion) -> bool {
        self.status.is_completed() && self.sup_linf <= c.upper && self.period_max.iter().all(|&m| m >= c.lower)
    }
}

impl CellResult {
    pub fn manageable(&self, c: &ManageabilityCriterion) -> bool {
        self.run.as_ref().is_ok_and(|r| r.manageable(c))
    }
}

/// Maximum of `linf` over each full period `(k T, (k+1) T]` covered by the
/// samples (the `t = 0` sample belongs to the first). A run shorter than one
/// period yields a single window.
pub fn period_maxima(log: &TrajectoryLog, period: f64) -> Vec<f64> {
    let Some(last) = log.samples.last() else {
        return Vec::new();
    };
    let t0 = log.samples[0].t;
    let full = (((last.t - t0) / period) * (1.0 + 1e-12)).floor() as usize;
    let windows = full.max(1);
    let mut maxima = vec![f64::NEG_INFINITY; windows];
    for s in &log.samples {
        let k = (((s.t - t0) / period) * (1.0 - 1e-12)).ceil().max(1.0) as usize - 1;
        if k < windows {
            maxima[k] = maxima[k].max(s.linf);
        }
    }
    maxima
}

fn run_cell(base: &RunConfig, criterion: &ManageabilityCriterion, params: &BTreeMap<Axis, f64>) -> Result<CellRun> {
    let c = cell_config(base, criterion, params)?;
    let p = c.prepare()?;
    let period = c.map.period().expect("periodic map");
    let o = execute(&p)?;
    let status = o.status();
    let log = o.log().or(o.construction.as_ref()).expect("a run leaves a log");
    Ok(CellRun::from_log(log, status, period))
}

/// Worker count: the available parallelism, capped by `MNLS_THREADS`.
pub fn worker_count() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    std::env::var("MNLS_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .map_or(available, |n| n.min(available))
}

pub fn sweep_manageability(spec: &SweepSpec) -> Result<Vec<CellResult>> {
    spec.criterion.validate()?;
    let base = spec.base_config()?;
    let cells = spec.cells()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| BenchError::Config(format!("thread pool: {e}")))?;
    let results = pool.install(|| {
        cells
            .into_par_iter()
            .map(|params| {
                let run = run_cell(&base, &spec.criterion, &params).map_err(|e| e.to_string());
                CellResult { params, run }
            })
            .collect()
    });
    Ok(results)
}

fn fmt(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        String::new()
    }
}

pub fn results_csv(spec: &SweepSpec, results: &[CellResult]) -> Vec<u8> {
    let io = "writing to memory cannot fail";
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = Axis::ALL.iter().filter(|a| spec.axes.contains_key(a)).map(|a| a.name()).collect();
    header.extend([
        "status",
        "t_detect",
        "periods",
        "sup_linf",
        "min_period_max",
        "manageable",
        "period_max",
        "error",
    ]);
    w.write_record(&header).expect(io);
    for r in results {
        let mut row: Vec<String> = r.params.values().map(|v| v.to_string()).collect();
        match &r.run {
            Ok(run) => {
                let status = if run.status.is_completed() { "completed" } else { "blowup" };
                row.extend([
                    status.to_string(),
                    run.status.blowup_time().map_or(String::new(), fmt),
                    run.period_max.len().to_string(),
                    fmt(run.sup_linf),
                    fmt(run.min_period_max()),
                    run.manageable(&spec.criterion).to_string(),
                    run.period_max.iter().map(|v| fmt(*v)).collect::<Vec<_>>().join(";"),
                    String::new(),
                ]);
            }
            Err(e) => {
                row.extend(["error", "", "", "", "", "false", ""].map(String::from));
                row.push(e.clone());
            }
        }
        w.write_record(&row).expect(io);
    }
    w.into_inner().expect(io)
}

pub fn write_results(path: &Path, spec: &SweepSpec, results: &[CellResult]) -> Result<()> {
    let bytes = results_csv(spec, results);
    write_atomic(path, |w| w.write_all(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mnls_core::{DiagnosticsSample, ModelKind, ModelSpec, RunStatus};

    fn log_with(points: &[(f64, f64)]) -> TrajectoryLog {
        TrajectoryLog {
            model: ModelSpec::mass_critical(ModelKind::Dm, 1),
            samples: points
                .iter()
                .map(|&(t, linf)| DiagnosticsSample {
                    t,
                    layer_gamma: 1.0,
                    mass: 1.0,
                    kinetic: 0.0,
                    potential: 0.0,
                    energy: 0.0,
                    variance: 0.0,
                    virial: 0.0,
                    linf,
                    spectral_tail: 0.0,
                })
                .collect(),
            events: Vec::new(),
            layers: Vec::new(),
            status: RunStatus::Completed,
        }
    }

    #[test]
    fn period_windows_are_left_open() {
        let log = log_with(&[(0.0, 5.0), (1.0, 1.0), (2.0, 2.0), (3.0, 3.0), (4.0, 0.5), (4.5, 9.0)]);
        assert_eq!(period_maxima(&log, 2.0), vec![5.0, 3.0]);
        let short = log_with(&[(0.0, 1.0), (0.5, 2.0)]);
        assert_eq!(period_maxima(&short, 2.0), vec![2.0]);
    }

    #[test]
    fn verdict_requires_both_bounds_and_completion() {
        let c = ManageabilityCriterion {
            lower: 0.5,
            upper: 2.0,
            t_end: 4.0,
        };
        let run = CellRun {
            status: Status::Completed,
            period_max: vec![1.5, 0.8],
            sup_linf: 1.5,
        };
        assert!(run.manageable(&c));
        assert!(!CellRun { sup_linf: 2.5, ..run.clone() }.manageable(&c));
        assert!(!CellRun {
            period_max: vec![1.5, 0.4],
            ..run.clone()
        }
        .manageable(&c));
        let blown = CellRun {
            status: Status::Blowup {
                stage: crate::run::Stage::Forward,
                t_detect: 1.0,
                last_stable: 0.9,
                reason: None,
            },
            ..run
        };
        assert!(!blown.manageable(&c));
    }

    #[test]
    fn criterion_bounds_are_checked() {
        for (lower, upper) in [(0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (0.5, f64::INFINITY)] {
            let c = ManageabilityCriterion { lower, upper, t_end: 1.0 };
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn cells_form_the_product_of_the_axes() {
        let spec = SweepSpec {
            base: BaseConfig::Id("nm-global-T1.5".into()),
            criterion: ManageabilityCriterion {
                lower: 0.1,
                upper: 3.0,
                t_end: 2.0,
            },
            axes: BTreeMap::from([(Axis::GammaPlus, vec![1.0, 2.0]), (Axis::TStar, vec![0.5, 1.0, 1.5])]),
        };
        let cells = spec.cells().unwrap();
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[1][&Axis::TStar], 1.0);
        assert_eq!(cells[3][&Axis::GammaPlus], 2.0);
        let empty = SweepSpec {
            axes: BTreeMap::from([(Axis::Epsilon, vec![])]),
            ..spec
        };
        assert!(empty.cells().is_err());
    }
}
