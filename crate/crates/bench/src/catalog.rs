//! Built-in experiments, one per numerical experiment being reproduced.
//!
//! Grids are chosen so that the mesh is no coarser than the quoted `dx`
//! (recorded under `dx_max`) and the box holds the solution for the whole
//! horizon. Horizons not fixed by the experiment default to 30 in 1D and 0.5
//! in 2D.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use mnls_core::{BlowupPolicy, DispersionMap, GammaSchedule, ModelKind};

use crate::config::{GridConfig, HorizonSource, ModelConfig, ProfileConfig, RunConfig};

pub struct Entry {
    pub id: &'static str,
    pub description: &'static str,
}

fn quoted(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn normalized_quotes(mut q: BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    q.extend(quoted(&[
        ("gamma_minus", 1.0),
        ("gamma_plus", 1.0),
        ("t_star", 1.0),
        ("t_period", 2.0),
    ]));
    q
}

#[allow(clippy::too_many_arguments)]
fn config(
    id: &str,
    kind: ModelKind,
    map: GammaSchedule,
    profile: ProfileConfig,
    grid: (usize, f64, usize),
    dt: f64,
    t_end: f64,
    sample_every: usize,
    horizon: HorizonSource,
    quoted: BTreeMap<String, f64>,
) -> RunConfig {
    RunConfig {
        id: Some(id.to_string()),
        description: describe(id).map(str::to_string),
        model: ModelConfig { kind, exponent: None },
        map,
        profile,
        grid: GridConfig {
            dim: grid.0,
            half_width: grid.1,
            points: grid.2,
        },
        dt_target: dt,
        t_end,
        sample_every,
        policy: BlowupPolicy::default(),
        plots: false,
        horizon,
        quoted,
    }
}

const ENTRIES: &[Entry] = &[
    Entry {
        id: "dm-global-T1.5",
        description: "DM, normalised map, pseudo-conformal data with T0 = 1.5",
    },
    Entry {
        id: "nm-global-T1.5",
        description: "NM, normalised map, conjugate pseudo-conformal data with T0 = 1.5",
    },
    Entry {
        id: "focusing-T0.5",
        description: "focusing NLS, pseudo-conformal data blowing up at T0 = 0.5",
    },
    Entry {
        id: "nm-blowup-T2.5",
        description: "NM, backward-constructed data blowing up at T* = 2.5",
    },
    Entry {
        id: "dm-backward-T2.5",
        description: "DM, backward construction for T* = 2.5 (breaks down before t = 2)",
    },
    Entry {
        id: "nm-T0-2",
        description: "NM, conjugate pseudo-conformal data with T0 = 2",
    },
    Entry {
        id: "nm-T0-5",
        description: "NM, conjugate pseudo-conformal data with T0 = 5",
    },
    Entry {
        id: "nm-T0-8",
        description: "NM, conjugate pseudo-conformal data with T0 = 8",
    },
    Entry {
        id: "nm-revival-n2-T5.5",
        description: "NM, backward construction n = 2, T* = 5.5",
    },
    Entry {
        id: "nm-revival-n4-T9.5",
        description: "NM, backward construction n = 4, T* = 9.5",
    },
    Entry {
        id: "focusing-cQ-1.03",
        description: "focusing NLS, u0 = 1.03 Q",
    },
    Entry {
        id: "focusing-cQ-1.01",
        description: "focusing NLS, u0 = 1.01 Q",
    },
    Entry {
        id: "dm-cQ-1.03",
        description: "DM, normalised map, u0 = 1.03 Q",
    },
    Entry {
        id: "dm-cQ-1.01",
        description: "DM, normalised map, u0 = 1.01 Q",
    },
    Entry {
        id: "nm-cQ-1.03",
        description: "NM, normalised map, u0 = 1.03 Q",
    },
    Entry {
        id: "nm-cQ-1.01",
        description: "NM, normalised map, u0 = 1.01 Q",
    },
    Entry {
        id: "2d-fast-focusing",
        description: "2D focusing NLS, u0 = 5 sech(|x|/0.86)",
    },
    Entry {
        id: "2d-fast-dm",
        description: "2D DM, fast map t0 = 0.001, u0 = 5 sech(|x|/0.86)",
    },
    Entry {
        id: "2d-fast-nm",
        description: "2D NM, fast map t0 = 0.001, u0 = 5 sech(|x|/0.86)",
    },
];

pub fn entries() -> &'static [Entry] {
    ENTRIES
}

pub fn ids() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|e| e.id)
}

fn describe(id: &str) -> Option<&'static str> {
    ENTRIES.iter().find(|e| e.id == id).map(|e| e.description)
}

fn normalized() -> GammaSchedule {
    GammaSchedule::Periodic(DispersionMap::normalized())
}

/// Full configuration of a catalog experiment.
pub fn lookup(id: &str) -> Option<RunConfig> {
    describe(id)?;
    let kind_of = |prefix: &str| if prefix == "nm" { ModelKind::Nm } else { ModelKind::Dm };
    let c = match id {
        "dm-global-T1.5" | "nm-global-T1.5" => {
            let kind = kind_of(&id[..2]);
            // NM solutions disperse: the wider box keeps the tail off the
            // periodic boundary, and 8192 points resolve the DM peaks.
            let grid = match kind {
                ModelKind::Dm => (1, 24.0 * PI, 8192),
                ModelKind::Nm => (1, 48.0 * PI, 4096),
            };
            config(
                id,
                kind,
                normalized(),
                ProfileConfig::PseudoConformal {
                    blowup_time: 1.5,
                    omega: 1.0,
                    conjugate: kind == ModelKind::Nm,
                },
                grid,
                1e-4,
                30.0,
                10,
                HorizonSource::Default,
                normalized_quotes(quoted(&[("blowup_time", 1.5)])),
            )
        }
        "focusing-T0.5" => config(
            id,
            ModelKind::Dm,
            GammaSchedule::focusing(),
            ProfileConfig::PseudoConformal {
                blowup_time: 0.5,
                omega: 1.0,
                conjugate: false,
            },
            (1, 4.0 * PI, 2048),
            5e-5,
            0.6,
            1,
            HorizonSource::Quoted,
            quoted(&[("blowup_time", 0.5)]),
        ),
        "nm-blowup-T2.5" | "dm-backward-T2.5" => config(
            id,
            kind_of(&id[..2]),
            normalized(),
            ProfileConfig::BackwardConstruction {
                layer: 1,
                target_time: 2.5,
                omega: 1.0,
            },
            if id.starts_with("nm") {
                (1, 12.0 * PI, 2048)
            } else {
                (1, 12.0 * PI, 1024)
            },
            5e-4,
            2.6,
            10,
            HorizonSource::Quoted,
            normalized_quotes(quoted(&[
                ("dt", 5e-4),
                ("dx_max", if id.starts_with("nm") { 0.046 } else { 0.0767 }),
                ("layer", 1.0),
                ("target_time", 2.5),
            ])),
        ),
        "nm-T0-2" | "nm-T0-5" | "nm-T0-8" => {
            let t0: f64 = id["nm-T0-".len()..].parse().ok()?;
            config(
                id,
                ModelKind::Nm,
                normalized(),
                ProfileConfig::PseudoConformal {
                    blowup_time: t0,
                    omega: 1.0,
                    conjugate: true,
                },
                (1, 48.0 * PI, 4096),
                1e-4,
                30.0,
                10,
                HorizonSource::Default,
                normalized_quotes(quoted(&[("blowup_time", t0)])),
            )
        }
        "nm-revival-n2-T5.5" | "nm-revival-n4-T9.5" => {
            let (n, t_star) = if id.contains("n2") { (2, 5.5) } else { (4, 9.5) };
            config(
                id,
                ModelKind::Nm,
                normalized(),
                ProfileConfig::BackwardConstruction {
                    layer: n,
                    target_time: t_star,
                    omega: 1.0,
                },
                (1, 12.0 * PI, 2048),
                1e-4,
                2.0 * n as f64 + 2.0,
                10,
                HorizonSource::Default,
                normalized_quotes(quoted(&[("layer", n as f64), ("target_time", t_star)])),
            )
        }
        _ if id.contains("-cQ-") => {
            let (head, c) = id.split_once("-cQ-")?;
            let c: f64 = c.parse().ok()?;
            let (kind, map) = match head {
                "focusing" => (ModelKind::Dm, GammaSchedule::focusing()),
                "dm" => (ModelKind::Dm, normalized()),
                _ => (ModelKind::Nm, normalized()),
            };
            config(
                id,
                kind,
                map,
                ProfileConfig::ScaledGroundState { amplitude: c, omega: 1.0 },
                (1, 12.0 * PI, 1024),
                2.5e-4,
                10.0,
                10,
                HorizonSource::Default,
                quoted(&[("amplitude", c), ("dt", 2.5e-4), ("dx_max", 0.0767)]),
            )
        }
        _ if id.starts_with("2d-fast-") => {
            let head = &id["2d-fast-".len()..];
            let t0 = 0.001;
            let fast = GammaSchedule::Periodic(DispersionMap {
                t_star: t0 / 2.0,
                t_period: t0,
                ..DispersionMap::normalized()
            });
            let (kind, map) = match head {
                "focusing" => (ModelKind::Dm, GammaSchedule::focusing()),
                "dm" => (ModelKind::Dm, fast),
                _ => (ModelKind::Nm, fast),
            };
            let mut q = quoted(&[("amplitude", 5.0), ("width", 0.86), ("dt", 2.5e-5), ("dx_max", 0.1473)]);
            if head != "focusing" {
                q.extend(quoted(&[
                    ("gamma_minus", 1.0),
                    ("gamma_plus", 1.0),
                    ("t_star", t0 / 2.0),
                    ("t_period", t0),
                ]));
            }
            config(
                id,
                kind,
                map,
                ProfileConfig::Sech2d {
                    amplitude: 5.0,
                    width: 0.86,
                },
                (2, 6.0 * PI, 256),
                2.5e-5,
                0.5,
                40,
                HorizonSource::Default,
                q,
            )
        }
        _ => return None,
    };
    Some(c)
}
