//! Snapshots, plots, catalog parameters and the command-line interface.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

use mnls_bench::output::Series;
use mnls_bench::{catalog, plot, snapshot, BenchError, ProfileConfig, RunConfig};
use mnls_core::{Complex64, ComplexField, GammaSchedule, Grid};
use proptest::prelude::*;

fn series_file(dir: &Path, rows: &[[f64; 9]]) -> std::path::PathBuf {
    let path = dir.join("series.csv");
    let mut text = String::from("t,layer_gamma,mass,kinetic,potential,energy,I,P,linf\n");
    for r in rows {
        text.push_str(&r.map(|v| v.to_string()).join(","));
        text.push('\n');
    }
    std::fs::write(&path, text).unwrap();
    path
}

fn rows(n: usize) -> Vec<[f64; 9]> {
    (0..n)
        .map(|i| {
            let t = i as f64 * 0.1;
            [t, -1.0, 2.7, 1.0, 2.0, t.floor(), 3.0, 1.0, 1.0 + (3.0 * t).sin().abs()]
        })
        .collect()
}

#[test]
fn plots_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let series = series_file(dir.path(), &rows(50));
    let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
    plot::emit_plot(&series, &["linf"], &a).unwrap();
    plot::emit_plot(&series, &["linf"], &b).unwrap();
    let svg = std::fs::read(&a).unwrap();
    assert_eq!(svg, std::fs::read(&b).unwrap());
    let text = String::from_utf8(svg).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("<polyline").count(), 1);
    let two = plot::render(&Series::read(&series).unwrap(), &["linf", "energy"]).unwrap();
    assert_eq!(two.matches("<polyline").count(), 2);
}

#[test]
fn plot_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = series_file(dir.path(), &[]);
    let out = dir.path().join("x.svg");
    assert!(matches!(plot::emit_plot(&empty, &["linf"], &out), Err(BenchError::EmptySeries)));
    let series = series_file(dir.path(), &rows(3));
    assert!(matches!(
        plot::emit_plot(&series, &["phase"], &out),
        Err(BenchError::MissingColumn(c)) if c == "phase"
    ));
    assert!(!out.exists());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn snapshots_round_trip_exactly(
        values in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 64),
        time in 0.0f64..100.0,
        l in 0.1f64..100.0,
        two_d in any::<bool>(),
    ) {
        let g = if two_d { Grid::new(2, l, 8).unwrap() } else { Grid::new(1, l, 64).unwrap() };
        let u = ComplexField::new(&g, values.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(), time).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.mnls");
        snapshot::write(&path, &u).unwrap();
        let back = snapshot::read(&path).unwrap();
        prop_assert_eq!(back.grid(), u.grid());
        prop_assert_eq!(back.time().to_bits(), time.to_bits());
        prop_assert!(back.values().iter().zip(u.values()).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
    }
}

#[test]
fn snapshot_restarts_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = catalog::lookup("nm-global-T1.5").unwrap();
    c.grid.points = 512;
    c.grid.half_width = 12.0 * PI;
    c.dt_target = 1e-3;
    c.t_end = 0.5;
    let first = mnls_bench::run_experiment(&c, &dir.path().join("a")).unwrap();
    assert!(first.status().is_completed());

    let mut resumed = c.clone();
    resumed.profile = ProfileConfig::Snapshot {
        path: dir.path().join("a").join("final.mnls"),
    };
    resumed.t_end = 1.0;
    let second = mnls_bench::run_experiment(&resumed, &dir.path().join("b")).unwrap();
    let s = &second.log().unwrap().samples;
    assert_eq!(s[0].t, 0.5);
    assert_eq!(s.last().unwrap().t, 1.0);

    // A snapshot on a different grid is rejected before any compute.
    resumed.grid.points = 256;
    assert!(matches!(resumed.prepare(), Err(BenchError::Config(_))));
}

/// Quoted step sizes, mesh bounds, times, amplitudes and map parameters.
#[test]
fn catalog_matches_quoted_parameters() {
    let expected = [
        "dm-global-T1.5",
        "nm-global-T1.5",
        "focusing-T0.5",
        "nm-blowup-T2.5",
        "dm-backward-T2.5",
        "nm-T0-2",
        "nm-T0-5",
        "nm-T0-8",
        "nm-revival-n2-T5.5",
        "nm-revival-n4-T9.5",
        "focusing-cQ-1.03",
        "focusing-cQ-1.01",
        "dm-cQ-1.03",
        "dm-cQ-1.01",
        "nm-cQ-1.03",
        "nm-cQ-1.01",
        "2d-fast-focusing",
        "2d-fast-dm",
        "2d-fast-nm",
    ];
    assert_eq!(catalog::ids().collect::<Vec<_>>(), expected);
    for id in expected {
        let c = catalog::lookup(id).unwrap();
        let p = c.prepare().unwrap();
        let q = &c.quoted;
        assert!(!q.is_empty(), "{id}: nothing quoted");
        if let Some(&dt) = q.get("dt") {
            assert_eq!(c.dt_target, dt, "{id}");
        }
        if let Some(&dx) = q.get("dx_max") {
            assert!(p.grid.spacing() <= dx * (1.0 + 1e-3), "{id}: dx {}", p.grid.spacing());
        }
        match (&c.profile, &c.map) {
            (ProfileConfig::PseudoConformal { blowup_time, .. }, _) => assert_eq!(q["blowup_time"], *blowup_time),
            (ProfileConfig::BackwardConstruction { layer, target_time, .. }, _) => {
                assert_eq!(q["layer"], *layer as f64);
                assert_eq!(q["target_time"], *target_time);
            }
            (ProfileConfig::ScaledGroundState { amplitude, .. }, _) => assert_eq!(q["amplitude"], *amplitude),
            (ProfileConfig::Sech2d { amplitude, width }, _) => {
                assert_eq!((q["amplitude"], q["width"]), (*amplitude, *width));
            }
            (ProfileConfig::Snapshot { .. }, _) => panic!("{id}: catalog entries are self-contained"),
        }
        if let GammaSchedule::Periodic(m) = c.map {
            if q.contains_key("t_period") {
                assert_eq!(
                    (m.gamma_minus, m.gamma_plus, m.t_star, m.t_period),
                    (q["gamma_minus"], q["gamma_plus"], q["t_star"], q["t_period"]),
                    "{id}"
                );
            }
        }
    }
    let fast = catalog::lookup("2d-fast-dm").unwrap();
    assert_eq!(fast.quoted["t_star"], fast.quoted["t_period"] / 2.0);
    assert_eq!(fast.quoted["t_period"], 0.001);
}

fn mnls(args: &[&str], cwd: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mnls")).args(args).current_dir(cwd).output().unwrap()
}

#[test]
fn cli_exit_codes_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let list = mnls(&["list"], d);
    assert!(list.status.success());
    assert_eq!(String::from_utf8_lossy(&list.stdout).lines().count(), catalog::ids().count());

    assert_eq!(mnls(&["run", "no-such-id"], d).status.code(), Some(1));
    assert_eq!(mnls(&["run", "nm-blowup-T2.5", "--dt=-1"], d).status.code(), Some(1));
    std::fs::write(d.join("bad.json"), "{ \"model\": 3 }").unwrap();
    assert_eq!(mnls(&["run", "bad.json"], d).status.code(), Some(1));

    // Expected blowup is a successful run.
    let out = mnls(
        &["run", "focusing-T0.5", "--grid", "512", "--dt", "2e-4", "--out", "foc", "--plots"],
        d,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("foc/meta.json")).unwrap()).unwrap();
    assert_eq!(meta["status"]["status"], "blowup");
    assert_eq!(meta["realized"]["points"], 512);
    assert_eq!(meta["config"]["dt_target"], 2e-4);
    assert!(!d.join("foc/final.mnls").exists());
    assert!(d.join("foc/linf.svg").exists());

    let plotted = mnls(&["plot", "foc/series.csv", "--col", "energy", "--out", "e.svg"], d);
    assert!(plotted.status.success());
    assert!(d.join("e.svg").exists());
    assert_eq!(mnls(&["plot", "foc/series.csv", "--col", "nope"], d).status.code(), Some(1));

    // Construction of a non-construction profile is a configuration error.
    assert_eq!(mnls(&["construct", "nm-global-T1.5"], d).status.code(), Some(1));
    let built = mnls(&["construct", "nm-blowup-T2.5", "--grid", "512", "--out", "con"], d);
    assert!(built.status.success());
    let u0 = snapshot::read(&d.join("con/initial.mnls")).unwrap();
    assert_eq!(u0.time(), 0.0);
    assert!(!d.join("con/series.csv").exists());
}

#[test]
fn config_files_round_trip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let mut c: RunConfig = catalog::lookup("nm-cQ-1.01").unwrap();
    c.id = Some("mine".into());
    c.grid.points = 256;
    c.t_end = 0.3;
    let path = dir.path().join("mine.json");
    std::fs::write(&path, serde_json::to_string_pretty(&c).unwrap()).unwrap();
    let out = mnls(&["run", "mine.json"], dir.path());
    assert!(out.status.success());
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("runs/mine/meta.json")).unwrap()).unwrap();
    let back: RunConfig = serde_json::from_value(meta["config"].clone()).unwrap();
    assert_eq!(back, c);
}
