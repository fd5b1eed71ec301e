use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mnls_bench::{catalog, plot, run, sweep, BenchError, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "mnls", version, about = "Managed NLS experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Catalog id or path to a JSON configuration.
    target: String,
    /// Output directory (default: runs/<id>).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    /// Grid points per axis.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    half_width: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Also write linf.svg and energy.svg.
    #[arg(long)]
    plots: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its output bundle.
    Run(RunArgs),
    /// Only build the initial data (backward construction).
    Construct(RunArgs),
    /// Manageability sweep described by a JSON file.
    Sweep {
        spec: PathBuf,
        /// Output CSV (default: sweep.csv next to the sweep file).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plot series columns against t.
    Plot {
        series: PathBuf,
        #[arg(long = "col", required = true)]
        columns: Vec<String>,
        /// Output SVG (default: series path with the column names).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List catalog experiments.
    List,
}

fn load(a: &RunArgs) -> mnls_bench::Result<(RunConfig, PathBuf)> {
    let mut c = RunConfig::resolve(&a.target)?.with_overrides(&Overrides {
        dt_target: a.dt,
        points: a.grid,
        half_width: a.half_width,
        t_end: a.t_end,
    });
    c.plots |= a.plots;
    let out = a.out.clone().unwrap_or_else(|| Path::new("runs").join(c.label()));
    Ok((c, out))
}

fn report(o: &run::Outcome, out: &Path) {
    match o.status() {
        run::Status::Completed => println!("completed; output in {}", out.display()),
        run::Status::Blowup { stage, t_detect, .. } => {
            println!("blowup detected at t = {t_detect} ({stage:?}); output in {}", out.display())
        }
    }
}

fn dispatch(cli: Cli) -> mnls_bench::Result<()> {
    match cli.command {
        Command::Run(a) => {
            let (c, out) = load(&a)?;
            let o = run::run_experiment(&c, &out)?;
            report(&o, &out);
        }
        Command::Construct(a) => {
            let (c, out) = load(&a)?;
            let p = c.prepare()?;
            if !matches!(c.profile, mnls_bench::ProfileConfig::BackwardConstruction { .. }) {
                return Err(BenchError::Config("construct needs a backward_construction profile".into()));
            }
            let o = run::construct(&p)?;
            run::write_bundle(&o, &out)?;
            report(&o, &out);
        }
        Command::Sweep { spec, out } => {
            let s = sweep::SweepSpec::from_path(&spec)?;
            let results = sweep::sweep_manageability(&s)?;
            let out = out.unwrap_or_else(|| spec.with_file_name("sweep.csv"));
            sweep::write_results(&out, &s, &results)?;
            let ok = results.iter().filter(|r| r.manageable(&s.criterion)).count();
            println!("{ok} of {} cells manageable; table in {}", results.len(), out.display());
        }
        Command::Plot { series, columns, out } => {
            let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
            let out = out.unwrap_or_else(|| series.with_file_name(format!("{}.svg", columns.join("_"))));
            plot::emit_plot(&series, &cols, &out)?;
            println!("{}", out.display());
        }
        Command::List => {
            for e in catalog::entries() {
                println!("{:<22} {}", e.id, e.description);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mnls: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
