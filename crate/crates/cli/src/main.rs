use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use thermo2d::analysis::{analyze, AnalysisBundle};
use thermo2d::fixtures::{figure_fixtures, Fixture};
use thermo2d::fresnel::{plot_rows, write_plot_csv, write_svg};
use thermo2d::media::Moduli;
use thermo2d::simulate::{evolve, SimConfig, SimError};

mod report;

/// Dispersive decay classification of 2D anisotropic thermo-elastic media
#[derive(Parser)]
#[command(name = "thermo2d", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Report angles in degrees instead of radians
    #[arg(long, global = true)]
    degrees: bool,
    /// Print JSON instead of the human-readable summary
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the admissibility assumptions (A1)-(A4)
    Check {
        medium: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the full pipeline and report the decay rate
    Analyze {
        /// Medium file; omit with --all-figures
        medium: Option<PathBuf>,
        /// Write the analysis bundle as JSON (a directory with --all-figures)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Analyze the nine built-in example media
        #[arg(long)]
        all_figures: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Write the Fresnel sheets and coupling curves as SVG and CSV
    Plot {
        /// Medium file; omit with --all-figures
        medium: Option<PathBuf>,
        /// Output stem: writes STEM.svg and STEM.csv (a directory with --all-figures)
        #[arg(long)]
        out: PathBuf,
        /// Number of angles sampled
        #[arg(long, default_value_t = 720)]
        grid: usize,
        /// Plot the nine built-in example media
        #[arg(long)]
        all_figures: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Integrate the system spectrally and fit the sup-norm decay exponent
    Simulate {
        medium: PathBuf,
        /// Simulation config (JSON); defaults are used when omitted
        config: Option<PathBuf>,
        /// Output stem: writes STEM.csv and STEM.json
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the grid size per axis
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Input(anyhow::Error),
    Assumption(String),
    Unstable(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = io::stdout().lock().write_all(text.as_bytes());
}

fn read_medium(path: &Path) -> anyhow::Result<Moduli> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Moduli::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_file(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("results serialize to JSON")
}

fn run_analysis(m: &Moduli) -> Result<AnalysisBundle, Failure> {
    analyze(m).map_err(|e| Failure::Input(anyhow::anyhow!("analysis failed: {e}")))
}

fn fixtures_or_medium(medium: Option<&Path>, all: bool) -> Result<Vec<Fixture>, Failure> {
    match (medium, all) {
        (_, true) => Ok(figure_fixtures()),
        (Some(path), false) => Ok(vec![Fixture { name: "medium", medium: read_medium(path)? }]),
        (None, false) => Err(anyhow::anyhow!("a medium file or --all-figures is required").into()),
    }
}

fn check(medium: &Path, common: &Common) -> Result<(), Failure> {
    let m = read_medium(medium)?;
    let bundle = run_analysis(&m)?;
    if common.json {
        emit(&format!("{}\n", to_json(&bundle.assumptions)));
    } else {
        emit(&report::assumptions(&bundle.assumptions, common.degrees));
    }
    match bundle.assumptions.first_failure() {
        Some(a) => Err(Failure::Assumption(format!("assumption {a} is violated"))),
        None => Ok(()),
    }
}

fn analyze_cmd(
    medium: Option<&Path>,
    out: Option<&Path>,
    all: bool,
    common: &Common,
) -> Result<(), Failure> {
    let fixtures = fixtures_or_medium(medium, all)?;
    if all {
        if let Some(dir) = out {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
    }
    let mut bundles = vec![];
    for f in &fixtures {
        let bundle = run_analysis(&f.medium)?;
        if let Some(out) = out {
            let path = if all { out.join(format!("{}.json", f.name)) } else { out.to_path_buf() };
            write_file(&path, to_json(&bundle).as_bytes())?;
        }
        bundles.push((f.name, bundle));
    }
    if common.json {
        if all {
            let map: serde_json::Map<String, serde_json::Value> = bundles
                .iter()
                .map(|(n, b)| (n.to_string(), serde_json::to_value(b).expect("serializable")))
                .collect();
            emit(&format!("{}\n", to_json(&map)));
        } else {
            emit(&format!("{}\n", to_json(&bundles[0].1)));
        }
    } else if all {
        emit(&report::figure_table(&bundles));
    } else {
        emit(&report::bundle(&bundles[0].1, common.degrees));
    }
    if !all {
        if let Some(a) = bundles[0].1.assumptions.first_failure() {
            return Err(Failure::Assumption(format!("assumption {a} is violated")));
        }
    }
    Ok(())
}

fn plot_one(m: &Moduli, stem: &Path, grid: usize, degrees: bool) -> Result<(), Failure> {
    let rows = plot_rows(m, grid)
        .map_err(|e| Failure::Assumption(format!("cannot plot: {e}")))?;
    let mut csv = vec![];
    write_plot_csv(&rows, &mut csv, degrees).context("formatting CSV")?;
    write_file(&stem.with_extension("csv"), &csv)?;
    let curves: [Vec<[f64; 2]>; 4] = [
        rows.iter().map(|r| r.s1).collect(),
        rows.iter().map(|r| r.s2).collect(),
        rows.iter().map(|r| r.c1).collect(),
        rows.iter().map(|r| r.c2).collect(),
    ];
    let mut svg = vec![];
    write_svg(
        &mut svg,
        &[
            ("sheet1", &curves[0]),
            ("sheet2", &curves[1]),
            ("coupling1", &curves[2]),
            ("coupling2", &curves[3]),
        ],
    )
    .context("formatting SVG")?;
    write_file(&stem.with_extension("svg"), &svg)?;
    Ok(())
}

fn plot(
    medium: Option<&Path>,
    out: &Path,
    grid: usize,
    all: bool,
    common: &Common,
) -> Result<(), Failure> {
    if grid < 3 {
        return Err(anyhow::anyhow!("--grid must be at least 3").into());
    }
    let fixtures = fixtures_or_medium(medium, all)?;
    if all {
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    }
    for f in &fixtures {
        let stem = if all { out.join(f.name) } else { out.to_path_buf() };
        plot_one(&f.medium, &stem, grid, common.degrees)?;
        if !common.json {
            emit(&format!(
                "wrote {} and {}\n",
                stem.with_extension("svg").display(),
                stem.with_extension("csv").display()
            ));
        }
    }
    Ok(())
}

fn simulate(
    medium: &Path,
    config: Option<&Path>,
    out: Option<&Path>,
    grid: Option<usize>,
    common: &Common,
) -> Result<(), Failure> {
    let m = read_medium(medium)?;
    let mut cfg = match config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            SimConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => SimConfig::default(),
    };
    if let Some(n) = grid {
        cfg.n = n;
    }
    let bundle = run_analysis(&m)?;
    let Some(decay) = &bundle.decay else {
        let a = bundle.assumptions.first_failure().expect("decay is missing only on failure");
        return Err(Failure::Assumption(format!("assumption {a} is violated")));
    };
    let predicted = decay.sector_exponent(cfg.center, cfg.half_width);
    let result = evolve(&m, &cfg).map_err(|e| match e {
        SimError::UnstableStep { .. } => Failure::Unstable(e.to_string()),
        e => Failure::Input(anyhow::anyhow!(e)),
    })?;
    let mut summary = result.summary_json();
    summary["predicted"] = serde_json::Value::String(predicted.to_string());
    if let Some(stem) = out {
        let mut csv = vec![];
        result.write_csv(&mut csv).context("formatting CSV")?;
        write_file(&stem.with_extension("csv"), &csv)?;
        write_file(&stem.with_extension("json"), to_json(&summary).as_bytes())?;
    }
    if common.json {
        emit(&format!("{}\n", to_json(&summary)));
    } else {
        emit(&report::simulation(&result, predicted));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Check { medium, common } => check(medium, common),
        Command::Analyze { medium, out, all_figures, common } => {
            analyze_cmd(medium.as_deref(), out.as_deref(), *all_figures, common)
        }
        Command::Plot { medium, out, grid, all_figures, common } => {
            plot(medium.as_deref(), out, *grid, *all_figures, common)
        }
        Command::Simulate { medium, config, out, grid, common } => {
            simulate(medium, config.as_deref(), out.as_deref(), *grid, common)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = run(cli);
    let _ = io::stdout().flush();
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Assumption(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(Failure::Unstable(msg)) => {
            eprintln!("simulation unstable: {msg}");
            ExitCode::from(3)
        }
    }
}
