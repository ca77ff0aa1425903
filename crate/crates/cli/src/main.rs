//! `lossy-mz`: precision sweeps, fringe tables, state optimization, Monte Carlo
//! checks and Poincaré patches for a lossy Mach-Zehnder interferometer.
//!
//! Exit codes: 0 success, 1 usage or domain error, 2 I/O error, 3 an optimizer
//! stopped without converging (its best value is still written).

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lossy_mz::report::{
    fringe_csv, fringe_table, gnuplot_script, json_document, log_spaced, poincare_patch, run_sweep, simulate_report,
    sweep_csv, Format, SweepConfig, SweepRow,
};
use lossy_mz::simplex::AscentOptions;
use lossy_mz::strategies::{best_multipass, noon_precision, optimize_probe, Strategy, StrategyResult};
use lossy_mz::Exec;

use crate::config::FileConfig;

#[derive(Debug, Parser)]
#[command(
    name = "lossy-mz",
    version,
    about = "Phase-estimation precision of a lossy Mach-Zehnder interferometer"
)]
struct Cli {
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Seed for optimizer starts and Monte Carlo draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON file with default values for any flag; flags win on conflict.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Evaluate on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Precision versus resource for each strategy and transmission.
    Sweep(SweepArgs),
    /// Mean photocounts of both detectors over one fringe period.
    Fringe(FringeArgs),
    /// Monte Carlo maximum-likelihood estimation against the Cramér-Rao bound.
    Simulate(SimulateArgs),
    /// Optimal N-photon probe weights under loss.
    OptimizeState(PointArgs),
    /// N00N-state precision under loss.
    Noon(PointArgs),
    /// Best single-photon multipass strategy for a budget of N.
    Multipass(MultipassArgs),
    /// Uncertainty patch of the interferometer state vector.
    Poincare(PoincareArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Comma-separated transmissions (default 1,0.9,0.8,0.6).
    #[arg(long, value_delimiter = ',')]
    etas: Option<Vec<f64>>,
    /// Comma-separated resource values N.
    #[arg(long = "n-values", value_delimiter = ',')]
    n_values: Option<Vec<usize>>,
    /// Log-spaced N grid: smallest value.
    #[arg(long = "n-min", requires = "n_max")]
    n_min: Option<usize>,
    /// Log-spaced N grid: largest value.
    #[arg(long = "n-max", requires = "n_min")]
    n_max: Option<usize>,
    /// Log-spaced N grid: number of points before de-duplication.
    #[arg(long = "n-count", default_value_t = 15)]
    n_count: usize,
    /// Comma-separated subset of classical,noon,optimal,multipass.
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<String>>,
    /// Plot classical rows against detected mean counts instead of input photons.
    #[arg(long = "detected-counts")]
    detected_counts: bool,
    /// Count only whole photons in multipass budgets.
    #[arg(long = "integer-photons")]
    integer_photons: bool,
    /// Random starts for the probe optimizer.
    #[arg(long)]
    starts: Option<usize>,
    /// Also write a gnuplot script plotting the CSV output.
    #[arg(long = "plot-script")]
    plot_script: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FringeArgs {
    /// Total mean photocounts N.
    #[arg(long)]
    n: Option<f64>,
    #[arg(long)]
    visibility: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Transmission of the sensing arm.
    #[arg(long)]
    eta: Option<f64>,
    /// Mean input photons per repetition.
    #[arg(long = "input-photons")]
    input_photons: Option<f64>,
    /// Independent repetitions [default: 10000].
    #[arg(long)]
    repetitions: Option<usize>,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    /// Random starts (optimize-state only).
    #[arg(long)]
    starts: Option<usize>,
}

#[derive(Debug, Args)]
struct MultipassArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long = "integer-photons")]
    integer_photons: bool,
}

#[derive(Debug, Args)]
struct PoincareArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "squeezing-db")]
    squeezing_db: Option<f64>,
    /// Azimuth of the mean vector in radians.
    #[arg(long)]
    angle: Option<f64>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
}

impl From<lossy_mz::Error> for Failure {
    fn from(e: lossy_mz::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Output {
    text: String,
    converged: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("lossy-mz: warning: optimizer did not converge for at least one point");
            ExitCode::from(3)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("lossy-mz: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("lossy-mz: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let format = match cli.format.as_deref() {
        Some(f) => f.parse::<Format>()?,
        None => file.format.unwrap_or_default(),
    };
    let seed = cli.seed.or(file.seed);
    let out = cli.out.clone().or_else(|| file.output_path.clone().map(PathBuf::from));
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };

    let output = match cli.command {
        Command::Sweep(args) => sweep(args, &file, format, seed, out.as_deref(), exec)?,
        Command::Fringe(args) => fringe(args, &file, format)?,
        Command::Simulate(args) => simulate(args, &file, seed, exec)?,
        Command::OptimizeState(args) => {
            let n = require(args.n.or(file.n), "--n")?;
            let eta = require(args.eta.or(file.eta), "--eta")?;
            let defaults = AscentOptions::default();
            let options = AscentOptions {
                starts: args.starts.or(file.starts).unwrap_or(defaults.starts),
                seed: seed.unwrap_or(defaults.seed),
                exec,
                ..defaults
            };
            let r = optimize_probe(n, eta, &options)?;
            point_output(
                "optimize-state",
                &serde_json::json!({"n": n, "eta": eta, "starts": options.starts, "seed": options.seed}),
                r,
                format,
            )
        }
        Command::Noon(args) => {
            let n = require(args.n.or(file.n), "--n")?;
            let eta = require(args.eta.or(file.eta), "--eta")?;
            point_output(
                "noon",
                &serde_json::json!({"n": n, "eta": eta}),
                noon_precision(n, eta)?,
                format,
            )
        }
        Command::Multipass(args) => {
            let n = require(args.n.or(file.n), "--n")?;
            let eta = require(args.eta.or(file.eta), "--eta")?;
            let integer = args.integer_photons || file.integer_photons.unwrap_or(false);
            let r = best_multipass(n, eta, integer)?;
            point_output(
                "multipass",
                &serde_json::json!({"n": n, "eta": eta, "integer_photons": integer}),
                r,
                format,
            )
        }
        Command::Poincare(args) => {
            let n = require(args.n.or(file.n), "--n")?;
            let db = args.squeezing_db.or(file.squeezing_db).unwrap_or(0.0);
            let angle = args.angle.or(file.angle).unwrap_or(0.0);
            let patch = poincare_patch(n, db, angle)?;
            let text = json_document(
                "poincare",
                &serde_json::json!({"n": n, "squeezing_db": db, "angle": angle}),
                &[patch],
            );
            Output { text, converged: true }
        }
    };
    emit(out.as_deref(), &output.text)?;
    Ok(output.converged)
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("missing required value {flag}")))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(format!("cannot write to standard output: {e}")))
        }
    }
}

fn sweep(
    args: SweepArgs,
    file: &FileConfig,
    format: Format,
    seed: Option<u64>,
    out: Option<&Path>,
    exec: Exec,
) -> Result<Output, Failure> {
    let defaults = SweepConfig::default();
    let n_values = match (args.n_values, args.n_min, args.n_max) {
        (Some(v), _, _) => v,
        (None, Some(lo), Some(hi)) => log_spaced(lo, hi, args.n_count)?,
        _ => file.n_values.clone().unwrap_or(defaults.n_values),
    };
    let strategies = match args.strategies {
        Some(tags) => tags
            .iter()
            .map(|t| t.parse::<Strategy>())
            .collect::<Result<Vec<_>, _>>()?,
        None => file.strategies.clone().unwrap_or(defaults.strategies),
    };
    let config = SweepConfig {
        etas: args.etas.or_else(|| file.etas.clone()).unwrap_or(defaults.etas),
        n_values,
        strategies,
        format,
        output_path: out.map(|p| p.display().to_string()),
        detected_counts_axis: args.detected_counts || file.detected_counts_axis.unwrap_or(false),
        integer_photons: args.integer_photons || file.integer_photons.unwrap_or(false),
        seed: seed.unwrap_or(defaults.seed),
        starts: args.starts.or(file.starts).unwrap_or(defaults.starts),
    };
    let csv_name = match (&args.plot_script, out, format) {
        (None, _, _) => None,
        (Some(_), Some(p), Format::Csv) => Some(p.display().to_string()),
        _ => return Err(Failure::Usage("--plot-script needs --out and CSV output".into())),
    };
    let rows = run_sweep(&config, exec)?;
    let converged = rows.iter().all(|r| r.converged);

    if let (Some(script), Some(csv_name)) = (&args.plot_script, csv_name) {
        fs::write(script, gnuplot_script(&csv_name, &rows))
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", script.display())))?;
    }

    let text = match format {
        Format::Csv => sweep_csv(&rows),
        Format::Json => json_document::<SweepConfig, SweepRow>("sweep", &config, &rows),
    };
    Ok(Output { text, converged })
}

fn fringe(args: FringeArgs, file: &FileConfig, format: Format) -> Result<Output, Failure> {
    let n = require(args.n.or(file.n.map(|n| n as f64)), "--n")?;
    let v = require(args.visibility.or(file.visibility), "--visibility")?;
    let samples = args.samples.or(file.samples).unwrap_or(101);
    let rows = fringe_table(n, v, samples)?;
    let text = match format {
        Format::Csv => fringe_csv(&rows),
        Format::Json => json_document(
            "fringe",
            &serde_json::json!({"n": n, "visibility": v, "samples": samples}),
            &rows,
        ),
    };
    Ok(Output { text, converged: true })
}

fn simulate(args: SimulateArgs, file: &FileConfig, seed: Option<u64>, exec: Exec) -> Result<Output, Failure> {
    let eta = require(args.eta.or(file.eta), "--eta")?;
    let photons = require(args.input_photons.or(file.input_photons), "--input-photons")?;
    let repetitions = args.repetitions.or(file.repetitions).unwrap_or(10_000);
    let seed = seed.unwrap_or(1);
    let report = simulate_report(eta, photons, repetitions, seed, exec)?;
    let text = json_document(
        "simulate",
        &serde_json::json!({"eta": eta, "input_photons": photons, "repetitions": repetitions, "seed": seed}),
        &[report],
    );
    Ok(Output { text, converged: true })
}

fn point_output<C: Serialize>(command: &str, config: &C, result: StrategyResult, format: Format) -> Output {
    let converged = result.converged;
    let text = match format {
        Format::Csv => sweep_csv(&[SweepRow {
            strategy: result.strategy,
            eta: result.transmission,
            n: result.resource_n as f64,
            fisher: result.fisher,
            delta_phi: result.delta_phi,
            converged,
        }]),
        Format::Json => json_document(command, config, &[result]),
    };
    Output { text, converged }
}
