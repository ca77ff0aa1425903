//! Sweep tables, fringe tables, Poincaré patches and simulation reports, plus
//! their CSV and JSON renderings.
//!
//! CSV is UTF-8 with a header row, `\n` line endings and numbers written with
//! 12 significant digits. JSON documents are a single object holding `meta`
//! (crate version, command and a config echo) and `rows`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::classical::{optimize_classical, ClassicalOptimum};
use crate::error::{check_transmission, domain, Error, Result};
use crate::exec::Exec;
use crate::fisher::cramer_rao;
use crate::sim::run_simulation;
use crate::simplex::AscentOptions;
use crate::strategies::{
    best_multipass, classical_from_optimum, noon_precision, optimize_probe, Strategy, StrategyResult,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Transmissions plotted by default: 100%, 90%, 80% and 60%.
pub const DEFAULT_ETAS: [f64; 4] = [1.0, 0.9, 0.8, 0.6];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => domain(format!("unknown format '{other}'")),
        }
    }
}

/// Formats `x` with 12 significant digits, `%g`-style: positional notation for
/// decimal exponents in `[-5, 12)`, scientific otherwise, trailing zeros trimmed.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    if !(-5..12).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        return if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        };
    }
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        return format!("{sign}0.{zeros}{digits}");
    }
    let int_len = exp as usize + 1;
    if digits.len() <= int_len {
        format!("{sign}{digits}{}", "0".repeat(int_len - digits.len()))
    } else {
        let (int, frac) = digits.split_at(int_len);
        format!("{sign}{int}.{frac}")
    }
}

/// Roughly logarithmically spaced distinct integers from `min` to `max` inclusive.
pub fn log_spaced(min: usize, max: usize, count: usize) -> Result<Vec<usize>> {
    if min == 0 || max < min || count == 0 {
        return domain(format!("invalid log spacing: min={min}, max={max}, count={count}"));
    }
    if count == 1 || min == max {
        return Ok(vec![min]);
    }
    let (lo, hi) = ((min as f64).ln(), (max as f64).ln());
    let mut values: Vec<usize> = (0..count)
        .map(|i| (lo + (hi - lo) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .collect();
    values.dedup();
    Ok(values)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub etas: Vec<f64>,
    pub n_values: Vec<usize>,
    pub strategies: Vec<Strategy>,
    pub format: Format,
    pub output_path: Option<String>,
    /// Report classical rows against detected mean counts instead of input photons.
    pub detected_counts_axis: bool,
    /// Count only whole photons in the multipass budget.
    pub integer_photons: bool,
    pub seed: u64,
    pub starts: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            etas: DEFAULT_ETAS.to_vec(),
            n_values: log_spaced(1, 100, 15).expect("static range"),
            strategies: Strategy::ALL.to_vec(),
            format: Format::Csv,
            output_path: None,
            detected_counts_axis: false,
            integer_photons: false,
            seed: AscentOptions::default().seed,
            starts: AscentOptions::default().starts,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.etas.is_empty() || self.n_values.is_empty() || self.strategies.is_empty() {
            return domain("sweep needs at least one transmission, one N and one strategy");
        }
        for &eta in &self.etas {
            check_transmission(eta)?;
        }
        if self.n_values.contains(&0) {
            return domain("N values must be positive");
        }
        Ok(())
    }
}

/// One line of a precision sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub strategy: Strategy,
    pub eta: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub fisher: f64,
    pub delta_phi: f64,
    #[serde(skip_serializing_if = "is_true", default = "yes")]
    pub converged: bool,
}

fn is_true(b: &bool) -> bool {
    *b
}

fn yes() -> bool {
    true
}

impl SweepRow {
    fn from_result(r: &StrategyResult, axis: f64) -> Self {
        Self {
            strategy: r.strategy,
            eta: r.transmission,
            n: axis,
            fisher: r.fisher,
            delta_phi: r.delta_phi,
            converged: r.converged,
        }
    }
}

/// Evaluates every `(strategy, eta, N)` combination, sorted by strategy tag,
/// then transmission, then N.
pub fn run_sweep(config: &SweepConfig, exec: Exec) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let mut etas = config.etas.clone();
    etas.sort_by(f64::total_cmp);
    etas.dedup();
    let mut ns = config.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut strategies = config.strategies.clone();
    strategies.sort_by_key(|s| s.tag());
    strategies.dedup();

    let classical: BTreeMap<u64, ClassicalOptimum> = if strategies.contains(&Strategy::Classical) {
        let optima = exec.map(&etas, |&eta| optimize_classical(eta, 1.0));
        etas.iter()
            .zip(optima)
            .map(|(eta, o)| Ok((eta.to_bits(), o?)))
            .collect::<Result<_>>()?
    } else {
        BTreeMap::new()
    };

    let mut jobs: Vec<(Strategy, f64, usize)> = Vec::new();
    for &s in &strategies {
        for &eta in &etas {
            jobs.extend(ns.iter().map(|&n| (s, eta, n)));
        }
    }
    let probe_options = AscentOptions {
        starts: config.starts,
        seed: config.seed,
        exec: Exec::Sequential,
        ..AscentOptions::default()
    };

    exec.map(&jobs, |&(strategy, eta, n)| -> Result<SweepRow> {
        Ok(match strategy {
            Strategy::Classical => {
                let opt = &classical[&eta.to_bits()];
                let r = classical_from_optimum(n, eta, opt);
                let axis = if config.detected_counts_axis {
                    opt.fringe(eta, n as f64).total_mean_counts
                } else {
                    n as f64
                };
                SweepRow::from_result(&r, axis)
            }
            Strategy::Noon => SweepRow::from_result(&noon_precision(n, eta)?, n as f64),
            Strategy::Optimal => SweepRow::from_result(&optimize_probe(n, eta, &probe_options)?, n as f64),
            Strategy::Multipass => SweepRow::from_result(&best_multipass(n, eta, config.integer_photons)?, n as f64),
        })
    })
    .into_iter()
    .collect()
}

pub const SWEEP_HEADER: &str = "strategy,eta,N,fisher,delta_phi";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.strategy,
            format_sig(r.eta),
            format_sig(r.n),
            format_sig(r.fisher),
            format_sig(r.delta_phi)
        ));
    }
    out
}

/// Parses CSV written by [`sweep_csv`]. Convergence flags are not part of the
/// CSV and come back as `true`.
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(SWEEP_HEADER) {
        return domain("missing or unexpected sweep header");
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return domain(format!("expected 5 fields in '{line}'"));
            }
            let num = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|e| Error::Domain(format!("bad number '{s}': {e}")))
            };
            Ok(SweepRow {
                strategy: fields[0].parse()?,
                eta: num(fields[1])?,
                n: num(fields[2])?,
                fisher: num(fields[3])?,
                delta_phi: num(fields[4])?,
                converged: true,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct Document<'a, C: Serialize, R: Serialize> {
    meta: Meta<'a, C>,
    rows: &'a [R],
}

#[derive(Serialize)]
struct Meta<'a, C: Serialize> {
    version: &'a str,
    command: &'a str,
    config: &'a C,
}

/// `{"meta": {...}, "rows": [...]}` with a trailing newline.
pub fn json_document<C: Serialize, R: Serialize>(command: &str, config: &C, rows: &[R]) -> String {
    let doc = Document {
        meta: Meta {
            version: VERSION,
            command,
            config,
        },
        rows,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    s.push('\n');
    s
}

/// Gnuplot script drawing one log-log curve per `(strategy, eta)` pair from a sweep CSV.
pub fn gnuplot_script(csv_path: &str, rows: &[SweepRow]) -> String {
    let mut curves: Vec<(Strategy, f64)> = rows.iter().map(|r| (r.strategy, r.eta)).collect();
    curves.dedup();
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set logscale xy\n");
    s.push_str("set xlabel 'N'\n");
    s.push_str("set ylabel 'delta phi [rad]'\n");
    s.push_str("set key outside right\n");
    let style = |st: Strategy| match st {
        Strategy::Classical => "lines",
        Strategy::Noon => "linespoints",
        Strategy::Optimal => "points pt 7",
        Strategy::Multipass => "lines dt 2",
    };
    let plots: Vec<String> = curves
        .iter()
        .map(|(st, eta)| {
            format!(
                "'{csv_path}' skip 1 using 3:(strcol(1) eq '{st}' && abs($2-{eta}) < 1e-12 ? $5 : 1/0) with {} title '{st} eta={eta}'",
                style(*st),
                eta = format_sig(*eta),
            )
        })
        .collect();
    s.push_str("plot ");
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeRow {
    pub phi: f64,
    pub n1_mean: f64,
    pub n2_mean: f64,
}

/// Mean photocounts sampled uniformly over `[0, 2 pi]`.
pub fn fringe_table(total_counts: f64, visibility: f64, samples: usize) -> Result<Vec<FringeRow>> {
    let model = crate::classical::FringeModel::new(total_counts, visibility)?;
    if samples < 2 {
        return domain("fringe table needs at least 2 samples");
    }
    Ok((0..samples)
        .map(|i| {
            let phi = 2.0 * PI * i as f64 / (samples - 1) as f64;
            let (n1_mean, n2_mean) = model.means(phi);
            FringeRow { phi, n1_mean, n2_mean }
        })
        .collect())
}

pub fn fringe_csv(rows: &[FringeRow]) -> String {
    let mut out = String::from("phi,n1_mean,n2_mean\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            format_sig(r.phi),
            format_sig(r.n1_mean),
            format_sig(r.n2_mean)
        ));
    }
    out
}

/// Directions of the uncertainty ellipse axes, as unit vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orientation {
    /// Along the rotation generated by a phase shift (tangent to the equator).
    pub minor: [f64; 3],
    /// Along the vertical axis (population imbalance between the arms).
    pub major: [f64; 3],
}

/// Geometric picture of the interferometer state as a three-component vector
/// with an uncertainty patch at its tip.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincarePatch {
    pub total_photons: usize,
    pub squeezing_db: f64,
    pub center: [f64; 3],
    pub axis_minor: f64,
    pub axis_major: f64,
    pub orientation: Orientation,
    /// Variance reduction along the minor axis, `10^(-dB/10)`.
    pub variance_factor: f64,
}

/// Mean vector of length `N/2` in the equatorial plane at `angle`; a circular
/// patch of radius `sqrt(N)/2` at 0 dB, squeezed along the phase direction by
/// `10^(-dB/20)` and stretched vertically by the inverse factor.
pub fn poincare_patch(total_photons: usize, squeezing_db: f64, angle: f64) -> Result<PoincarePatch> {
    if total_photons == 0 {
        return domain("Poincaré patch needs at least one photon");
    }
    if !(squeezing_db.is_finite() && squeezing_db >= 0.0) {
        return domain(format!(
            "squeezing must be a non-negative number of dB, got {squeezing_db}"
        ));
    }
    let n = total_photons as f64;
    let radius = n.sqrt() / 2.0;
    let factor = 10f64.powf(squeezing_db / 20.0);
    let (sin, cos) = angle.sin_cos();
    Ok(PoincarePatch {
        total_photons,
        squeezing_db,
        center: [n / 2.0 * cos, n / 2.0 * sin, 0.0],
        axis_minor: radius / factor,
        axis_major: radius * factor,
        orientation: Orientation {
            minor: [-sin, cos, 0.0],
            major: [0.0, 0.0, 1.0],
        },
        variance_factor: 10f64.powf(-squeezing_db / 10.0),
    })
}

/// Outcome of a Monte Carlo check of the Cramér-Rao bound at the loss-optimized
/// classical operating point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub eta: f64,
    pub input_photons: f64,
    pub repetitions: usize,
    pub seed: u64,
    pub true_phase: f64,
    pub sensing_fraction: f64,
    pub visibility: f64,
    pub mean_counts: f64,
    /// Fisher information of one repetition.
    pub fisher: f64,
    pub mean_estimate: f64,
    pub bias: f64,
    /// Standard error of the mean estimate.
    pub bias_standard_error: f64,
    /// Spread of single-repetition estimates and its bound `1/sqrt(F)`.
    pub single_shot_std: f64,
    pub single_shot_crb: f64,
    /// Spread of the estimate combining all repetitions, `std / sqrt(M)`.
    pub empirical_std: f64,
    /// `1 / sqrt(M F)`.
    pub crb: f64,
    pub ratio: f64,
}

pub fn simulate_report(
    eta: f64,
    input_photons: f64,
    repetitions: usize,
    seed: u64,
    exec: Exec,
) -> Result<SimulationReport> {
    let opt = optimize_classical(eta, input_photons)?;
    let model = opt.fringe(eta, input_photons);
    let run = run_simulation(&model, FRAC_PI_2, repetitions, seed, exec)?;
    if repetitions < 2 {
        return domain("a spread estimate needs at least 2 repetitions");
    }
    let fisher = crate::classical::poisson_cfi(&model, FRAC_PI_2)?;
    let m = repetitions as f64;
    let single_shot_std = run.std_dev();
    let empirical_std = single_shot_std / m.sqrt();
    let crb = cramer_rao(fisher, repetitions as u64)?;
    let mean_estimate = run.mean();
    Ok(SimulationReport {
        eta,
        input_photons,
        repetitions,
        seed,
        true_phase: FRAC_PI_2,
        sensing_fraction: opt.tau_star,
        visibility: model.visibility,
        mean_counts: model.total_mean_counts,
        fisher,
        mean_estimate,
        bias: mean_estimate - FRAC_PI_2,
        bias_standard_error: empirical_std,
        single_shot_std,
        single_shot_crb: cramer_rao(fisher, 1)?,
        empirical_std,
        crb,
        ratio: empirical_std / crb,
    })
}
