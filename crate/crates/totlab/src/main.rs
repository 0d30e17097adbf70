//! `totlab` — command-line front end: exact recall curves as CSV, damage
//! ensembles as JSON (plus the reproduction table for the dead-4-of-9 case),
//! episode simulation, and the shipped scenario.
//!
//! Exit codes: 0 success, 1 configuration error (bad flags, unreadable or
//! invalid input files), 2 runtime error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use totlab::curvelab::{
    damage_ensemble_dead, damage_ensemble_links, recall_curve, reproduction_report,
    write_curve_csv, ClassifyThresholds, EnsembleReport, NoiseModel, RecallCurve,
};
use totlab::netcore::{BipolarVector, DamageSpec, SynapticMatrix, TieRule};
use totlab::retrieval::{run_episode, EpisodeSpec};
use totlab::scenario::run_chekhov;

#[derive(Parser)]
#[command(name = "totlab", version, about = "recall-curve and TOT episode simulation lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Replacement,
    Flip,
}

impl From<NoiseArg> for NoiseModel {
    fn from(a: NoiseArg) -> Self {
        match a {
            NoiseArg::Replacement => NoiseModel::Replacement,
            NoiseArg::Flip => NoiseModel::Flip,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    RetainInput,
    ForcePositive,
    ForceNegative,
}

impl From<TieArg> for TieRule {
    fn from(a: TieArg) -> Self {
        match a {
            TieArg::RetainInput => TieRule::RetainInput,
            TieArg::ForcePositive => TieRule::ForcePositive,
            TieArg::ForceNegative => TieRule::ForceNegative,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleModeArg {
    DeadNeurons,
    Links,
}

#[derive(Subcommand)]
enum Command {
    /// Exact recall-probability curve P(d) as CSV.
    Curve {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        /// Optional damage spec JSON applied on top of the matrix.
        #[arg(long)]
        damage: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = NoiseArg::Replacement)]
        noise: NoiseArg,
        #[arg(long, value_enum, default_value_t = TieArg::RetainInput)]
        tie: TieArg,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Damage-ensemble report (curve classes, TOT probability and strength).
    Ensemble {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, value_enum)]
        mode: EnsembleModeArg,
        /// Dead input neurons per configuration (dead-neurons mode).
        #[arg(long)]
        k: Option<usize>,
        /// Severed links per configuration (links mode).
        #[arg(long)]
        count: Option<usize>,
        /// Sampled configurations (links mode).
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = NoiseArg::Replacement)]
        noise: NoiseArg,
        #[arg(long, value_enum, default_value_t = TieArg::RetainInput)]
        tie: TieArg,
        /// Minimum origin drop for the TOT curve signature.
        #[arg(long, default_value_t = 0.10)]
        delta_steep: f64,
        /// Output JSON path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one retrieval episode from an episode config JSON.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output trace JSON path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a shipped scenario.
    Scenario {
        #[command(subcommand)]
        which: ScenarioCommand,
    },
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// The "Horse Name" episode: trace JSON plus the narrative stage table.
    Chekhov {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output trace JSON path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<totlab::Error> for CliError {
    fn from(e: totlab::Error) -> Self {
        match e {
            totlab::Error::SignatureMismatch(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Config(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Config(format!("cannot parse {what} {}: {e}", path.display())))
}

fn write_output(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Runtime(format!("cannot write stdout: {e}"))),
    }
}

fn to_pretty_json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    bytes
}

fn cmd_curve(
    matrix: &Path,
    reference: &Path,
    damage: Option<&Path>,
    noise: NoiseModel,
    tie: TieRule,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    let mut w: SynapticMatrix = read_json(matrix, "matrix")?;
    let x: BipolarVector = read_json(reference, "reference")?;
    if let Some(path) = damage {
        let spec: DamageSpec = read_json(path, "damage spec")?;
        w = w.apply_damage(&spec)?;
    }
    let curve = recall_curve(&w, &x, noise, tie)?;
    let mut csv = Vec::new();
    write_curve_csv(&curve, &mut csv)
        .map_err(|e| CliError::Runtime(format!("cannot format csv: {e}")))?;
    write_output(out, &csv)?;
    let n = curve.n();
    eprintln!(
        "P(0) = {} ({:.6}), P(1) = {} ({:.6})",
        curve.probability(0),
        curve.probability(0).to_f64(),
        curve.probability(n),
        curve.probability(n).to_f64()
    );
    Ok(())
}

/// Free-recall probability used in the reproduction table: P(1) of the most
/// probable class representative.
fn dominant_free_recall(report: &EnsembleReport) -> Option<(usize, RecallCurve)> {
    report
        .classes
        .first()
        .map(|c| (c.representative.n(), c.representative.clone()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_ensemble(
    matrix: &Path,
    reference: &Path,
    mode: EnsembleModeArg,
    k: Option<usize>,
    count: Option<usize>,
    samples: u64,
    seed: u64,
    noise: NoiseModel,
    tie: TieRule,
    delta_steep: f64,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    let w: SynapticMatrix = read_json(matrix, "matrix")?;
    let x: BipolarVector = read_json(reference, "reference")?;
    let thresholds = ClassifyThresholds { delta_steep };
    let report = match mode {
        EnsembleModeArg::DeadNeurons => {
            let k = k.ok_or_else(|| CliError::Config("--k is required in dead-neurons mode".into()))?;
            damage_ensemble_dead(&w, &x, k, noise, tie, &thresholds)?
        }
        EnsembleModeArg::Links => {
            let count = count
                .ok_or_else(|| CliError::Config("--count is required in links mode".into()))?;
            damage_ensemble_links(&w, &x, count, samples, seed, noise, tie, &thresholds)?
        }
    };
    write_output(out, &to_pretty_json(&report))?;
    if matches!(mode, EnsembleModeArg::DeadNeurons) && w.n() == 9 && k == Some(4) {
        if let Some((n, dominant)) = dominant_free_recall(&report) {
            let repro = reproduction_report(&report, dominant.probability(n));
            let text = repro.to_string();
            match out {
                Some(path) => {
                    let repro_path = path.with_extension("repro.txt");
                    fs::write(&repro_path, &text).map_err(|e| {
                        CliError::Runtime(format!("cannot write {}: {e}", repro_path.display()))
                    })?;
                    eprintln!("reproduction table written to {}", repro_path.display());
                }
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn cmd_simulate(config: &Path, seed: u64, out: &Option<PathBuf>) -> Result<(), CliError> {
    let spec: EpisodeSpec = read_json(config, "episode config")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // GaveUp is a valid outcome recorded in the trace, not an error.
    let trace = run_episode(&spec, &mut rng)?;
    write_output(out, &to_pretty_json(&trace))
}

fn cmd_scenario_chekhov(seed: u64, out: &Option<PathBuf>) -> Result<(), CliError> {
    let (trace, map) = run_chekhov(seed)?;
    write_output(out, &to_pretty_json(&trace))?;
    let table = map.to_string();
    match out {
        Some(_) => print!("{table}"),
        None => eprint!("{table}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Curve {
            matrix,
            reference,
            damage,
            noise,
            tie,
            out,
        } => cmd_curve(
            &matrix,
            &reference,
            damage.as_deref(),
            noise.into(),
            tie.into(),
            &out,
        ),
        Command::Ensemble {
            matrix,
            reference,
            mode,
            k,
            count,
            samples,
            seed,
            noise,
            tie,
            delta_steep,
            out,
        } => cmd_ensemble(
            &matrix,
            &reference,
            mode,
            k,
            count,
            samples,
            seed,
            noise.into(),
            tie.into(),
            delta_steep,
            &out,
        ),
        Command::Simulate { config, seed, out } => cmd_simulate(&config, seed, &out),
        Command::Scenario {
            which: ScenarioCommand::Chekhov { seed, out },
        } => cmd_scenario_chekhov(seed, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
