//! `qsim`, measurement simulation from the command line.
//!
//! Subcommands:
//! - `measure`: sample repeated measurements of a serialized observable and
//!   tally outcome frequencies against the Born rule.
//! - `discriminate`: run the identity-vs-gapped discrimination experiment
//!   and report the empirical error next to the 2^-(m+1) reference.
//! - `noise-sweep`: tabulate the noisy plus-rate over a concentration grid,
//!   quadrature next to Monte Carlo.
//! - `verify`: re-derive every analytic claim; exits nonzero on any failure.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use qsim_core::{
    measurement_tally, verify::verify_with_fault_injection, DiscriminationConfig,
    DiscriminationExperiment, NoiseModel, Observable, PureState, TrialRecord,
};

#[derive(Parser)]
#[command(name = "qsim", version, about = "Projective measurement simulator", max_term_width = 100)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Master RNG seed; QSIM_SEED applies when the flag is absent.
    #[arg(long, global = true, env = "QSIM_SEED", default_value_t = 42)]
    seed: u64,

    /// Number of Monte Carlo trials.
    #[arg(long, global = true, default_value_t = 100_000)]
    trials: u64,

    /// Report format; defaults to json (noise-sweep defaults to csv).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the report to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Repeatedly measure a state with an observable and tally outcomes.
    Measure {
        /// Observable document: {"dim": n, "matrix_re": [...], "matrix_im": [...]}.
        #[arg(long)]
        observable: PathBuf,
        /// State document (same schema, dim-length payload). Defaults to the
        /// uniform superposition.
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Distinguish the identity observable from diag(1, 1 + delta).
    Discriminate {
        /// Copies of the prepared state per trial.
        #[arg(long)]
        m: usize,
        /// Spectral gap of the deformed observable.
        #[arg(long)]
        delta: f64,
        /// Prior probability of the gapped hypothesis.
        #[arg(long = "prior-j", default_value_t = 0.5)]
        prior_j: f64,
        /// Stop each trial at its first minus outcome.
        #[arg(long)]
        early_stop: bool,
        /// Also write one CSV row per trial to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Tabulate the noisy plus-rate over a concentration grid.
    NoiseSweep {
        #[arg(long, value_enum)]
        model: ModelKind,
        /// Center of the von Mises angle distribution (radians).
        #[arg(long = "alpha-mean", default_value_t = FRAC_PI_4)]
        alpha_mean: f64,
        /// Concentration grid start:stop:step; ignored for --model uniform.
        #[arg(long = "q-grid", default_value = "0:20:0.5")]
        q_grid: String,
    },
    /// Re-run the verification suite and emit a pass/fail report.
    Verify {
        /// Append a deliberately failing check (exercises the exit path).
        #[arg(long, hide = true)]
        fault_injection: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Uniform,
    Vonmises,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = &cli.global;
    if g.trials == 0 {
        bail!("--trials must be at least 1");
    }
    match cli.command {
        Command::Measure { observable, state } => {
            let observable = read_observable(&observable)?;
            let state = match state {
                Some(path) => read_state(&path)?,
                None => PureState::uniform_superposition(observable.dim()),
            };
            if state.dim() != observable.dim() {
                bail!(
                    "state dimension {} does not match observable dimension {}",
                    state.dim(),
                    observable.dim()
                );
            }
            let tally = measurement_tally(&state, &observable, g.trials, g.seed)?;
            let payload = match g.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&tally)?,
                Format::Csv => {
                    let mut csv =
                        String::from("k,eigenvalue,born,count,frequency,ci_low,ci_high,sigma_deviation\n");
                    for k in 0..tally.eigenvalues.len() {
                        writeln!(
                            csv,
                            "{},{},{},{},{},{},{},{}",
                            k,
                            tally.eigenvalues[k],
                            tally.born[k],
                            tally.counts[k],
                            tally.frequencies[k],
                            tally.ci_low[k],
                            tally.ci_high[k],
                            tally.sigma_deviations[k]
                        )?;
                    }
                    csv
                }
            };
            emit(&g.out, &payload)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Discriminate {
            m,
            delta,
            prior_j,
            early_stop,
            csv,
        } => {
            let config = DiscriminationConfig {
                delta,
                copies: m,
                prior_gapped: prior_j,
                seed: g.seed,
                early_stop,
            };
            let experiment = DiscriminationExperiment::new(config)?;
            let report = match csv {
                Some(path) => {
                    let records = experiment.run_trials(g.trials, true);
                    fs::write(&path, trials_csv(&records))
                        .with_context(|| format!("writing {}", path.display()))?;
                    experiment.report_from_records(&records)
                }
                None => experiment.monte_carlo_error_rate(g.trials),
            };
            let payload = match g.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&report)?,
                Format::Csv => format!(
                    "empirical_error,ci_low,ci_high,analytic_error,trials,m,errors,delta,prior_j,seed,early_stop\n{},{},{},{},{},{},{},{},{},{},{}\n",
                    report.empirical_error,
                    report.ci_low,
                    report.ci_high,
                    report.analytic_error,
                    report.trials,
                    report.m,
                    report.errors,
                    report.delta,
                    report.prior_j,
                    report.seed,
                    report.early_stop
                ),
            };
            emit(&g.out, &payload)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::NoiseSweep {
            model,
            alpha_mean,
            q_grid,
        } => {
            let rows = match model {
                ModelKind::Uniform => vec![qsim_core::noise::sweep_row(
                    0.0,
                    &NoiseModel::uniform(),
                    g.trials,
                    qsim_core::sub_seed(g.seed, 1000),
                )],
                ModelKind::Vonmises => {
                    let grid = parse_grid(&q_grid)?;
                    grid.iter()
                        .enumerate()
                        .map(|(i, &q)| {
                            let model = NoiseModel::von_mises(q, alpha_mean)?;
                            Ok(qsim_core::noise::sweep_row(
                                q,
                                &model,
                                g.trials,
                                qsim_core::sub_seed(g.seed, 1000 + i as u64),
                            ))
                        })
                        .collect::<Result<Vec<_>>>()?
                }
            };
            let payload = match g.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut csv = String::from("q,p_plus_quadrature,p_plus_montecarlo,mc_stderr\n");
                    for row in &rows {
                        writeln!(
                            csv,
                            "{},{},{},{}",
                            row.q, row.p_plus_quadrature, row.p_plus_montecarlo, row.mc_stderr
                        )?;
                    }
                    csv
                }
                Format::Json => to_json(&rows)?,
            };
            emit(&g.out, &payload)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify { fault_injection } => {
            let report = verify_with_fault_injection(g.seed, fault_injection);
            eprint!("{}", report.render_table());
            let payload = match g.format.unwrap_or(Format::Json) {
                Format::Json => report.to_json(),
                Format::Csv => {
                    let mut csv =
                        String::from("name,empirical,analytic,ci_low,ci_high,trials,sigma_deviation,tolerance,passed\n");
                    for m in &report.metrics {
                        writeln!(
                            csv,
                            "{},{},{},{},{},{},{},{},{}",
                            m.name,
                            m.empirical,
                            opt(m.analytic),
                            opt(m.ci_low),
                            opt(m.ci_high),
                            m.trials.map(|t| t.to_string()).unwrap_or_default(),
                            opt(m.sigma_deviation),
                            opt(m.tolerance),
                            m.passed
                        )?;
                    }
                    csv
                }
            };
            emit(&g.out, &payload)?;
            Ok(if report.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn read_observable(path: &PathBuf) -> Result<Observable> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing observable {}", path.display()))
}

fn read_state(path: &PathBuf) -> Result<PureState> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing state {}", path.display()))
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn emit(out: &Option<PathBuf>, payload: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, payload).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{payload}"),
    }
    Ok(())
}

fn opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// One CSV row per trial: trial,truth,outcomes,decision,correct. Outcomes
/// are packed as a +/- string in copy order.
fn trials_csv(records: &[TrialRecord]) -> String {
    let mut csv = String::from("trial,truth,outcomes,decision,correct\n");
    for (index, record) in records.iter().enumerate() {
        let outcomes: String = record
            .outcomes
            .iter()
            .map(|o| match o {
                qsim_core::InterferenceOutcome::Plus => '+',
                qsim_core::InterferenceOutcome::Minus => '-',
            })
            .collect();
        writeln!(
            csv,
            "{},{},{},{},{}",
            index, record.truth, outcomes, record.decision, record.correct
        )
        .expect("string write");
    }
    csv
}

/// Parses "start:stop:step" into an inclusive grid.
fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("q-grid must look like start:stop:step, got {text:?}");
    }
    let start: f64 = parts[0].parse().context("q-grid start")?;
    let stop: f64 = parts[1].parse().context("q-grid stop")?;
    let step: f64 = parts[2].parse().context("q-grid step")?;
    if !step.is_finite() || step <= 0.0 || stop < start {
        bail!("q-grid needs step > 0 and stop >= start");
    }
    let mut grid = Vec::new();
    let mut i = 0u64;
    loop {
        let q = start + i as f64 * step;
        if q > stop + step * 1e-9 {
            break;
        }
        grid.push(q);
        i += 1;
    }
    Ok(grid)
}
