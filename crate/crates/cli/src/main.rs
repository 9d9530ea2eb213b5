//! Command-line front end: seeded tester runs, verification suites, corpus
//! generation and experiment sweeps.
//!
//! Exit codes: 0 pass, 1 assertion failure, 2 usage or input error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use hgut::harness::corpus::{generate_corpus, load_distribution, write_corpus, CorpusSpec, Generator};
use hgut::harness::experiment::{
    results_csv, results_json, run_experiment, run_trials, scaling_report, trials_csv, ExperimentSpec,
};
use hgut::harness::verify::{run_verification, suite_passed, Suite, VerifyOptions};
use hgut::testers::{Mode, TesterConfig};

#[derive(Parser)]
#[command(
    name = "hgut",
    version,
    about = "Uniformity testing over hypergrids with subcube conditioning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Theory,
    Practical,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Theory => Mode::Theory,
            ModeArg::Practical => Mode::Practical,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Identities,
    Inequalities,
    Lemmas,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Identities => Suite::Identities,
            SuiteArg::Inequalities => Suite::Inequalities,
            SuiteArg::Lemmas => Suite::Lemmas,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the subcube tester on a distribution file.
    Test {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value = "practical")]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        out: Format,
        /// Fail (exit 1) unless at least this fraction of trials accepts.
        #[arg(long)]
        min_accept_rate: Option<f64>,
        /// Fail (exit 1) unless at most this fraction of trials accepts.
        #[arg(long)]
        max_accept_rate: Option<f64>,
    },
    /// Run verification suites and print a JSON report array.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        corpus_size: Option<usize>,
        #[arg(long, default_value_t = 64)]
        max_cells: usize,
        /// Corrupt every orientation in the lemma suite.
        #[arg(long)]
        fault: bool,
    },
    /// Generate annotated distribution files.
    Corpus {
        /// Corpus spec JSON file; replaces the individual flags below.
        #[arg(long, conflicts_with_all = ["generator", "shape", "count", "floor", "seed"])]
        config: Option<PathBuf>,
        /// Generator as JSON, e.g. '{"kind":"heavy_atom","mass":0.4}'.
        #[arg(long)]
        generator: Option<String>,
        /// Comma-separated side lengths.
        #[arg(long, value_delimiter = ',')]
        shape: Option<Vec<usize>>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        floor: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run an experiment spec; prints result rows and a scaling summary.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the spec's output path.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Allowed deviation of consecutive growth ratios from sqrt(n).
        #[arg(long, default_value_t = 2.5)]
        scaling_factor: f64,
        #[arg(long, value_enum, default_value = "json")]
        out: Format,
    },
}

enum Failure {
    Assertion(String),
    Usage(String),
}

impl From<hgut::Error> for Failure {
    fn from(e: hgut::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Usage(e.to_string()))
}

fn rate_check(accepts: usize, trials: usize, lo: Option<f64>, hi: Option<f64>) -> Result<(), Failure> {
    let rate = accepts as f64 / trials as f64;
    if lo.is_some_and(|lo| rate < lo) || hi.is_some_and(|hi| rate > hi) {
        return Err(Failure::Assertion(format!(
            "accept rate {rate} ({accepts}/{trials}) outside bounds"
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Test {
            dist,
            eps,
            mode,
            trials,
            seed,
            out,
            min_accept_rate,
            max_accept_rate,
        } => {
            if trials == 0 {
                return Err(Failure::Usage("--trials must be at least 1".into()));
            }
            let p = Arc::new(load_distribution(&dist)?);
            let cfg = TesterConfig::for_mode(mode.into());
            let rows = run_trials(p, eps, &cfg, trials, seed)?;
            match out {
                Format::Csv => emit(&trials_csv(&rows)),
                Format::Json => emit(&(json(&rows)? + "\n")),
            }
            let accepts = rows.iter().filter(|r| r.verdict.is_accept()).count();
            rate_check(accepts, trials, min_accept_rate, max_accept_rate)
        }
        Command::Verify {
            suite,
            seed,
            corpus_size,
            max_cells,
            fault,
        } => {
            let opts = VerifyOptions {
                seed,
                corpus_size,
                max_cells,
                fault,
            };
            let reports = run_verification(suite.into(), &opts)?;
            emit(&(json(&reports)? + "\n"));
            if suite_passed(&reports) {
                Ok(())
            } else {
                let failed: Vec<String> = reports
                    .iter()
                    .filter(|r| !r.holds && r.kind != hgut::report::CheckKind::Monitored)
                    .map(|r| format!("{} [{}]", r.name, r.instance))
                    .collect();
                Err(Failure::Assertion(format!("failed checks: {}", failed.join(", "))))
            }
        }
        Command::Corpus {
            config,
            generator,
            shape,
            count,
            floor,
            seed,
            out_dir,
        } => {
            let spec: CorpusSpec = match config {
                Some(path) => {
                    let text =
                        fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
                }
                None => {
                    let generator =
                        generator.ok_or_else(|| Failure::Usage("--generator or --config is required".into()))?;
                    let generator: Generator =
                        serde_json::from_str(&generator).map_err(|e| Failure::Usage(format!("--generator: {e}")))?;
                    CorpusSpec {
                        generator,
                        shape: shape.ok_or_else(|| Failure::Usage("--shape is required".into()))?,
                        count: count.unwrap_or(1),
                        floor,
                        seed: seed.unwrap_or(0),
                    }
                }
            };
            let entries = generate_corpus(&spec)?;
            for path in write_corpus(&out_dir, &spec, &entries)? {
                emit(&format!("{}\n", path.display()));
            }
            Ok(())
        }
        Command::Sweep {
            config,
            output,
            scaling_factor,
            out,
        } => {
            let text = fs::read_to_string(&config).map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
            let mut spec: ExperimentSpec =
                serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
            if output.is_some() {
                spec.output = output;
            }
            let outcome = run_experiment(&spec)?;
            match out {
                Format::Csv => emit(&results_csv(&outcome.rows)),
                Format::Json => emit(&results_json(&outcome.rows)?),
            }
            if spec.shapes.len() >= 2 {
                let scaling = scaling_report(&outcome.rows, scaling_factor);
                eprintln!(
                    "scaling: {}",
                    serde_json::to_string(&scaling).map_err(|e| Failure::Usage(e.to_string()))?
                );
            }
            if outcome.assertions_passed {
                Ok(())
            } else {
                Err(Failure::Assertion("accept-rate assertion failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Assertion(msg)) => {
            eprintln!("assertion failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
