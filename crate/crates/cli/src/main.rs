//! `gridcount`: enumerate, simulate and invert sample-count observations of
//! piecewise-constant signals.
//!
//! Exit codes:
//!
//! | code | meaning                                        |
//! |------|------------------------------------------------|
//! | 0    | success                                        |
//! | 1    | I/O error                                      |
//! | 2    | bad command line                               |
//! | 3    | input file could not be parsed                 |
//! | 4    | input parsed but is invalid                    |
//! | 5    | signal is not generic (use `simulate` instead) |
//! | 6    | observations are inconsistent                  |
//! | 7    | closed form and brute force disagree           |

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gridcount::cells::{enumerate_cells_capped, CellError, DEFAULT_CELL_BUDGET};
use gridcount::check::{check_many_with, random_generic_signals, CheckSummary};
use gridcount::enumerator::{full_observation_set, EngineError};
use gridcount::formats::{
    parse_observation_file, parse_signal_file, render_atlas, render_enumeration,
    render_genericity, render_inference, render_simulation, to_machine, AtlasDocument,
    EnumerationDocument, FormatError, InferenceDocument, SignalDocument, SimulatedRecord,
    SimulationDocument,
};
use gridcount::inference::{infer, InferenceConfig, InferenceError};
use gridcount::oracle::{count_samples, oracle_observation_set, oracle_partition};
use gridcount::random::{random_offset, rng_from_seed};
use gridcount::signal::{genericity_check, DEFAULT_MAX_REGIONS};
use gridcount::{Offset, SignalSpec};

#[derive(Parser)]
#[command(name = "gridcount", version, about = "Sample-count analysis of piecewise-constant signals")]
struct Cli {
    /// Output style
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,

    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// List every observation vector of a generic signal, with the offset partition
    Enumerate {
        /// Signal file (JSON)
        signal: PathBuf,
    },
    /// Count samples at grid offsets by brute force; works for any signal
    #[command(group(ArgGroup::new("mode").required(true).args(["sweep", "count"])))]
    Simulate {
        /// Signal file (JSON)
        signal: PathBuf,
        /// One record per offset interval: the full observation set
        #[arg(long)]
        sweep: bool,
        /// Number of random offsets to draw
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest denominator of a random offset
        #[arg(long, default_value_t = 1000)]
        max_denominator: i64,
    },
    /// Recover n, window floors, cells and length bounds from observations
    Infer {
        /// Observation file (JSON)
        observations: PathBuf,
        /// Candidate n values per ambiguous region. Values above 2 go beyond
        /// the two candidates the count rule allows and are exploratory only.
        #[arg(long, default_value_t = 2)]
        n_cap: usize,
        /// Random samples for cell discovery
        #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the closed form against brute force
    #[command(group(ArgGroup::new("source").required(true).args(["signal", "random"])))]
    Check {
        /// Signal file (JSON)
        signal: Option<PathBuf>,
        /// Number of random generic signals to check
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest region count for random signals
        #[arg(long, default_value_t = 6)]
        m_max: usize,
    },
    /// Discover the cells of the unit cube of fractional parts
    Cells {
        /// Region count
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A failed run: exit code plus message for standard error.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

const EXIT_IO: u8 = 1;
const EXIT_PARSE: u8 = 3;
const EXIT_VALIDATION: u8 = 4;
const EXIT_NON_GENERIC: u8 = 5;
const EXIT_INCONSISTENT: u8 = 6;
const EXIT_MISMATCH: u8 = 7;

fn inference_code(e: &InferenceError) -> u8 {
    match e {
        InferenceError::Empty
        | InferenceError::NoRegions
        | InferenceError::WrongLength { .. }
        | InferenceError::BadNCap => EXIT_VALIDATION,
        InferenceError::Cells(_) => EXIT_VALIDATION,
        InferenceError::ZeroCount { .. }
        | InferenceError::CoordinateSpread { .. }
        | InferenceError::WindowSpread { .. }
        | InferenceError::InfeasibleWindow { .. }
        | InferenceError::NoSurvivors => EXIT_INCONSISTENT,
    }
}

fn format_failure(path: &Path, e: FormatError) -> Failure {
    let code = match &e {
        FormatError::Observations(inner) => inference_code(inner),
        e if e.is_validation() => EXIT_VALIDATION,
        _ => EXIT_PARSE,
    };
    Failure::new(code, format!("{}: {e}", path.display()))
}

fn engine_failure(signal: &SignalSpec, e: EngineError) -> Failure {
    match e {
        EngineError::NonGeneric(report) => Failure::new(
            EXIT_NON_GENERIC,
            format!(
                "signal is not generic; the closed form does not apply.\n{}\
                 use `gridcount simulate --sweep` for the brute-force observation set",
                render_genericity(&report)
            ),
        ),
        EngineError::TooManyRegions { .. } => Failure::new(EXIT_VALIDATION, e.to_string()),
        other => Failure::new(
            EXIT_MISMATCH,
            format!("internal error on a {}-region signal: {other}", signal.len()),
        ),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn load_signal(path: &Path) -> Result<SignalDocument, Failure> {
    parse_signal_file(&read(path)?).map_err(|e| format_failure(path, e))
}

/// The report text plus the exit code to finish with once it is written.
struct Report {
    text: String,
    code: u8,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, code: 0 }
    }
}

fn enumerate(path: &Path, format: Format) -> Result<Report, Failure> {
    let doc = load_signal(path)?;
    let full = full_observation_set(&doc.signal).map_err(|e| engine_failure(&doc.signal, e))?;
    let agrees = full.partition == oracle_partition(&doc.signal);
    let out = EnumerationDocument::new(&doc, &full, agrees);
    let text = match format {
        Format::Human => render_enumeration(&out),
        Format::Machine => to_machine(&out),
    };
    Ok(Report { text, code: if agrees { 0 } else { EXIT_MISMATCH } })
}

fn simulate(
    path: &Path,
    sweep: bool,
    count: Option<usize>,
    seed: u64,
    max_denominator: i64,
    format: Format,
) -> Result<Report, Failure> {
    if max_denominator < 1 {
        return Err(Failure::new(EXIT_VALIDATION, "--max-denominator must be at least 1"));
    }
    let doc = load_signal(path)?;
    let signal = &doc.signal;
    let records: Vec<SimulatedRecord> = if sweep {
        oracle_partition(signal)
            .intervals()
            .into_iter()
            .map(|iv| SimulatedRecord {
                offset: Offset::new(iv.start).expect("interval start in [0, 1)"),
                counts: iv.counts,
            })
            .collect()
    } else {
        let mut rng = rng_from_seed(seed);
        (0..count.unwrap_or(0))
            .map(|_| {
                let offset = random_offset(&mut rng, max_denominator);
                let counts = count_samples(signal, &offset);
                SimulatedRecord { offset, counts }
            })
            .collect()
    };
    let observations: BTreeSet<_> = records.iter().map(|r| r.counts.clone()).collect();
    let out = SimulationDocument {
        m: signal.len(),
        period: doc.period.clone(),
        generic: genericity_check(signal).generic,
        records,
        observations: observations.into_iter().collect(),
    };
    Ok(Report::ok(match format {
        Format::Human => render_simulation(&out),
        Format::Machine => to_machine(&out),
    }))
}

fn infer_cmd(path: &Path, config: InferenceConfig, format: Format) -> Result<Report, Failure> {
    let doc = parse_observation_file(&read(path)?).map_err(|e| format_failure(path, e))?;
    let report = infer(&doc.set, &config).map_err(|e| Failure::new(inference_code(&e), e.to_string()))?;
    Ok(Report::ok(match format {
        Format::Human => {
            let mut text = render_inference(&report, doc.period.as_ref());
            if config.n_cap > 2 {
                text.push_str("note: --n-cap above 2 admits n values the count rule excludes\n");
            }
            text
        }
        Format::Machine => to_machine(&InferenceDocument::new(&report, doc.period.as_ref())),
    }))
}

fn check_file(path: &Path, format: Format) -> Result<Report, Failure> {
    let doc = load_signal(path)?;
    let signal = &doc.signal;
    let report = genericity_check(signal);
    if !report.generic {
        return Err(engine_failure(signal, EngineError::NonGeneric(report)));
    }
    let summary = check_many_with([signal], full_observation_set, 1);
    let engine: Vec<_> = full_observation_set(signal)
        .map(|f| f.vectors.into_iter().collect())
        .unwrap_or_default();
    let oracle: Vec<_> = oracle_observation_set(signal).into_iter().collect();
    let text = match format {
        Format::Human => {
            let list = |vs: &[gridcount::ObservationVector]| {
                vs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
            };
            format!(
                "closed form: {{{}}}\nbrute force: {{{}}}\n{}",
                list(&engine),
                list(&oracle),
                summary.render()
            )
        }
        Format::Machine => {
            to_machine(&json!({ "summary": summary, "closed_form": engine, "brute_force": oracle }))
        }
    };
    Ok(summary_report(text, &summary))
}

fn check_random(count: usize, seed: u64, m_max: usize, format: Format) -> Result<Report, Failure> {
    if m_max == 0 || m_max > DEFAULT_MAX_REGIONS {
        return Err(Failure::new(
            EXIT_VALIDATION,
            format!("--m-max must be between 1 and {DEFAULT_MAX_REGIONS}"),
        ));
    }
    let signals = random_generic_signals(count, seed, m_max);
    let summary = check_many_with(&signals, full_observation_set, 10);
    let text = match format {
        Format::Human => summary.render(),
        Format::Machine => to_machine(&json!({ "seed": seed, "m_max": m_max, "summary": summary })),
    };
    Ok(summary_report(text, &summary))
}

fn summary_report(text: String, summary: &CheckSummary) -> Report {
    Report { text, code: if summary.all_passed() { 0 } else { EXIT_MISMATCH } }
}

fn cells(m: usize, budget: usize, seed: u64, format: Format) -> Result<Report, Failure> {
    let atlas = enumerate_cells_capped(m, budget, seed, DEFAULT_MAX_REGIONS).map_err(|e| match e {
        CellError::Engine(inner) => Failure::new(EXIT_MISMATCH, inner.to_string()),
        other => Failure::new(EXIT_VALIDATION, other.to_string()),
    })?;
    let doc = AtlasDocument::from(&atlas);
    Ok(Report::ok(match format {
        Format::Human => render_atlas(&doc),
        Format::Machine => to_machine(&doc),
    }))
}

fn run(cli: Cli) -> Result<Report, Failure> {
    let format = cli.format;
    match cli.command {
        Command::Enumerate { signal } => enumerate(&signal, format),
        Command::Simulate { signal, sweep, count, seed, max_denominator } => {
            simulate(&signal, sweep, count, seed, max_denominator, format)
        }
        Command::Infer { observations, n_cap, budget, seed } => {
            let config = InferenceConfig { n_cap, cell_budget: budget, seed, ..Default::default() };
            infer_cmd(&observations, config, format)
        }
        Command::Check { signal: Some(path), .. } => check_file(&path, format),
        Command::Check { random, seed, m_max, .. } => {
            check_random(random.unwrap_or(0), seed, m_max, format)
        }
        Command::Cells { m, budget, seed } => cells(m, budget, seed, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    let report = match run(cli) {
        Ok(report) => report,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            return ExitCode::from(failure.code);
        }
    };
    match output {
        Some(path) => {
            if let Err(e) = fs::write(&path, &report.text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_IO);
            }
        }
        None => print!("{}", report.text),
    }
    ExitCode::from(report.code)
}
