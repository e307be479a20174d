//! `framescope` command line: map corpora into semantic-map snapshots,
//! compare snapshots for frame drift, inspect vocabularies and ingests.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 pipeline error.
//! Warnings go to stderr; data artifacts go to files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use framescope::config::{RunConfig, Similarity, DEFAULT_FOCAL_WORDS};
use framescope::export::tables;
use framescope::pipeline::{
    run_compare, run_ingest_report, run_map, run_vocab, write_compare_outputs, PipelineError,
};

const EXIT_USAGE: u8 = 1;
const EXIT_PIPELINE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "framescope",
    version,
    about = "Co-word semantic maps and diachronic frame drift for text corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Every analysis field of the config file can be overridden by the
/// flag of the same name; flags win over the file and the environment.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// Directory of .txt documents
    #[arg(long)]
    input_dir: Option<PathBuf>,
    /// Stopword file (one lowercase word per line); also settable via
    /// FRAMESCOPE_STOPWORDS
    #[arg(long)]
    stopword_file: Option<PathBuf>,
    /// Frequency cutoff: keep words occurring strictly more often
    #[arg(long)]
    min_occurrences: Option<u32>,
    /// Maximum number of vocabulary words
    #[arg(long)]
    vocab_cap: Option<usize>,
    /// Fixed edge threshold instead of the derived lower-triangle mean
    #[arg(long = "threshold")]
    threshold_override: Option<f64>,
    /// Similarity measure: cosine (default) or pearson
    #[arg(long)]
    similarity: Option<String>,
    /// Use presence/absence instead of raw counts
    #[arg(long)]
    binary_counts: bool,
    /// Layout seed
    #[arg(long)]
    seed: Option<u64>,
    /// Display length of a component diameter
    #[arg(long)]
    l0: Option<f64>,
    /// Spring constant
    #[arg(long)]
    k: Option<f64>,
    /// Layout convergence bound on gradient magnitudes
    #[arg(long)]
    epsilon: Option<f64>,
    /// Layout move budget (default: 1000 per node)
    #[arg(long)]
    max_iter: Option<usize>,
    /// Base of the node-size logarithm (default: e)
    #[arg(long)]
    node_log_base: Option<f64>,
    /// Display size for frequency-1 nodes (default: 0.1)
    #[arg(long)]
    node_min_size: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline for one window and write all artifacts
    Map {
        #[arg(long)]
        config: PathBuf,
        /// Window label from the config
        #[arg(long)]
        window: String,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Compare two saved snapshots for focal-word drift and emerging terms
    Compare {
        /// Earlier snapshot (.fsn)
        #[arg(long)]
        before: PathBuf,
        /// Later snapshot (.fsn)
        #[arg(long)]
        after: PathBuf,
        /// Comma-separated focal words (default: product,sweetener,food,sugar,diet)
        #[arg(long, value_delimiter = ',')]
        focal: Vec<String>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Print the window vocabulary with frequencies and inclusion flags
    Vocab {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        window: String,
        /// Show only the N most frequent entries
        #[arg(long)]
        top: Option<usize>,
        /// Also write the full listing as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Ingest the corpus and report what was read, skipped, or repaired
    IngestReport {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let code = match e {
            PipelineError::Config(_) => EXIT_USAGE,
            _ => EXIT_PIPELINE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn load_config(path: &PathBuf, overrides: &Overrides) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("config {}: {e}", path.display())))?;
    let mut config = RunConfig::from_json(&text)
        .map_err(|e| Failure::usage(format!("config {}: {e}", path.display())))?;

    if let Ok(env_stopwords) = std::env::var("FRAMESCOPE_STOPWORDS") {
        if !env_stopwords.is_empty() {
            config.stopword_file = Some(PathBuf::from(env_stopwords));
        }
    }

    if let Some(v) = &overrides.input_dir {
        config.input_dir = v.clone();
    }
    if let Some(v) = &overrides.stopword_file {
        config.stopword_file = Some(v.clone());
    }
    if let Some(v) = overrides.min_occurrences {
        config.min_occurrences = v;
    }
    if let Some(v) = overrides.vocab_cap {
        config.vocab_cap = v;
    }
    if let Some(v) = overrides.threshold_override {
        config.threshold_override = Some(v);
    }
    if let Some(v) = &overrides.similarity {
        config.similarity = match v.as_str() {
            "cosine" => Similarity::Cosine,
            "pearson" => Similarity::Pearson,
            other => {
                return Err(Failure::usage(format!(
                    "similarity must be cosine or pearson, not {other:?}"
                )))
            }
        };
    }
    if overrides.binary_counts {
        config.binary_counts = true;
    }
    if let Some(v) = overrides.seed {
        config.seed = v;
    }
    if let Some(v) = overrides.l0 {
        config.l0 = v;
    }
    if let Some(v) = overrides.k {
        config.k = v;
    }
    if let Some(v) = overrides.epsilon {
        config.epsilon = v;
    }
    if let Some(v) = overrides.max_iter {
        config.max_iter = Some(v);
    }
    if let Some(v) = overrides.node_log_base {
        config.node_log_base = v;
    }
    if let Some(v) = overrides.node_min_size {
        config.node_min_size = v;
    }
    config.validate().map_err(Failure::usage)?;
    Ok(config)
}

fn emit_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn run() -> Result<(), Failure> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version are not errors; everything else is usage
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                print!("{e}");
                return Ok(());
            }
            return Err(Failure::usage(e.to_string()));
        }
    };
    match cli.command {
        Command::Map {
            config,
            window,
            out_dir,
            overrides,
        } => {
            let config = load_config(&config, &overrides)?;
            let outcome = run_map(&config, &window, &out_dir)?;
            emit_warnings(&outcome.warnings);
            print!("{}", outcome.report.to_text());
            println!("artifacts: {}", outcome.out_dir.display());
        }
        Command::Compare {
            before,
            after,
            focal,
            out_dir,
        } => {
            let focal: Vec<String> = if focal.is_empty() {
                DEFAULT_FOCAL_WORDS.iter().map(|s| s.to_string()).collect()
            } else {
                focal
            };
            let outcome = run_compare(&before, &after, &focal)?;
            let dir = write_compare_outputs(&outcome.diff, &outcome.table, &out_dir)?;
            print!("{}", outcome.table);
            println!("artifacts: {}", dir.display());
        }
        Command::Vocab {
            config,
            window,
            top,
            csv,
            overrides,
        } => {
            let config = load_config(&config, &overrides)?;
            let (vocab, warnings) = run_vocab(&config, &window)?;
            emit_warnings(&warnings);
            println!(
                "{:<24} {:>12} {:>9}  included",
                "stem", "window_freq", "doc_freq"
            );
            let limit = top.unwrap_or(vocab.entries.len());
            for e in vocab.entries.iter().take(limit) {
                println!(
                    "{:<24} {:>12} {:>9}  {}",
                    e.stem,
                    e.window_frequency,
                    e.doc_frequency,
                    if e.included { "yes" } else { "no" }
                );
            }
            if let Some(path) = csv {
                std::fs::write(&path, tables::vocabulary_csv(&vocab)).map_err(|e| Failure {
                    code: EXIT_PIPELINE,
                    message: format!("cannot write {}: {e}", path.display()),
                })?;
            }
        }
        Command::IngestReport { config, overrides } => {
            let config = load_config(&config, &overrides)?;
            let report = run_ingest_report(&config)?;
            println!("directory: {}", report.directory);
            println!("files_seen: {}", report.files_seen);
            println!("documents: {}", report.documents);
            println!("undated: {}", report.undated);
            println!("replaced_utf8_bytes: {}", report.total_replaced());
            println!("skipped: {}", report.skipped.len());
            for (path, reason) in &report.skipped {
                println!("  {path}: {reason}");
            }
            for w in &report.warnings {
                println!("note: {w}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
