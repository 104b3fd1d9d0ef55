//! `litmini`: build a sentence corpus and its vector stores, then search,
//! cluster, classify and summarize it, locally or through a running service.
//!
//! Exit status: 0 success, 1 usage, 2 data, 3 provider or server unreachable.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use litmini_core::cluster::Linkage;
use litmini_core::sentiment::{Polarity, Task};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "litmini", version, about = "Sentence-level literature mining")]
struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Only log warnings and errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads for local computation.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split extracted documents into a filtered sentence corpus.
    Ingest(IngestArgs),
    /// Embed corpus sentences with one model into a vector store.
    Index(IndexArgs),
    /// Ranked semantic search across one or more stores.
    Search(SearchArgs),
    /// Agglomerative clustering of a store's sentences.
    Cluster(ClusterArgs),
    /// Emotion or polarity labelling, optionally clustered per label.
    Sentiment(SentimentArgs),
    /// Summarize the hits of a saved search.
    Summarize(SummarizeArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Serve in-process embed/classify/summarize provider doubles over HTTP.
    Doubles(DoublesArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Directory of extracted documents.
    #[arg(long = "in", value_name = "DIR")]
    pub input: PathBuf,
    /// Output corpus directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Abbreviations, one per line, replacing the built-in list.
    #[arg(long, value_name = "FILE")]
    pub abbrev_file: Option<PathBuf>,
    #[arg(long, default_value_t = litmini_core::ingest::MIN_WORDS)]
    pub min_words: u32,
    #[arg(long, default_value_t = litmini_core::ingest::MAX_WORDS)]
    pub max_words: u32,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[arg(long, value_name = "DIR")]
    pub corpus: PathBuf,
    /// Model abbreviation from the registry.
    #[arg(long)]
    pub model: String,
    /// Only embed sentences matching this keyword expression.
    #[arg(long)]
    pub keywords: Option<String>,
    /// Keep raw provider vectors instead of unit-normalizing them.
    #[arg(long)]
    pub no_normalize: bool,
    /// Index figure and table captions instead of body sentences.
    #[arg(long)]
    pub captions: bool,
    /// Registry config; the built-in reference registry otherwise.
    #[arg(long, value_name = "FILE")]
    pub registry: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, value_name = "DIR", required_unless_present = "server")]
    pub corpus: Option<PathBuf>,
    #[arg(long, value_name = "FILE", num_args = 1.., required_unless_present = "server")]
    pub stores: Vec<PathBuf>,
    /// Query text.
    #[arg(long)]
    pub q: String,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Comma-separated model abbreviations; every store otherwise.
    #[arg(long)]
    pub models: Option<String>,
    /// `,` separates alternatives, `+` separates required groups.
    #[arg(long)]
    pub keywords: Option<String>,
    #[arg(long)]
    pub journal: Option<String>,
    #[arg(long)]
    pub year_from: Option<i32>,
    #[arg(long)]
    pub year_to: Option<i32>,
    /// Z-score each model's scores before averaging.
    #[arg(long)]
    pub standardize: bool,
    #[arg(long, default_value_t = litmini_core::search::DEFAULT_MIN_SCORE)]
    pub min_score: f64,
    #[arg(long, default_value_t = litmini_core::search::DEFAULT_MAX_N)]
    pub max_n: usize,
    /// Descending bucket edges for the score histogram.
    #[arg(long, value_delimiter = ',', default_value = "1.0,0.8,0.75,0.7")]
    pub buckets: Vec<f64>,
    /// Neighbouring sentences shown on each side of a hit.
    #[arg(long, default_value_t = 1)]
    pub context: usize,
    #[arg(long, value_name = "FILE")]
    pub registry: Option<PathBuf>,
    /// Query a running service instead of local files.
    #[arg(long, value_name = "URL")]
    pub server: Option<String>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long, value_name = "FILE", required_unless_present = "server")]
    pub store: Option<PathBuf>,
    #[arg(long, value_name = "DIR", required_unless_present = "server")]
    pub corpus: Option<PathBuf>,
    /// Model to cluster on the server.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub keywords: Option<String>,
    #[arg(long, default_value_t = 0.7)]
    pub min_sim: f64,
    #[arg(long, default_value_t = 10)]
    pub min_count: usize,
    #[arg(long, default_value = "average")]
    pub linkage: Linkage,
    /// Keep only the N largest clusters (per year with --per-year).
    #[arg(long, value_name = "N")]
    pub top: Option<usize>,
    /// Cluster each publication year separately.
    #[arg(long)]
    pub per_year: bool,
    /// Write a 2-D projection of clustered points as TSV.
    #[arg(long, value_name = "FILE")]
    pub scatter: Option<PathBuf>,
    /// Ask the summarizer for a topic and summary of each cluster.
    #[arg(long)]
    pub label: bool,
    /// `echo` or a summarize endpoint URL.
    #[arg(long, default_value = "echo")]
    pub provider: String,
    /// Representative sentences sent per cluster when labelling.
    #[arg(long, default_value_t = litmini_core::summarize::DEFAULT_REPS_PER_CLUSTER)]
    pub reps: usize,
    #[arg(long, value_name = "URL")]
    pub server: Option<String>,
}

#[derive(Debug, Args)]
pub struct SentimentArgs {
    #[arg(long, value_name = "DIR", required_unless_present = "server")]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub keywords: Option<String>,
    #[arg(long)]
    pub task: Task,
    /// Emotions need strictly more sentences than this to be kept.
    #[arg(long, default_value_t = litmini_core::sentiment::DEFAULT_MIN_SUPPORT)]
    pub min_support: usize,
    /// Emotions removed before the support filter.
    #[arg(long, value_delimiter = ',', default_value = "neutral,gratitude")]
    pub drop: Vec<String>,
    /// Cluster the sentences of each kept label.
    #[arg(long, requires = "model")]
    pub cluster: bool,
    #[arg(long)]
    pub model: Option<String>,
    /// Store for --cluster; embedded on the fly otherwise.
    #[arg(long, value_name = "FILE")]
    pub store: Option<PathBuf>,
    #[arg(long, default_value = "negative")]
    pub polarity: Polarity,
    #[arg(long, default_value_t = 0.85)]
    pub min_sim: f64,
    #[arg(long, default_value_t = 10)]
    pub min_count: usize,
    /// `builtin:lexicon` or a classify endpoint URL.
    #[arg(long, default_value = "builtin:lexicon")]
    pub provider: String,
    #[arg(long, value_name = "FILE")]
    pub registry: Option<PathBuf>,
    #[arg(long, value_name = "URL")]
    pub server: Option<String>,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    /// Output of `search --json` (or a bare hit array); `-` reads stdin.
    #[arg(long, value_name = "FILE")]
    pub from_search: PathBuf,
    /// summary400, challenge or topic50.
    #[arg(long, default_value = "summary400")]
    pub template: String,
    /// `echo` or a summarize endpoint URL.
    #[arg(long, default_value = "echo")]
    pub provider: String,
    /// Take sentence text from this corpus rather than the saved hits.
    #[arg(long, value_name = "DIR")]
    pub corpus: Option<PathBuf>,
    #[arg(long, value_name = "URL")]
    pub server: Option<String>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "LITMINI_CONFIG", value_name = "FILE")]
    pub config: PathBuf,
    /// Overrides the configured listen address.
    #[arg(long, env = "LITMINI_LISTEN", value_name = "ADDR")]
    pub listen: Option<String>,
}

#[derive(Debug, Args)]
pub struct DoublesArgs {
    #[arg(long, default_value = "127.0.0.1:8090", value_name = "ADDR")]
    pub listen: String,
}

fn init_logging(quiet: bool) {
    let default = if quiet { "warn" } else { "info" };
    let filter = tracing_subscriber::EnvFilter::try_from_default_env()
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default));
    tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .with_target(false)
        .init();
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(CliError::usage)?;
    }
    let out = commands::Output { json: cli.json };
    match cli.command {
        Command::Ingest(a) => commands::ingest(&a, out),
        Command::Index(a) => commands::index(&a, out),
        Command::Search(a) => commands::search(&a, out),
        Command::Cluster(a) => commands::cluster(&a, out),
        Command::Sentiment(a) => commands::sentiment(&a, out),
        Command::Summarize(a) => commands::summarize(&a, out),
        Command::Serve(a) => commands::serve(&a),
        Command::Doubles(a) => commands::doubles(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(error::Kind::Usage as u8),
            };
        }
    };
    init_logging(cli.quiet);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
