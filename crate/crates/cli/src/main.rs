mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::Invalid;

/// Knowledge-graph pipelines for annotated hate speech corpora.
#[derive(Debug, Parser)]
#[command(name = "dskg", version, about)]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Namespace for minted entity IRIs.
    #[arg(long, global = true)]
    pub base: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Map corpus tables to N-Triples.
    Ingest(IngestArgs),
    /// Link mentioned users and emit their Person triples.
    Link(LinkArgs),
    /// Per-category lexicon profile of the messages in a store.
    Profile(ProfileArgs),
    /// Evaluate a pattern file against a store.
    Query(QueryArgs),
    /// Export the triples around the bindings of a pattern.
    Export(ExportArgs),
    /// Print triple, message, user and annotation counts.
    Stats(StatsArgs),
    /// Encode stereotype annotations and check their clustering.
    Stereotype(StereotypeArgs),
    /// Encode lexicon entries.
    Lexicon(LexiconArgs),
}

#[derive(Debug, Args)]
pub struct StoreArgs {
    /// N-Triples (or `.ttl`) files loaded into one store.
    #[arg(long = "store", required = true)]
    pub stores: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub mapping: PathBuf,
    /// CSV or TSV corpus files read with the same mapping.
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output file (standard output when absent).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Write the ingest report as JSON to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MentionsArg {
    Leading,
    All,
}

#[derive(Debug, Args)]
pub struct LinkArgs {
    #[command(flatten)]
    pub store: StoreArgs,
    /// Directory with `handles/`, `search/` and `facts/` recordings.
    #[arg(long, required_unless_present = "live")]
    pub fixtures: Option<PathBuf>,
    /// Use the network services (credentials from DSKG_X_BEARER_TOKEN and
    /// DSKG_GOOGLE_KG_API_KEY).
    #[arg(long)]
    pub live: bool,
    #[arg(long)]
    pub min_score: Option<f64>,
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long, value_enum)]
    pub mentions: Option<MentionsArg>,
    /// Compare names case-insensitively.
    #[arg(long)]
    pub case_fold: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Write the link report as JSON to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Append the client exchanges as JSON lines to this file.
    #[arg(long)]
    pub exchange_log: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountArg {
    Occurrences,
    Presence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelsArg {
    Conservative,
    All,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub store: StoreArgs,
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long, value_enum)]
    pub levels: Option<LevelsArg>,
    #[arg(long, value_enum)]
    pub count: Option<CountArg>,
    /// Extra rows restricted to one annotation class, as `scheme=value`.
    #[arg(long = "class")]
    pub classes: Vec<String>,
    /// Annotator whose labels define classes.
    #[arg(long, default_value = "gold_standard")]
    pub annotator: String,
    /// Category columns to print, comma separated (all when absent).
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Write the profile rows as JSON lines to this file.
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub store: StoreArgs,
    #[arg(long)]
    pub pattern: PathBuf,
    /// Print one JSON object per binding instead of a table.
    #[arg(long)]
    pub jsonl: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub store: StoreArgs,
    #[arg(long)]
    pub pattern: PathBuf,
    /// Projected variables, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub project: Vec<String>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub store: StoreArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct StereotypeArgs {
    /// CSV with `id` and `text` columns.
    #[arg(long)]
    pub messages: PathBuf,
    #[arg(long, default_value = "tweet")]
    pub genre: String,
    #[arg(long)]
    pub annotations: PathBuf,
    /// CSV with `annotator`, `gender`, `age`, `birth_country` columns.
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    /// Include annotator gender, age and birth country.
    #[arg(long)]
    pub release_demographics: bool,
    /// Do not enforce the 10/5 cluster caps.
    #[arg(long)]
    pub relaxed_caps: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LexiconArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long, value_enum)]
    pub levels: Option<LevelsArg>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Invalid>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
