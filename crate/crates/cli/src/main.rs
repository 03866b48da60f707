mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Repair, classify and score SMILES corpora.
#[derive(Debug, Parser)]
#[command(name = "smiself", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Input file; standard input when absent.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    /// Worker threads. Output order never depends on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// `symbol<TAB>v1,v2,...` lines applied over the default valences.
    #[arg(long, global = true)]
    pub valence_table: Option<PathBuf>,
    /// `class<TAB>smiles` membership patterns; the shipped set when absent.
    #[arg(long, global = true)]
    pub patterns: Option<PathBuf>,
    /// Add intermediate SELFIES and diagnostics to records.
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Jsonl,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Repair each SMILES line.
    Correct,
    /// Error class per line, then a summary histogram.
    Classify,
    /// Corpus metrics as one JSON object. `--input` holds the predictions.
    Metrics(MetricsArgs),
    /// SELFIES conversions.
    Selfies {
        #[arg(value_enum)]
        mode: SelfiesMode,
    },
    /// Corrupt each valid SMILES line with one seeded mutation.
    Mutate {
        /// Restrict to these mutation kinds.
        #[arg(long, value_enum, value_delimiter = ',')]
        kind: Vec<Kind>,
    },
    /// Verify-and-retry loop over a corrector backend. Lines are
    /// `smiles` or `description<TAB>smiles`.
    Loop(LoopArgs),
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Line-aligned reference SMILES.
    #[arg(long)]
    pub references: Option<PathBuf>,
    /// Line-aligned strings before correction, for the correction rate.
    #[arg(long)]
    pub before: Option<PathBuf>,
    /// Membership class to score.
    #[arg(long)]
    pub class: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelfiesMode {
    Encode,
    Decode,
    Edit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    ParenInsert,
    ParenDelete,
    RingDelete,
    RingDuplicate,
    BondInsert,
    Garbage,
    CaseFlip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Smiself,
    SelfiesEdit,
    External,
}

#[derive(Debug, Args)]
pub struct LoopArgs {
    #[arg(long, value_enum, default_value_t = Backend::Smiself)]
    pub backend: Backend,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_iterations: u32,
    /// Seconds to wait for each external reply.
    #[arg(long, default_value_t = 60)]
    pub timeout: u64,
    /// The external program may serve several requests at once.
    #[arg(long)]
    pub concurrent: bool,
    /// Prompt template with {description} {smiles} {attempt} {error_class} {message}.
    #[arg(long)]
    pub template: Option<String>,
    /// External program and its arguments, after `--`.
    #[arg(last = true)]
    pub command: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("smiself: {e:#}");
            ExitCode::from(2)
        }
    }
}
