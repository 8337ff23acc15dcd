//! Subcommand definitions and implementations.

pub mod ate;
pub mod diagnose;
pub mod ingest;
pub mod simulate;
pub mod twins;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "twinscope",
    version,
    about = "Matched-pair treatment effect estimation over citation corpora"
)]
pub struct Cli {
    /// Worker threads for parallel stages (0 = auto). Outputs never depend
    /// on this setting.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a line-delimited bibliographic dump into a corpus cache.
    Ingest(IngestArgs),
    /// Detect mutually-citing pairs and write the twin list.
    Twins(TwinsArgs),
    /// Estimate treatment effects over a twin list.
    Ate(AteArgs),
    /// Check the matching assumptions behind the twin design.
    Diagnose(DiagnoseArgs),
    /// Generate a synthetic corpus with known ground truth.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Input file with one record per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Input format: json-lines or tsv.
    #[arg(long, default_value = "json-lines")]
    pub format: String,
    /// Corpus cache file to write.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct TwinsArgs {
    /// Corpus cache produced by `ingest`.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Drop pairs whose publication years differ by more than this.
    #[arg(long)]
    pub max_year_gap: Option<u32>,
    /// Twin list file to write (one `first<TAB>second` pair per line).
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct AteArgs {
    /// Corpus cache produced by `ingest`.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Twin list produced by `twins`.
    #[arg(long)]
    pub twins: PathBuf,
    /// Treatment to estimate, e.g. `colon`, `keyword=learning`,
    /// `short-title`, `long-refs`, `long-abstract`, `long-paper`,
    /// `self-cite`, `priority`, `venue=<a>::<b>`, `combo=<k1>+<k2>`.
    #[arg(long, required_unless_present = "venue_table")]
    pub treatment: Option<String>,
    /// Smoothing constant added to citation counts before taking log2.
    #[arg(long, default_value_t = 1.0)]
    pub smoothing: f64,
    /// Also report the unpaired group-mean estimate (predicate treatments
    /// only).
    #[arg(long)]
    pub naive: bool,
    /// Restrict the naive estimate to papers in these venues
    /// (comma-separated, normalized).
    #[arg(long, value_delimiter = ',')]
    pub venue_filter: Vec<String>,
    /// Emit one row per venue pair instead of a single treatment row.
    #[arg(long)]
    pub venue_table: bool,
    /// Minimum assignable pairs for a venue-table row.
    #[arg(long, default_value_t = 100)]
    pub min_pairs: usize,
    /// Results file to write.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// Corpus cache produced by `ingest`.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Twin list produced by `twins`.
    #[arg(long)]
    pub twins: PathBuf,
    /// Which check to run: year, abstract or collab.
    #[arg(long)]
    pub report: String,
    /// Random pairs for the baseline (defaults to the number of twins).
    #[arg(long)]
    pub n_random: Option<usize>,
    /// Seed for the random-pair baseline; required for abstract and collab.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Histogram file to write.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Generator configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Seed for the generator; overrides any seed in the config file.
    #[arg(long)]
    pub seed: u64,
    /// Corpus file to write (json-lines).
    #[arg(long)]
    pub output_corpus: PathBuf,
    /// Ground-truth ledger to write.
    #[arg(long)]
    pub output_truth: PathBuf,
}

/// Render an optional statistic for tabular output.
pub(crate) fn fmt_opt(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => "NA".to_string(),
    }
}
