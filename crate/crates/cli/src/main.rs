//! `twinscope`: detect mutually-citing paper pairs in a bibliographic
//! corpus and estimate the citation-impact effects of publication
//! decisions from within-pair outcome differences.
//!
//! The pipeline is a set of composable stages over cached artifacts:
//!
//! ```text
//! twinscope ingest   --input dump.jsonl --format json-lines --output corpus.bin
//! twinscope twins    --corpus corpus.bin --output twins.tsv
//! twinscope ate      --corpus corpus.bin --twins twins.tsv --treatment colon --output ate.tsv
//! twinscope diagnose --corpus corpus.bin --twins twins.tsv --report year --output year.tsv
//! twinscope simulate --config synth.toml --seed 7 --output-corpus c.jsonl --output-truth t.tsv
//! ```
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error.
//! Diagnostics go to stderr; data goes only to the declared output files.
//! Every output file gets a `<name>.manifest.json` sidecar recording
//! resolved options and input fingerprints; identical inputs, options and
//! seeds reproduce outputs byte for byte, independent of `--threads`.

mod commands;
mod manifest;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use twinscope_core::Error;

use crate::commands::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) =>
        {
            // Help and version are requested output, not errors.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };

    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("twinscope: failed to configure {} threads: {e}", cli.threads);
            return ExitCode::from(1);
        }
    }

    let result = match cli.command {
        Command::Ingest(args) => commands::ingest::run(args),
        Command::Twins(args) => commands::twins::run(args),
        Command::Ate(args) => commands::ate::run(args),
        Command::Diagnose(args) => commands::diagnose::run(args),
        Command::Simulate(args) => commands::simulate::run(args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Usage(message)) => {
            eprintln!("twinscope: {message}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("twinscope: {e}");
            ExitCode::from(2)
        }
    }
}
