use std::collections::BTreeMap;
use std::time::Instant;

use twinscope_core::ingest::{parse_corpus, CorpusFormat};
use twinscope_core::Result;

use super::IngestArgs;
use crate::manifest;

pub fn run(args: IngestArgs) -> Result<()> {
    let started = Instant::now();
    let format: CorpusFormat = args.format.parse()?;
    let parsed = parse_corpus(&args.input, format)?;

    eprintln!(
        "ingest: {} records accepted, {} malformed lines, {} duplicate ids",
        parsed.stats.accepted, parsed.stats.malformed, parsed.stats.duplicate_ids
    );
    for sample in &parsed.stats.sample_errors {
        eprintln!("ingest:   {sample}");
    }

    parsed.corpus.save_cache(&args.output)?;
    eprintln!(
        "ingest: wrote corpus cache {} (fingerprint {})",
        args.output.display(),
        &parsed.corpus.fingerprint()[..12]
    );

    let options = BTreeMap::from([
        ("input".to_string(), args.input.display().to_string()),
        ("format".to_string(), args.format.clone()),
        ("output".to_string(), args.output.display().to_string()),
    ]);
    manifest::emit(
        "ingest",
        options,
        &[args.input],
        std::slice::from_ref(&args.output),
        started,
    )
}
