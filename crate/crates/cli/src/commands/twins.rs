use std::collections::BTreeMap;
use std::time::Instant;

use twinscope_core::ingest::Corpus;
use twinscope_core::twin_graph::{detect_twins, filter_twins};
use twinscope_core::Result;

use super::TwinsArgs;
use crate::manifest;

pub fn run(args: TwinsArgs) -> Result<()> {
    let started = Instant::now();
    let corpus = Corpus::load_cache(&args.corpus)?;
    let detected = detect_twins(&corpus);
    eprintln!(
        "twins: {} mutually-citing pairs in {} papers",
        detected.len(),
        corpus.len()
    );

    let twins = if args.max_year_gap.is_some() {
        let filtered = filter_twins(&detected, &corpus, args.max_year_gap);
        eprintln!(
            "twins: {} pairs within year gap {}, {} dropped for missing years",
            filtered.twins.len(),
            args.max_year_gap.unwrap(),
            filtered.dropped_missing_year
        );
        filtered.twins
    } else {
        detected
    };

    twins.save_tsv(&args.output)?;
    eprintln!("twins: wrote {}", args.output.display());

    let mut options = BTreeMap::from([
        ("corpus".to_string(), args.corpus.display().to_string()),
        ("output".to_string(), args.output.display().to_string()),
    ]);
    if let Some(gap) = args.max_year_gap {
        options.insert("max-year-gap".to_string(), gap.to_string());
    }
    manifest::emit(
        "twins",
        options,
        &[args.corpus],
        std::slice::from_ref(&args.output),
        started,
    )
}
