//! The scalar outcome behind every estimate: `log2(citations + smoothing)`.
//!
//! Citation counts span several orders of magnitude, so everything
//! downstream works in log2 units. The default smoothing of 1 maps zero
//! citations to outcome 0 and keeps the transform defined everywhere.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::ingest::Corpus;

/// Where citation counts come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CitationSource {
    /// Use the snapshot's `n_citation` when the record has one, otherwise
    /// fall back to corpus-internal incoming references.
    #[default]
    PreferSnapshot,
    /// Only `n_citation`; papers without it get no outcome.
    SnapshotOnly,
    /// Only corpus-internal incoming references.
    CorpusInternal,
}

/// Outcome per paper id, in log2 units.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTable {
    values: HashMap<String, f64>,
    pub smoothing: f64,
    pub source: CitationSource,
}

impl OutcomeTable {
    /// Assemble a table from precomputed values. Useful for tests and for
    /// outcome definitions produced outside this module.
    pub fn from_values(
        values: HashMap<String, f64>,
        smoothing: f64,
        source: CitationSource,
    ) -> OutcomeTable {
        OutcomeTable {
            values,
            smoothing,
            source,
        }
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.values.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Resolve a paper's citation count under the configured source.
pub fn resolve_citations(corpus: &Corpus, position: u32, source: CitationSource) -> Option<u64> {
    let paper = corpus.by_position(position);
    match source {
        CitationSource::PreferSnapshot => paper
            .citation_count
            .or_else(|| Some(corpus.in_citations_at(position) as u64)),
        CitationSource::SnapshotOnly => paper.citation_count,
        CitationSource::CorpusInternal => Some(corpus.in_citations_at(position) as u64),
    }
}

/// Compute `log2(citations + smoothing)` for every paper with a resolvable
/// citation count.
///
/// `smoothing` must be positive unless every resolvable count is, since
/// `log2(0)` is undefined; violations are a configuration error naming how
/// many papers are affected.
pub fn compute_outcomes(
    corpus: &Corpus,
    smoothing: f64,
    source: CitationSource,
) -> Result<OutcomeTable> {
    if !(smoothing >= 0.0) || !smoothing.is_finite() {
        return Err(Error::Validation(format!(
            "smoothing must be finite and non-negative, got {smoothing}"
        )));
    }
    if smoothing == 0.0 {
        let zero_count = (0..corpus.len() as u32)
            .filter(|&p| resolve_citations(corpus, p, source) == Some(0))
            .count();
        if zero_count > 0 {
            return Err(Error::Validation(format!(
                "smoothing 0 is undefined for zero-citation papers; {zero_count} papers have zero citations"
            )));
        }
    }

    let mut values = HashMap::with_capacity(corpus.len());
    for position in 0..corpus.len() as u32 {
        if let Some(citations) = resolve_citations(corpus, position, source) {
            let outcome = (citations as f64 + smoothing).log2();
            values.insert(corpus.by_position(position).id.clone(), outcome);
        }
    }
    Ok(OutcomeTable {
        values,
        smoothing,
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_corpus_str, CorpusFormat};

    fn corpus(lines: &[&str]) -> Corpus {
        parse_corpus_str(&lines.join("\n"), CorpusFormat::JsonLines)
            .unwrap()
            .corpus
    }

    #[test]
    fn log2_with_unit_smoothing() {
        let c = corpus(&[
            r#"{"id":"A","title":"t","n_citation":7}"#,
            r#"{"id":"B","title":"t","n_citation":0}"#,
        ]);
        let outcomes = compute_outcomes(&c, 1.0, CitationSource::SnapshotOnly).unwrap();
        assert_eq!(outcomes.get("A"), Some(3.0));
        assert_eq!(outcomes.get("B"), Some(0.0));
    }

    #[test]
    fn snapshot_preferred_with_internal_fallback() {
        let c = corpus(&[
            r#"{"id":"A","title":"t","n_citation":10,"references":["B"]}"#,
            r#"{"id":"B","title":"t","references":["A"]}"#,
        ]);
        let outcomes = compute_outcomes(&c, 1.0, CitationSource::PreferSnapshot).unwrap();
        // A has a snapshot count; B falls back to one in-corpus citation.
        assert_eq!(outcomes.get("A"), Some((11.0f64).log2()));
        assert_eq!(outcomes.get("B"), Some(1.0));

        let snapshot_only = compute_outcomes(&c, 1.0, CitationSource::SnapshotOnly).unwrap();
        assert_eq!(snapshot_only.get("B"), None);

        let internal = compute_outcomes(&c, 1.0, CitationSource::CorpusInternal).unwrap();
        assert_eq!(internal.get("A"), Some(1.0));
    }

    #[test]
    fn zero_smoothing_with_zero_counts_is_fatal() {
        let c = corpus(&[
            r#"{"id":"A","title":"t","n_citation":0}"#,
            r#"{"id":"B","title":"t","n_citation":3}"#,
        ]);
        let err = compute_outcomes(&c, 0.0, CitationSource::SnapshotOnly).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("1 papers"), "message was {message:?}");
    }

    #[test]
    fn doubling_positive_counts_shifts_outcomes_by_one_without_smoothing() {
        let lines: Vec<String> = (0..20)
            .map(|i| {
                format!(
                    "{{\"id\":\"p{i}\",\"title\":\"t\",\"n_citation\":{}}}",
                    (i + 1) * 3
                )
            })
            .collect();
        let rows: Vec<&str> = lines.iter().map(String::as_str).collect();
        let c = corpus(&rows);

        let doubled_lines: Vec<String> = (0..20)
            .map(|i| {
                format!(
                    "{{\"id\":\"p{i}\",\"title\":\"t\",\"n_citation\":{}}}",
                    (i + 1) * 6
                )
            })
            .collect();
        let doubled_rows: Vec<&str> = doubled_lines.iter().map(String::as_str).collect();
        let c2 = corpus(&doubled_rows);

        let base = compute_outcomes(&c, 0.0, CitationSource::SnapshotOnly).unwrap();
        let doubled = compute_outcomes(&c2, 0.0, CitationSource::SnapshotOnly).unwrap();
        for i in 0..20 {
            let id = format!("p{i}");
            let shift = doubled.get(&id).unwrap() - base.get(&id).unwrap();
            assert!((shift - 1.0).abs() < 1e-12, "paper {id} shifted by {shift}");
        }

        // With smoothing the shift is damped but never exceeds one.
        let smoothed_base = compute_outcomes(&c, 1.0, CitationSource::SnapshotOnly).unwrap();
        let smoothed_doubled = compute_outcomes(&c2, 1.0, CitationSource::SnapshotOnly).unwrap();
        for i in 0..20 {
            let id = format!("p{i}");
            let shift = smoothed_doubled.get(&id).unwrap() - smoothed_base.get(&id).unwrap();
            assert!(shift > 0.0 && shift <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn outcomes_are_monotone_in_citations() {
        let lines: Vec<String> = (0..50)
            .map(|i| format!("{{\"id\":\"p{i:02}\",\"title\":\"t\",\"n_citation\":{}}}", i * 7))
            .collect();
        let rows: Vec<&str> = lines.iter().map(String::as_str).collect();
        let c = corpus(&rows);
        let outcomes = compute_outcomes(&c, 1.0, CitationSource::SnapshotOnly).unwrap();
        for i in 1..50 {
            let lower = outcomes.get(&format!("p{:02}", i - 1)).unwrap();
            let higher = outcomes.get(&format!("p{i:02}")).unwrap();
            assert!(higher > lower);
        }
    }

    #[test]
    fn negative_smoothing_rejected() {
        let c = corpus(&[r#"{"id":"A","title":"t","n_citation":1}"#]);
        assert!(compute_outcomes(&c, -0.5, CitationSource::SnapshotOnly).is_err());
        assert!(compute_outcomes(&c, f64::NAN, CitationSource::SnapshotOnly).is_err());
    }
}
