//! Assumption checks for the matching design: are twin pairs really
//! parallel works (publication-year gaps), on the same topic (abstract
//! bag-of-words distance vs. random pairs) and in the same community
//! (collaboration-network distance vs. random pairs)?
//!
//! All randomized baselines are pure functions of (inputs, seed): pair
//! sampling happens single-threaded up front with a seeded generator, so
//! repeated runs produce bit-identical reports.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::Corpus;
use crate::twin_graph::{paper_collab_distance, CollabDistance, CollabGraph, TwinSet};

/// Split text into comparison tokens: lowercase, split on unicode
/// whitespace, strip leading and trailing non-alphanumeric characters,
/// drop anything left empty.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split_whitespace()
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// L1 distance between the L1-normalized term-frequency vectors of two
/// texts. Ranges over [0, 2]: 0 for identical token distributions, 2 for
/// disjoint vocabularies. Two empty texts are at distance 0, an empty text
/// is at distance 2 from any non-empty one.
pub fn bow_distance(a: &str, b: &str) -> f64 {
    let ta = tokenize(a);
    let tb = tokenize(b);
    match (ta.is_empty(), tb.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return 2.0,
        (false, false) => {}
    }

    let frequencies = |tokens: &[String]| -> HashMap<String, f64> {
        let mut counts: HashMap<String, f64> = HashMap::new();
        for t in tokens {
            *counts.entry(t.clone()).or_insert(0.0) += 1.0;
        }
        let total = tokens.len() as f64;
        for v in counts.values_mut() {
            *v /= total;
        }
        counts
    };
    let pa = frequencies(&ta);
    let pb = frequencies(&tb);

    let mut distance = 0.0;
    for (token, &p) in &pa {
        distance += (p - pb.get(token).copied().unwrap_or(0.0)).abs();
    }
    for (token, &q) in &pb {
        if !pa.contains_key(token) {
            distance += q;
        }
    }
    distance
}

/// Fixed-bin histogram with inclusive-lower, exclusive-upper edges.
/// Values outside the edge range land in the underflow/overflow counters,
/// so the total count is conserved under any binning.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
    underflow: u64,
    overflow: u64,
    n: u64,
}

impl Histogram {
    pub fn new(edges: Vec<f64>) -> Result<Histogram> {
        if edges.len() < 2 {
            return Err(Error::Validation("histogram needs at least two edges".into()));
        }
        if !edges.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Validation(
                "histogram edges must be strictly increasing".into(),
            ));
        }
        let bins = edges.len() - 1;
        Ok(Histogram {
            edges,
            counts: vec![0; bins],
            underflow: 0,
            overflow: 0,
            n: 0,
        })
    }

    /// `bins` equal-width bins covering [lo, hi).
    pub fn uniform(lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
        if bins == 0 || !(lo < hi) {
            return Err(Error::Validation("invalid uniform histogram range".into()));
        }
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
        Histogram::new(edges)
    }

    /// Unit-width bins [0,1), [1,2), ..., [max, max+1) for small counts.
    pub fn integer_bins(max_value: u64) -> Histogram {
        let edges = (0..=max_value + 1).map(|i| i as f64).collect();
        Histogram::new(edges).expect("integer edges are valid")
    }

    pub fn record(&mut self, value: f64) {
        self.n += 1;
        if value < self.edges[0] {
            self.underflow += 1;
            return;
        }
        if value >= *self.edges.last().expect("non-empty edges") {
            self.overflow += 1;
            return;
        }
        // First edge strictly greater than value, minus one.
        let bin = self.edges.partition_point(|&e| e <= value) - 1;
        self.counts[bin] += 1;
    }

    pub fn record_all<I: IntoIterator<Item = f64>>(&mut self, values: I) {
        for v in values {
            self.record(v);
        }
    }

    /// (lower edge, upper edge, count) per bin.
    pub fn bins(&self) -> impl Iterator<Item = (f64, f64, u64)> + '_ {
        self.edges
            .windows(2)
            .zip(&self.counts)
            .map(|(w, &c)| (w[0], w[1], c))
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn underflow(&self) -> u64 {
        self.underflow
    }

    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

/// Publication-year gap distribution over twin pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct YearGapReport {
    pub histogram: Histogram,
    /// Share of pairs published in the same or adjacent years, among pairs
    /// where both years are known. `None` when no pair has both years.
    pub same_or_next_year_fraction: Option<f64>,
    pub missing_year_pairs: u64,
}

pub fn year_gap_histogram(twins: &TwinSet, corpus: &Corpus) -> YearGapReport {
    let mut gaps = Vec::with_capacity(twins.len());
    let mut missing = 0u64;
    for pair in twins.pairs() {
        let a = corpus.get(pair.first()).and_then(|p| p.year);
        let b = corpus.get(pair.second()).and_then(|p| p.year);
        match (a, b) {
            (Some(a), Some(b)) => gaps.push(a.abs_diff(b) as u64),
            _ => missing += 1,
        }
    }
    let max_gap = gaps.iter().copied().max().unwrap_or(0);
    let mut histogram = Histogram::integer_bins(max_gap);
    histogram.record_all(gaps.iter().map(|&g| g as f64));
    let fraction = if gaps.is_empty() {
        None
    } else {
        let close = gaps.iter().filter(|&&g| g <= 1).count();
        Some(close as f64 / gaps.len() as f64)
    };
    YearGapReport {
        histogram,
        same_or_next_year_fraction: fraction,
        missing_year_pairs: missing,
    }
}

/// Twin vs. random-pair abstract distance distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct AbstractDistanceReport {
    pub twins: Histogram,
    pub random: Histogram,
    pub twin_mean: Option<f64>,
    pub random_mean: Option<f64>,
    /// Twin pairs skipped because a member has no abstract.
    pub skipped_missing_abstract: u64,
}

const DISTANCE_BINS: usize = 21;
const DISTANCE_BIN_MAX: f64 = 2.1;

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Sample `n` index pairs of distinct eligible papers, skipping pairs that
/// are twins. Pairs may repeat across draws.
fn sample_random_pairs(
    eligible: &[u32],
    n: usize,
    twins: &TwinSet,
    corpus: &Corpus,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(u32, u32)>> {
    if eligible.len() < 2 {
        return Err(Error::Validation(
            "need at least two eligible papers to sample random pairs".into(),
        ));
    }
    let twin_ids: HashSet<(&str, &str)> = twins
        .pairs()
        .iter()
        .map(|p| (p.first(), p.second()))
        .collect();
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0u64;
    let max_attempts = 1000 * n as u64 + 10_000;
    while out.len() < n {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::Validation(
                "could not sample non-twin random pairs; nearly all eligible pairs are twins"
                    .into(),
            ));
        }
        let i = eligible[rng.random_range(0..eligible.len())];
        let j = eligible[rng.random_range(0..eligible.len())];
        if i == j {
            continue;
        }
        let a = corpus.by_position(i).id.as_str();
        let b = corpus.by_position(j).id.as_str();
        let key = if a < b { (a, b) } else { (b, a) };
        if twin_ids.contains(&key) {
            continue;
        }
        out.push((i, j));
    }
    Ok(out)
}

/// Compare abstract distances within twin pairs against `n_random` seeded
/// uniform pairs of distinct papers that have abstracts.
pub fn abstract_distance_report(
    twins: &TwinSet,
    corpus: &Corpus,
    n_random: usize,
    seed: u64,
) -> Result<AbstractDistanceReport> {
    if n_random == 0 {
        return Err(Error::Validation("n_random must be at least 1".into()));
    }

    let mut twin_pairs = Vec::new();
    let mut skipped = 0u64;
    for pair in twins.pairs() {
        let a = corpus.get(pair.first()).and_then(|p| p.abstract_text.as_deref());
        let b = corpus.get(pair.second()).and_then(|p| p.abstract_text.as_deref());
        match (a, b) {
            (Some(a), Some(b)) => twin_pairs.push((a, b)),
            _ => skipped += 1,
        }
    }

    let eligible: Vec<u32> = (0..corpus.len() as u32)
        .filter(|&p| corpus.by_position(p).abstract_text.is_some())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_pairs = sample_random_pairs(&eligible, n_random, twins, corpus, &mut rng)?;

    let twin_distances: Vec<f64> = twin_pairs
        .par_iter()
        .map(|(a, b)| bow_distance(a, b))
        .collect();
    let random_distances: Vec<f64> = random_pairs
        .par_iter()
        .map(|&(i, j)| {
            let a = corpus.by_position(i).abstract_text.as_deref().unwrap_or("");
            let b = corpus.by_position(j).abstract_text.as_deref().unwrap_or("");
            bow_distance(a, b)
        })
        .collect();

    let mut twin_hist = Histogram::uniform(0.0, DISTANCE_BIN_MAX, DISTANCE_BINS)?;
    twin_hist.record_all(twin_distances.iter().copied());
    let mut random_hist = Histogram::uniform(0.0, DISTANCE_BIN_MAX, DISTANCE_BINS)?;
    random_hist.record_all(random_distances.iter().copied());

    Ok(AbstractDistanceReport {
        twins: twin_hist,
        random: random_hist,
        twin_mean: mean(&twin_distances),
        random_mean: mean(&random_distances),
        skipped_missing_abstract: skipped,
    })
}

/// Twin vs. random-pair collaboration-network distance distributions.
/// Pairs with no connecting path and pairs where a member has no authors
/// are counted outside the finite-distance histograms.
#[derive(Debug, Clone, PartialEq)]
pub struct CollabDistanceReport {
    pub twins: Histogram,
    pub random: Histogram,
    pub twin_unreachable: u64,
    pub twin_no_authors: u64,
    pub random_unreachable: u64,
    pub random_no_authors: u64,
    pub twin_finite_mean: Option<f64>,
    pub random_finite_mean: Option<f64>,
}

impl CollabDistanceReport {
    /// Total count rendered as `inf` in tabular output (disconnected plus
    /// author-less pairs), per side.
    pub fn twin_inf(&self) -> u64 {
        self.twin_unreachable + self.twin_no_authors
    }

    pub fn random_inf(&self) -> u64 {
        self.random_unreachable + self.random_no_authors
    }
}

pub fn collab_distance_report(
    twins: &TwinSet,
    corpus: &Corpus,
    n_random: usize,
    seed: u64,
) -> Result<CollabDistanceReport> {
    if n_random == 0 {
        return Err(Error::Validation("n_random must be at least 1".into()));
    }
    let graph = CollabGraph::build(corpus);

    let everyone: Vec<u32> = (0..corpus.len() as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_pairs = sample_random_pairs(&everyone, n_random, twins, corpus, &mut rng)?;

    let twin_distances: Vec<CollabDistance> = twins
        .pairs()
        .par_iter()
        .map(|pair| {
            let a = corpus.get(pair.first()).expect("twin ids resolve");
            let b = corpus.get(pair.second()).expect("twin ids resolve");
            paper_collab_distance(&graph, a, b)
        })
        .collect();
    let random_distances: Vec<CollabDistance> = random_pairs
        .par_iter()
        .map(|&(i, j)| {
            paper_collab_distance(&graph, corpus.by_position(i), corpus.by_position(j))
        })
        .collect();

    let max_hops = twin_distances
        .iter()
        .chain(&random_distances)
        .filter_map(CollabDistance::hops)
        .max()
        .unwrap_or(0) as u64;

    let tally = |distances: &[CollabDistance]| -> (Histogram, u64, u64, Option<f64>) {
        let mut hist = Histogram::integer_bins(max_hops);
        let mut unreachable = 0u64;
        let mut no_authors = 0u64;
        let mut finite = Vec::new();
        for d in distances {
            match d {
                CollabDistance::Hops(h) => {
                    hist.record(*h as f64);
                    finite.push(*h as f64);
                }
                CollabDistance::Unreachable => unreachable += 1,
                CollabDistance::NoAuthors => no_authors += 1,
            }
        }
        (hist, unreachable, no_authors, mean(&finite))
    };

    let (twin_hist, twin_unreachable, twin_no_authors, twin_finite_mean) =
        tally(&twin_distances);
    let (random_hist, random_unreachable, random_no_authors, random_finite_mean) =
        tally(&random_distances);

    Ok(CollabDistanceReport {
        twins: twin_hist,
        random: random_hist,
        twin_unreachable,
        twin_no_authors,
        random_unreachable,
        random_no_authors,
        twin_finite_mean,
        random_finite_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_corpus_str, CorpusFormat};
    use crate::twin_graph::detect_twins;
    use proptest::prelude::*;

    #[test]
    fn tokenizer_strips_punctuation_and_lowercases() {
        assert_eq!(tokenize("Deep Learning: a survey."), ["deep", "learning", "a", "survey"]);
        assert_eq!(tokenize("  (Hello)   WORLD!! "), ["hello", "world"]);
        assert_eq!(tokenize("--- ::: ---"), Vec::<String>::new());
        assert_eq!(tokenize("don't stop"), ["don't", "stop"]);
    }

    #[test]
    fn bow_distance_examples() {
        assert_eq!(bow_distance("same words here", "same words here"), 0.0);
        assert_eq!(bow_distance("alpha beta", "gamma delta"), 2.0);
        assert!((bow_distance("a b", "a c") - 1.0).abs() < 1e-12);
        assert_eq!(bow_distance("", ""), 0.0);
        assert_eq!(bow_distance("", "something"), 2.0);
        // Same distribution, different multiplicities.
        assert!(bow_distance("a b a b", "a b").abs() < 1e-12);
    }

    /// Independent term-frequency computation for the metric tests.
    fn tf(text: &str) -> std::collections::BTreeMap<String, f64> {
        let tokens = tokenize(text);
        let mut map = std::collections::BTreeMap::new();
        for t in &tokens {
            *map.entry(t.clone()).or_insert(0.0) += 1.0 / tokens.len() as f64;
        }
        map
    }

    fn short_text() -> impl Strategy<Value = String> {
        proptest::collection::vec(
            prop_oneof![Just("a"), Just("b"), Just("c"), Just("d"), Just("X,"), Just("(y)")],
            0..8,
        )
        .prop_map(|words| words.join(" "))
    }

    proptest! {
        #[test]
        fn bow_distance_is_a_metric(a in short_text(), b in short_text(), c in short_text()) {
            let dab = bow_distance(&a, &b);
            let dba = bow_distance(&b, &a);
            prop_assert!((dab - dba).abs() < 1e-12, "symmetry");
            prop_assert!((0.0..=2.0).contains(&dab), "range, got {dab}");

            // Identity of indiscernibles on normalized vectors. Empty texts
            // sit at distance 2 from non-empty ones by definition, which the
            // tf map cannot express, so compare only the both-non-empty case.
            if !tokenize(&a).is_empty() && !tokenize(&b).is_empty() {
                prop_assert_eq!(dab.abs() < 1e-12, tf(&a) == tf(&b));
            }

            let dac = bow_distance(&a, &c);
            let dcb = bow_distance(&c, &b);
            prop_assert!(dab <= dac + dcb + 1e-12, "triangle: {dab} > {dac} + {dcb}");
        }

        #[test]
        fn histogram_conserves_counts_across_binnings(
            values in proptest::collection::vec(-1.0f64..3.0, 0..50),
            bins in 1usize..12,
        ) {
            let mut h = Histogram::uniform(0.0, 2.0, bins).unwrap();
            h.record_all(values.iter().copied());
            let total: u64 = h.counts().iter().sum::<u64>() + h.underflow() + h.overflow();
            prop_assert_eq!(total, values.len() as u64);
            prop_assert_eq!(h.n(), values.len() as u64);
        }
    }

    #[test]
    fn histogram_bin_lookup_is_half_open() {
        let mut h = Histogram::uniform(0.0, 3.0, 3).unwrap();
        h.record_all([0.0, 0.999, 1.0, 2.5, 3.0, -0.1]);
        assert_eq!(h.counts(), &[2, 1, 1]);
        assert_eq!(h.overflow(), 1);
        assert_eq!(h.underflow(), 1);
    }

    fn twin_corpus(lines: &[String]) -> (Corpus, TwinSet) {
        let text = lines.join("\n");
        let corpus = parse_corpus_str(&text, CorpusFormat::JsonLines)
            .unwrap()
            .corpus;
        let twins = detect_twins(&corpus);
        (corpus, twins)
    }

    #[test]
    fn year_gap_fraction_counts_same_and_next_year() {
        // Gaps 0, 0, 1, 3 -> fraction 0.75.
        let gaps = [0, 0, 1, 3];
        let mut lines = Vec::new();
        for (i, gap) in gaps.iter().enumerate() {
            let (a, b) = (2 * i, 2 * i + 1);
            lines.push(format!(
                "{{\"id\":\"p{a:02}\",\"title\":\"t\",\"year\":2000,\"references\":[\"p{b:02}\"]}}"
            ));
            lines.push(format!(
                "{{\"id\":\"p{b:02}\",\"title\":\"t\",\"year\":{},\"references\":[\"p{a:02}\"]}}",
                2000 + gap
            ));
        }
        let (corpus, twins) = twin_corpus(&lines);
        assert_eq!(twins.len(), 4);
        let report = year_gap_histogram(&twins, &corpus);
        assert_eq!(report.same_or_next_year_fraction, Some(0.75));
        assert_eq!(report.missing_year_pairs, 0);
        assert_eq!(report.histogram.counts(), &[2, 1, 0, 1]);
    }

    #[test]
    fn year_gap_skips_and_counts_missing_years() {
        let lines = vec![
            r#"{"id":"A","title":"t","references":["B"]}"#.to_string(),
            r#"{"id":"B","title":"t","year":2001,"references":["A"]}"#.to_string(),
        ];
        let (corpus, twins) = twin_corpus(&lines);
        let report = year_gap_histogram(&twins, &corpus);
        assert_eq!(report.missing_year_pairs, 1);
        assert_eq!(report.same_or_next_year_fraction, None);
    }

    fn abstract_corpus(abstracts: &[&str], twin_count: usize) -> (Corpus, TwinSet) {
        let mut lines = Vec::new();
        for (i, text) in abstracts.iter().enumerate() {
            let refs = if i < 2 * twin_count {
                let partner = if i % 2 == 0 { i + 1 } else { i - 1 };
                format!("\"p{partner:02}\"")
            } else {
                String::new()
            };
            lines.push(format!(
                "{{\"id\":\"p{i:02}\",\"title\":\"t\",\"abstract\":\"{text}\",\"references\":[{refs}]}}"
            ));
        }
        twin_corpus(&lines)
    }

    #[test]
    fn identical_abstracts_degenerate_at_zero() {
        let (corpus, twins) = abstract_corpus(&["x y z"; 8], 2);
        let report = abstract_distance_report(&twins, &corpus, 10, 7).unwrap();
        assert_eq!(report.twin_mean, Some(0.0));
        assert_eq!(report.random_mean, Some(0.0));
        assert_eq!(report.twins.counts()[0], 2);
        assert_eq!(report.random.counts()[0], 10);
    }

    #[test]
    fn abstract_report_is_seed_deterministic() {
        let (corpus, twins) = abstract_corpus(
            &["a b c", "a b d", "p q r", "p q s", "m n o", "x y z", "k l m", "u v w"],
            2,
        );
        let a = abstract_distance_report(&twins, &corpus, 25, 42).unwrap();
        let b = abstract_distance_report(&twins, &corpus, 25, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn abstract_report_counts_missing_abstracts() {
        let lines = vec![
            r#"{"id":"A","title":"t","references":["B"]}"#.to_string(),
            r#"{"id":"B","title":"t","abstract":"x","references":["A"]}"#.to_string(),
            r#"{"id":"C","title":"t","abstract":"x"}"#.to_string(),
            r#"{"id":"D","title":"t","abstract":"y"}"#.to_string(),
        ];
        let (corpus, twins) = twin_corpus(&lines);
        let report = abstract_distance_report(&twins, &corpus, 5, 1).unwrap();
        assert_eq!(report.skipped_missing_abstract, 1);
        assert_eq!(report.twin_mean, None);
    }

    #[test]
    fn collab_report_buckets_isolated_papers() {
        // Single-author papers, all authors distinct, except the twins share
        // one author.
        let lines = vec![
            r#"{"id":"A","title":"t","authors":[{"name":"shared"}],"references":["B"]}"#
                .to_string(),
            r#"{"id":"B","title":"t","authors":[{"name":"shared"}],"references":["A"]}"#
                .to_string(),
            r#"{"id":"C","title":"t","authors":[{"name":"solo one"}]}"#.to_string(),
            r#"{"id":"D","title":"t","authors":[{"name":"solo two"}]}"#.to_string(),
            r#"{"id":"E","title":"t"}"#.to_string(),
        ];
        let (corpus, twins) = twin_corpus(&lines);
        let report = collab_distance_report(&twins, &corpus, 30, 5).unwrap();
        assert_eq!(report.twins.counts()[0], 1, "shared-author twin at distance 0");
        assert_eq!(report.twin_unreachable, 0);
        // Random pairs either disconnect or involve the author-less paper E.
        assert_eq!(
            report.random_unreachable + report.random_no_authors + report.random.n(),
            30
        );
        assert!(report.random_no_authors > 0);
        assert!(report.random_finite_mean.is_none() || report.random.n() > 0);
    }

    #[test]
    fn collab_report_is_seed_deterministic() {
        let lines = vec![
            r#"{"id":"A","title":"t","authors":[{"name":"u"},{"name":"v"}],"references":["B"]}"#
                .to_string(),
            r#"{"id":"B","title":"t","authors":[{"name":"v"},{"name":"w"}],"references":["A"]}"#
                .to_string(),
            r#"{"id":"C","title":"t","authors":[{"name":"w"},{"name":"x"}]}"#.to_string(),
            r#"{"id":"D","title":"t","authors":[{"name":"x"},{"name":"u"}]}"#.to_string(),
        ];
        let (corpus, twins) = twin_corpus(&lines);
        let a = collab_distance_report(&twins, &corpus, 12, 9).unwrap();
        let b = collab_distance_report(&twins, &corpus, 12, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_sampling_requires_two_eligible_papers() {
        let lines = vec![r#"{"id":"A","title":"t","abstract":"x"}"#.to_string()];
        let (corpus, twins) = twin_corpus(&lines);
        let err = abstract_distance_report(&twins, &corpus, 3, 0).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }
}
