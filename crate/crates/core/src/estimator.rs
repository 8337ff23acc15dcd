//! Treatment effect estimation over twin pairs.
//!
//! The core estimate is the arithmetic mean of within-pair outcome
//! differences, outcome(treated) minus outcome(control), over every
//! assignable pair. Because both members of a pair share whatever the pair
//! matches on, the difference cancels shared confounders that a naive
//! group-mean comparison ([`naive_observational_ate`]) does not.
//!
//! Summation runs in sorted canonical-pair order. That fixes the floating
//! point reduction order, which is the reproducibility contract: identical
//! inputs give bit-identical estimates across runs and thread counts.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::ingest::Corpus;
use crate::outcomes::OutcomeTable;
use crate::treatments::{assign_pair, predicate, Assignment, TreatmentKind, TreatmentSpec};
use crate::twin_graph::TwinSet;

/// The assignable twin pairs for one treatment, in sorted canonical-pair
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDataset {
    pub assignments: Vec<Assignment>,
    pub spec: TreatmentSpec,
    /// Fingerprint of the twin set this dataset was derived from.
    pub provenance: String,
}

impl PairDataset {
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

/// One estimate: mean within-pair difference in log2 citation units.
/// `ate` is `None` for an empty dataset, which is reported as such rather
/// than as zero. `std_dev` is the sample standard deviation of the pair
/// differences (needs at least two pairs); `stderr` is `std_dev / sqrt(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AteResult {
    pub treatment: String,
    pub n_pairs: usize,
    pub ate: Option<f64>,
    pub std_dev: Option<f64>,
    pub stderr: Option<f64>,
}

/// Apply a treatment to every twin pair, keeping the assignable ones.
/// Input pairs are already sorted, so the dataset order is deterministic.
pub fn build_pair_dataset(
    twins: &TwinSet,
    spec: &TreatmentSpec,
    corpus: &Corpus,
) -> Result<PairDataset> {
    let mut assignments = Vec::new();
    for pair in twins.pairs() {
        if let Some(assignment) = assign_pair(spec, pair, corpus)? {
            assignments.push(assignment);
        }
    }
    Ok(PairDataset {
        assignments,
        spec: spec.clone(),
        provenance: twins.fingerprint(),
    })
}

/// Within-pair difference for a single assignment.
pub fn estimate_ite(assignment: &Assignment, outcomes: &OutcomeTable) -> Result<f64> {
    let lookup = |id: &str| -> Result<f64> {
        outcomes
            .get(id)
            .ok_or_else(|| Error::MissingOutcome { id: id.to_string() })
    };
    Ok(lookup(&assignment.treated)? - lookup(&assignment.control)?)
}

fn summarize(diffs: &[f64]) -> (Option<f64>, Option<f64>, Option<f64>) {
    if diffs.is_empty() {
        return (None, None, None);
    }
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    if diffs.len() < 2 {
        return (Some(mean), None, None);
    }
    let variance = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
    let std_dev = variance.sqrt();
    (Some(mean), Some(std_dev), Some(std_dev / n.sqrt()))
}

/// Mean within-pair difference over the dataset.
pub fn estimate_ate(dataset: &PairDataset, outcomes: &OutcomeTable) -> Result<AteResult> {
    let mut diffs = Vec::with_capacity(dataset.len());
    for assignment in &dataset.assignments {
        diffs.push(estimate_ite(assignment, outcomes)?);
    }
    let (ate, std_dev, stderr) = summarize(&diffs);
    Ok(AteResult {
        treatment: dataset.spec.to_string(),
        n_pairs: dataset.len(),
        ate,
        std_dev,
        stderr,
    })
}

/// Group-mean comparison over individual papers, ignoring the pairing.
///
/// This is the estimator the twin design is meant to replace: it is exposed
/// so the selection bias of unpaired comparisons can be demonstrated next
/// to the paired estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveAteResult {
    pub treatment: String,
    pub n_treated: usize,
    pub n_control: usize,
    pub treated_mean: Option<f64>,
    pub control_mean: Option<f64>,
    /// `None` when either group is empty.
    pub ate: Option<f64>,
    pub stderr: Option<f64>,
    /// Papers matching the predicate but lacking an outcome value.
    pub skipped_no_outcome: u64,
}

/// Difference of group mean outcomes between papers satisfying a predicate
/// treatment and papers not satisfying it, optionally restricted to a set
/// of normalized venue names. Papers where the predicate is inapplicable
/// are excluded.
pub fn naive_observational_ate(
    corpus: &Corpus,
    spec: &TreatmentSpec,
    outcomes: &OutcomeTable,
    venue_filter: Option<&HashSet<String>>,
) -> Result<NaiveAteResult> {
    let mut treated = Vec::new();
    let mut control = Vec::new();
    let mut skipped_no_outcome = 0u64;
    for paper in corpus.papers() {
        if let Some(filter) = venue_filter {
            match paper.venue.as_deref() {
                Some(v) if filter.contains(v) => {}
                _ => continue,
            }
        }
        let Some(is_treated) = predicate(spec, paper, corpus)? else {
            continue;
        };
        let Some(outcome) = outcomes.get(&paper.id) else {
            skipped_no_outcome += 1;
            continue;
        };
        if is_treated {
            treated.push(outcome);
        } else {
            control.push(outcome);
        }
    }

    let (treated_mean, treated_sd, _) = summarize(&treated);
    let (control_mean, control_sd, _) = summarize(&control);
    let ate = match (treated_mean, control_mean) {
        (Some(t), Some(c)) => Some(t - c),
        _ => None,
    };
    let stderr = match (treated_sd, control_sd) {
        (Some(ts), Some(cs)) => {
            Some((ts * ts / treated.len() as f64 + cs * cs / control.len() as f64).sqrt())
        }
        _ => None,
    };
    Ok(NaiveAteResult {
        treatment: spec.to_string(),
        n_treated: treated.len(),
        n_control: control.len(),
        treated_mean,
        control_mean,
        ate,
        stderr,
        skipped_no_outcome,
    })
}

/// One row of the venue comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct VenueAteRow {
    pub treated_venue: String,
    pub control_venue: String,
    pub result: AteResult,
}

/// Estimate the effect of each venue pair with at least `min_pairs`
/// assignable twins. Each unordered venue pair appears once, oriented so
/// the estimate is non-negative (lexicographic order on an exact tie);
/// rows are sorted by pair count descending.
pub fn venue_ate_table(
    twins: &TwinSet,
    corpus: &Corpus,
    outcomes: &OutcomeTable,
    min_pairs: usize,
) -> Result<Vec<VenueAteRow>> {
    if min_pairs == 0 {
        return Err(Error::Validation("min_pairs must be at least 1".into()));
    }

    // Within-pair differences keyed by lexicographic venue pair; the twin
    // list is sorted, so each diff vector is in canonical pair order.
    let mut diffs: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for pair in twins.pairs() {
        let first = corpus.get(pair.first()).ok_or_else(|| Error::MissingPaper {
            id: pair.first().to_string(),
        })?;
        let second = corpus.get(pair.second()).ok_or_else(|| Error::MissingPaper {
            id: pair.second().to_string(),
        })?;
        let (Some(va), Some(vb)) = (first.venue.as_deref(), second.venue.as_deref()) else {
            continue;
        };
        if va == vb {
            continue;
        }
        let lookup = |id: &str| -> Result<f64> {
            outcomes
                .get(id)
                .ok_or_else(|| Error::MissingOutcome { id: id.to_string() })
        };
        let diff_first_minus_second = lookup(&first.id)? - lookup(&second.id)?;
        let (key, diff) = if va < vb {
            ((va.to_string(), vb.to_string()), diff_first_minus_second)
        } else {
            ((vb.to_string(), va.to_string()), -diff_first_minus_second)
        };
        diffs.entry(key).or_default().push(diff);
    }

    let mut rows = Vec::new();
    for ((venue_a, venue_b), diffs) in diffs {
        if diffs.len() < min_pairs {
            continue;
        }
        let (mean, std_dev, stderr) = summarize(&diffs);
        let mean = mean.expect("non-empty diff vector");
        let (treated_venue, control_venue, ate) = if mean < 0.0 {
            (venue_b, venue_a, -mean)
        } else {
            (venue_a, venue_b, mean)
        };
        rows.push(VenueAteRow {
            result: AteResult {
                treatment: format!("venue={treated_venue}::{control_venue}"),
                n_pairs: diffs.len(),
                ate: Some(ate),
                std_dev,
                stderr,
            },
            treated_venue,
            control_venue,
        });
    }
    // Largest datasets first; venue names break ties deterministically.
    rows.sort_by(|a, b| {
        b.result
            .n_pairs
            .cmp(&a.result.n_pairs)
            .then_with(|| a.treated_venue.cmp(&b.treated_venue))
            .then_with(|| a.control_venue.cmp(&b.control_venue))
    });
    Ok(rows)
}

/// Effects of two treatments alone and combined, and whether the combined
/// effect falls short of the sum of the individual ones.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditivityReport {
    pub ate_a: AteResult,
    pub ate_b: AteResult,
    pub ate_combined: AteResult,
    /// `None` when any of the three datasets is empty.
    pub subadditive: Option<bool>,
}

pub fn additivity_report(
    twins: &TwinSet,
    corpus: &Corpus,
    outcomes: &OutcomeTable,
    kind_a: TreatmentKind,
    kind_b: TreatmentKind,
) -> Result<AdditivityReport> {
    let spec_a = TreatmentSpec::Single(kind_a.clone());
    let spec_b = TreatmentSpec::Single(kind_b.clone());
    let spec_combined = TreatmentSpec::combo(vec![kind_a, kind_b])?;

    let ate_a = estimate_ate(&build_pair_dataset(twins, &spec_a, corpus)?, outcomes)?;
    let ate_b = estimate_ate(&build_pair_dataset(twins, &spec_b, corpus)?, outcomes)?;
    let ate_combined = estimate_ate(
        &build_pair_dataset(twins, &spec_combined, corpus)?,
        outcomes,
    )?;

    let subadditive = match (ate_a.ate, ate_b.ate, ate_combined.ate) {
        (Some(a), Some(b), Some(ab)) => Some(ab < a + b),
        _ => None,
    };
    Ok(AdditivityReport {
        ate_a,
        ate_b,
        ate_combined,
        subadditive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_corpus_str, CorpusFormat};
    use crate::outcomes::{compute_outcomes, CitationSource};
    use crate::twin_graph::{detect_twins, TwinPair};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::collections::HashMap;

    fn table(values: &[(&str, f64)]) -> OutcomeTable {
        OutcomeTable::from_values(
            values
                .iter()
                .map(|(id, v)| (id.to_string(), *v))
                .collect::<HashMap<_, _>>(),
            1.0,
            CitationSource::PreferSnapshot,
        )
    }

    fn assignment(treated: &str, control: &str) -> Assignment {
        Assignment {
            treated: treated.to_string(),
            control: control.to_string(),
            pair: TwinPair::new(treated, control).unwrap(),
        }
    }

    fn dataset(assignments: Vec<Assignment>) -> PairDataset {
        PairDataset {
            assignments,
            spec: "colon".parse().unwrap(),
            provenance: "test".into(),
        }
    }

    #[test]
    fn ate_is_the_mean_of_pair_differences() {
        let outcomes = table(&[("a", 2.0), ("b", 1.0), ("c", 1.5), ("d", 2.0)]);
        // Differences +1.0 and -0.5.
        let ds = dataset(vec![assignment("a", "b"), assignment("c", "d")]);
        let result = estimate_ate(&ds, &outcomes).unwrap();
        assert_eq!(result.n_pairs, 2);
        assert_eq!(result.ate, Some(0.25));
    }

    #[test]
    fn ite_examples() {
        let outcomes = table(&[("a", 3.0), ("b", 3.0), ("c", 4.0), ("d", 1.5)]);
        assert_eq!(estimate_ite(&assignment("a", "b"), &outcomes).unwrap(), 0.0);
        assert_eq!(estimate_ite(&assignment("c", "d"), &outcomes).unwrap(), 2.5);
    }

    #[test]
    fn empty_dataset_reports_empty_not_zero() {
        let outcomes = table(&[]);
        let result = estimate_ate(&dataset(vec![]), &outcomes).unwrap();
        assert_eq!(result.n_pairs, 0);
        assert_eq!(result.ate, None);
        assert_eq!(result.std_dev, None);
    }

    #[test]
    fn missing_outcome_is_fatal_with_the_id() {
        let outcomes = table(&[("a", 1.0)]);
        let err = estimate_ate(&dataset(vec![assignment("a", "zz")]), &outcomes).unwrap_err();
        match err {
            Error::MissingOutcome { id } => assert_eq!(id, "zz"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    fn random_dataset(rng: &mut StdRng) -> (PairDataset, OutcomeTable) {
        let n = rng.random_range(1..40);
        let mut values = HashMap::new();
        let mut assignments = Vec::new();
        for i in 0..n {
            let t = format!("t{i:03}");
            let c = format!("c{i:03}");
            values.insert(t.clone(), rng.random_range(0.0..10.0));
            values.insert(c.clone(), rng.random_range(0.0..10.0));
            assignments.push(assignment(&t, &c));
        }
        (
            dataset(assignments),
            OutcomeTable::from_values(values, 1.0, CitationSource::PreferSnapshot),
        )
    }

    #[test]
    fn ate_equals_mean_of_ites() {
        let mut rng = StdRng::seed_from_u64(100);
        for _ in 0..100 {
            let (ds, outcomes) = random_dataset(&mut rng);
            let ate = estimate_ate(&ds, &outcomes).unwrap().ate.unwrap();
            let ites: Vec<f64> = ds
                .assignments
                .iter()
                .map(|a| estimate_ite(a, &outcomes).unwrap())
                .collect();
            let mean = ites.iter().sum::<f64>() / ites.len() as f64;
            assert_eq!(ate, mean);
        }
    }

    #[test]
    fn swapping_roles_negates_the_estimate_exactly() {
        let mut rng = StdRng::seed_from_u64(101);
        for _ in 0..200 {
            let (ds, outcomes) = random_dataset(&mut rng);
            let forward = estimate_ate(&ds, &outcomes).unwrap();
            let swapped = dataset(
                ds.assignments
                    .iter()
                    .map(|a| assignment(&a.control, &a.treated))
                    .collect(),
            );
            let backward = estimate_ate(&swapped, &outcomes).unwrap();
            assert_eq!(forward.ate.unwrap(), -backward.ate.unwrap());
            assert_eq!(forward.std_dev, backward.std_dev);
        }
    }

    #[test]
    fn shifting_every_outcome_leaves_the_estimate_unchanged() {
        let mut rng = StdRng::seed_from_u64(102);
        for _ in 0..200 {
            let (ds, outcomes) = random_dataset(&mut rng);
            let shift = rng.random_range(-100.0..100.0);
            let shifted = OutcomeTable::from_values(
                ds.assignments
                    .iter()
                    .flat_map(|a| [a.treated.clone(), a.control.clone()])
                    .map(|id| {
                        let v = outcomes.get(&id).unwrap();
                        (id, v + shift)
                    })
                    .collect(),
                1.0,
                CitationSource::PreferSnapshot,
            );
            let base = estimate_ate(&ds, &outcomes).unwrap().ate.unwrap();
            let moved = estimate_ate(&ds, &shifted).unwrap().ate.unwrap();
            assert!((base - moved).abs() < 1e-12, "{base} vs {moved}");
        }
    }

    #[test]
    fn partition_means_recombine_to_the_full_estimate() {
        let mut rng = StdRng::seed_from_u64(103);
        for _ in 0..100 {
            let (ds, outcomes) = random_dataset(&mut rng);
            let full = estimate_ate(&ds, &outcomes).unwrap().ate.unwrap();
            let cut = rng.random_range(0..=ds.len());
            let left = dataset(ds.assignments[..cut].to_vec());
            let right = dataset(ds.assignments[cut..].to_vec());
            let mut weighted = 0.0;
            for part in [&left, &right] {
                if let Some(ate) = estimate_ate(part, &outcomes).unwrap().ate {
                    weighted += ate * part.len() as f64;
                }
            }
            assert!((weighted / ds.len() as f64 - full).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_outcome_pairs_give_exactly_zero() {
        let outcomes = table(&[("a", 3.25), ("b", 3.25), ("c", 0.5), ("d", 0.5)]);
        let ds = dataset(vec![assignment("a", "b"), assignment("c", "d")]);
        assert_eq!(estimate_ate(&ds, &outcomes).unwrap().ate, Some(0.0));
    }

    fn fixture_corpus() -> Corpus {
        let lines = [
            // Twin pair with a colon on one side, both in venue v1.
            r#"{"id":"A","title":"catchy: stuff","venue":"V One","n_citation":15,"references":["B"]}"#,
            r#"{"id":"B","title":"plain stuff","venue":"V One","n_citation":7,"references":["A"]}"#,
            // Twin pair across venues, no colons.
            r#"{"id":"C","title":"first work","venue":"V One","n_citation":31,"references":["D"]}"#,
            r#"{"id":"D","title":"second work","venue":"V Two","n_citation":7,"references":["C"]}"#,
            // A singleton with a colon.
            r#"{"id":"E","title":"solo: effort","venue":"V Two","n_citation":3}"#,
        ];
        parse_corpus_str(&lines.join("\n"), CorpusFormat::JsonLines)
            .unwrap()
            .corpus
    }

    #[test]
    fn build_dataset_keeps_only_assignable_pairs() {
        let corpus = fixture_corpus();
        let twins = detect_twins(&corpus);
        assert_eq!(twins.len(), 2);
        let spec: TreatmentSpec = "colon".parse().unwrap();
        let ds = build_pair_dataset(&twins, &spec, &corpus).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.assignments[0].treated, "A");
        assert_eq!(ds.provenance, twins.fingerprint());

        let outcomes = compute_outcomes(&corpus, 1.0, CitationSource::SnapshotOnly).unwrap();
        let result = estimate_ate(&ds, &outcomes).unwrap();
        // log2(16) - log2(8) = 1.
        assert_eq!(result.ate, Some(1.0));
        assert_eq!(result.treatment, "colon");
    }

    #[test]
    fn unsatisfiable_spec_gives_empty_dataset() {
        let corpus = fixture_corpus();
        let twins = detect_twins(&corpus);
        let spec: TreatmentSpec = "keyword=quantum".parse().unwrap();
        let ds = build_pair_dataset(&twins, &spec, &corpus).unwrap();
        assert!(ds.is_empty());
    }

    #[test]
    fn naive_estimate_compares_group_means() {
        let corpus = fixture_corpus();
        let outcomes = compute_outcomes(&corpus, 1.0, CitationSource::SnapshotOnly).unwrap();
        let spec: TreatmentSpec = "colon".parse().unwrap();
        let naive = naive_observational_ate(&corpus, &spec, &outcomes, None).unwrap();
        assert_eq!(naive.n_treated, 2);
        assert_eq!(naive.n_control, 3);
        // Treated: A (log2 16), E (log2 4). Control: B (log2 8), C (log2 32), D (log2 8).
        let treated_mean = (4.0 + 2.0) / 2.0;
        let control_mean = (3.0 + 5.0 + 3.0) / 3.0;
        assert!((naive.ate.unwrap() - (treated_mean - control_mean)).abs() < 1e-12);
    }

    #[test]
    fn naive_respects_the_venue_filter() {
        let corpus = fixture_corpus();
        let outcomes = compute_outcomes(&corpus, 1.0, CitationSource::SnapshotOnly).unwrap();
        let spec: TreatmentSpec = "colon".parse().unwrap();
        let filter: HashSet<String> = ["v two".to_string()].into_iter().collect();
        let naive = naive_observational_ate(&corpus, &spec, &outcomes, Some(&filter)).unwrap();
        assert_eq!(naive.n_treated, 1);
        assert_eq!(naive.n_control, 1);
        // E (log2 4) vs D (log2 8).
        assert_eq!(naive.ate, Some(-1.0));
    }

    #[test]
    fn naive_with_empty_group_reports_empty() {
        let corpus = fixture_corpus();
        let outcomes = compute_outcomes(&corpus, 1.0, CitationSource::SnapshotOnly).unwrap();
        let spec: TreatmentSpec = "keyword=quantum".parse().unwrap();
        let naive = naive_observational_ate(&corpus, &spec, &outcomes, None).unwrap();
        assert_eq!(naive.n_treated, 0);
        assert_eq!(naive.ate, None);
    }

    #[test]
    fn venue_table_orients_rows_non_negative() {
        let corpus = fixture_corpus();
        let twins = detect_twins(&corpus);
        let outcomes = compute_outcomes(&corpus, 1.0, CitationSource::SnapshotOnly).unwrap();
        let rows = venue_ate_table(&twins, &corpus, &outcomes, 1).unwrap();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        // C (v one, log2 32) beats D (v two, log2 8) by 2.
        assert_eq!(row.treated_venue, "v one");
        assert_eq!(row.control_venue, "v two");
        assert_eq!(row.result.ate, Some(2.0));
        assert_eq!(row.result.n_pairs, 1);
        assert_eq!(row.result.treatment, "venue=v one::v two");
    }

    #[test]
    fn venue_table_on_single_venue_corpus_is_empty() {
        let lines = [
            r#"{"id":"A","title":"t","venue":"only","n_citation":3,"references":["B"]}"#,
            r#"{"id":"B","title":"t","venue":"only","n_citation":9,"references":["A"]}"#,
        ];
        let corpus = parse_corpus_str(&lines.join("\n"), CorpusFormat::JsonLines)
            .unwrap()
            .corpus;
        let twins = detect_twins(&corpus);
        let outcomes = compute_outcomes(&corpus, 1.0, CitationSource::SnapshotOnly).unwrap();
        assert!(venue_ate_table(&twins, &corpus, &outcomes, 1)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn venue_orientation_negates_under_swap() {
        // Recomputing a row's estimate with venues swapped must negate it.
        let corpus = fixture_corpus();
        let twins = detect_twins(&corpus);
        let outcomes = compute_outcomes(&corpus, 1.0, CitationSource::SnapshotOnly).unwrap();
        for row in venue_ate_table(&twins, &corpus, &outcomes, 1).unwrap() {
            let forward =
                TreatmentSpec::venue_pair(&row.treated_venue, &row.control_venue).unwrap();
            let backward =
                TreatmentSpec::venue_pair(&row.control_venue, &row.treated_venue).unwrap();
            let f = estimate_ate(
                &build_pair_dataset(&twins, &forward, &corpus).unwrap(),
                &outcomes,
            )
            .unwrap();
            let b = estimate_ate(
                &build_pair_dataset(&twins, &backward, &corpus).unwrap(),
                &outcomes,
            )
            .unwrap();
            assert_eq!(f.ate.unwrap(), -b.ate.unwrap());
            assert_eq!(f.ate, row.result.ate);
            assert!(row.result.ate.unwrap() >= 0.0);
        }
    }

    #[test]
    fn additivity_report_composes_three_datasets() {
        let lines = [
            // Pair 1: A wins on colon and keyword.
            r#"{"id":"A","title":"deep: learning models","n_citation":31,"references":["B"]}"#,
            r#"{"id":"B","title":"shallow models","n_citation":7,"references":["A"]}"#,
            // Pair 2: C wins on colon only; keyword ties (neither has it).
            r#"{"id":"C","title":"fast: solvers","n_citation":15,"references":["D"]}"#,
            r#"{"id":"D","title":"slow solvers","n_citation":7,"references":["C"]}"#,
        ];
        let corpus = parse_corpus_str(&lines.join("\n"), CorpusFormat::JsonLines)
            .unwrap()
            .corpus;
        let twins = detect_twins(&corpus);
        let outcomes = compute_outcomes(&corpus, 1.0, CitationSource::SnapshotOnly).unwrap();
        let report = additivity_report(
            &twins,
            &corpus,
            &outcomes,
            TreatmentKind::ColonInTitle,
            TreatmentKind::KeywordInTitle("learning".into()),
        )
        .unwrap();
        assert_eq!(report.ate_a.n_pairs, 2);
        assert_eq!(report.ate_b.n_pairs, 1);
        assert_eq!(report.ate_combined.n_pairs, 1);
        // Singles: colon (2+1)/2 = 1.5, keyword 2. Combined pair AB: 2.
        assert_eq!(report.ate_a.ate, Some(1.5));
        assert_eq!(report.ate_b.ate, Some(2.0));
        assert_eq!(report.ate_combined.ate, Some(2.0));
        assert_eq!(report.subadditive, Some(true));
    }

    #[test]
    fn additivity_with_empty_combo_is_partial() {
        let corpus = fixture_corpus();
        let twins = detect_twins(&corpus);
        let outcomes = compute_outcomes(&corpus, 1.0, CitationSource::SnapshotOnly).unwrap();
        let report = additivity_report(
            &twins,
            &corpus,
            &outcomes,
            TreatmentKind::ColonInTitle,
            TreatmentKind::KeywordInTitle("quantum".into()),
        )
        .unwrap();
        assert_eq!(report.ate_combined.ate, None);
        assert_eq!(report.subadditive, None);
    }
}
