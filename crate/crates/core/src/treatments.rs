//! Binary treatments over papers and twin pairs.
//!
//! A treatment is either a *predicate* (a single paper satisfies it or not:
//! colon in the title, a keyword in the title, being self-cited, venue
//! membership) or a *comparison* (only meaningful within a pair: shorter
//! title, more references, longer abstract, longer paper, earlier year).
//!
//! [`assign_pair`] turns a twin pair into an ordered (treated, control)
//! assignment: predicates require exactly one member to satisfy them,
//! comparisons require a strict inequality on the measured quantity. Ties,
//! missing fields and concordant pairs are discarded rather than guessed.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::tokenize;
use crate::error::{Error, Result};
use crate::ingest::{normalize_venue, AuthorKey, Corpus, PaperRecord};
use crate::twin_graph::TwinPair;

/// One treatment from the catalog.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TreatmentKind {
    /// Title contains a literal `:` anywhere.
    ColonInTitle,
    /// Title contains the keyword as a whole token, case-insensitively.
    KeywordInTitle(String),
    /// Treated member has strictly fewer title tokens.
    TitleShorter,
    /// Treated member has strictly more references.
    ReferenceLonger,
    /// Treated member has a strictly longer abstract (in tokens).
    AbstractLonger,
    /// Treated member spans strictly more pages.
    PaperLonger,
    /// Paper is cited by some paper sharing at least one author.
    SelfCited,
    /// Treated member was published strictly earlier.
    PublishedEarlier,
}

impl TreatmentKind {
    /// Predicates can be evaluated on a single paper; comparisons cannot.
    pub fn is_predicate(&self) -> bool {
        matches!(
            self,
            TreatmentKind::ColonInTitle
                | TreatmentKind::KeywordInTitle(_)
                | TreatmentKind::SelfCited
        )
    }

    /// The quantity compared by a comparative kind, and whether the treated
    /// side is the smaller one.
    fn comparison(&self) -> Option<(MeasureKind, bool)> {
        match self {
            TreatmentKind::TitleShorter => Some((MeasureKind::TitleTokens, true)),
            TreatmentKind::ReferenceLonger => Some((MeasureKind::ReferenceCount, false)),
            TreatmentKind::AbstractLonger => Some((MeasureKind::AbstractTokens, false)),
            TreatmentKind::PaperLonger => Some((MeasureKind::PageCount, false)),
            TreatmentKind::PublishedEarlier => Some((MeasureKind::Year, true)),
            _ => None,
        }
    }
}

impl fmt::Display for TreatmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreatmentKind::ColonInTitle => write!(f, "colon"),
            TreatmentKind::KeywordInTitle(w) => write!(f, "keyword={w}"),
            TreatmentKind::TitleShorter => write!(f, "short-title"),
            TreatmentKind::ReferenceLonger => write!(f, "long-refs"),
            TreatmentKind::AbstractLonger => write!(f, "long-abstract"),
            TreatmentKind::PaperLonger => write!(f, "long-paper"),
            TreatmentKind::SelfCited => write!(f, "self-cite"),
            TreatmentKind::PublishedEarlier => write!(f, "priority"),
        }
    }
}

impl FromStr for TreatmentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(word) = s.strip_prefix("keyword=") {
            let word = word.trim().to_lowercase();
            if word.is_empty() || word.split_whitespace().count() != 1 {
                return Err(Error::Usage(format!(
                    "keyword treatment needs a single word, got {word:?}"
                )));
            }
            return Ok(TreatmentKind::KeywordInTitle(word));
        }
        match s {
            "colon" => Ok(TreatmentKind::ColonInTitle),
            "short-title" => Ok(TreatmentKind::TitleShorter),
            "long-refs" => Ok(TreatmentKind::ReferenceLonger),
            "long-abstract" => Ok(TreatmentKind::AbstractLonger),
            "long-paper" => Ok(TreatmentKind::PaperLonger),
            "self-cite" => Ok(TreatmentKind::SelfCited),
            "priority" => Ok(TreatmentKind::PublishedEarlier),
            other => Err(Error::Usage(format!("unknown treatment {other:?}"))),
        }
    }
}

/// A complete treatment specification as named on the command line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TreatmentSpec {
    Single(TreatmentKind),
    /// One member published in `treated`, the other in `control`
    /// (normalized venue strings, distinct).
    VenuePair { treated: String, control: String },
    /// Treated member must win every member treatment, control must lose
    /// every one of them.
    Combo(Vec<TreatmentKind>),
}

impl TreatmentSpec {
    pub fn venue_pair(a: &str, b: &str) -> Result<TreatmentSpec> {
        let treated = normalize_venue(a);
        let control = normalize_venue(b);
        if treated.is_empty() || control.is_empty() {
            return Err(Error::Usage("venue names must be non-empty".into()));
        }
        if treated == control {
            return Err(Error::Usage(format!(
                "venue pair needs two distinct venues, got {treated:?} twice"
            )));
        }
        Ok(TreatmentSpec::VenuePair { treated, control })
    }

    pub fn combo(members: Vec<TreatmentKind>) -> Result<TreatmentSpec> {
        if members.len() < 2 {
            return Err(Error::Usage("combo needs at least two treatments".into()));
        }
        let distinct: HashSet<&TreatmentKind> = members.iter().collect();
        if distinct.len() != members.len() {
            return Err(Error::Usage("combo members must be distinct".into()));
        }
        Ok(TreatmentSpec::Combo(members))
    }
}

impl fmt::Display for TreatmentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreatmentSpec::Single(kind) => write!(f, "{kind}"),
            TreatmentSpec::VenuePair { treated, control } => {
                write!(f, "venue={treated}::{control}")
            }
            TreatmentSpec::Combo(members) => {
                write!(f, "combo=")?;
                for (i, member) in members.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{member}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for TreatmentSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("venue=") {
            let (a, b) = rest.split_once("::").ok_or_else(|| {
                Error::Usage(format!("venue treatment must be venue=<a>::<b>, got {s:?}"))
            })?;
            return TreatmentSpec::venue_pair(a, b);
        }
        if let Some(rest) = s.strip_prefix("combo=") {
            let members = rest
                .split('+')
                .map(TreatmentKind::from_str)
                .collect::<Result<Vec<_>>>()?;
            return TreatmentSpec::combo(members);
        }
        Ok(TreatmentSpec::Single(s.parse()?))
    }
}

/// Quantities measured on a single paper.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    TitleTokens,
    ReferenceCount,
    AbstractTokens,
    PageCount,
    Year,
}

/// Measure one quantity; `None` when the underlying field is absent.
/// Token counts split on unicode whitespace and count nonempty runs.
pub fn measure(kind: MeasureKind, paper: &PaperRecord) -> Option<u64> {
    match kind {
        MeasureKind::TitleTokens => Some(paper.title.split_whitespace().count() as u64),
        MeasureKind::ReferenceCount => Some(paper.references.len() as u64),
        MeasureKind::AbstractTokens => paper
            .abstract_text
            .as_deref()
            .map(|a| a.split_whitespace().count() as u64),
        MeasureKind::PageCount => paper.page_count().map(|c| c as u64),
        MeasureKind::Year => paper.year.map(|y| y as u64),
    }
}

fn title_has_keyword(title: &str, keyword: &str) -> bool {
    tokenize(title).iter().any(|t| t == keyword)
}

fn is_self_cited(paper: &PaperRecord, corpus: &Corpus) -> bool {
    let own_keys: HashSet<AuthorKey> = paper.author_keys().collect();
    if own_keys.is_empty() {
        return false;
    }
    corpus
        .citing_papers(&paper.id)
        .any(|citer| citer.author_keys().any(|k| own_keys.contains(&k)))
}

fn predicate_kind(kind: &TreatmentKind, paper: &PaperRecord, corpus: &Corpus) -> Option<bool> {
    match kind {
        TreatmentKind::ColonInTitle => Some(paper.title.contains(':')),
        TreatmentKind::KeywordInTitle(word) => Some(title_has_keyword(&paper.title, word)),
        TreatmentKind::SelfCited => Some(is_self_cited(paper, corpus)),
        _ => unreachable!("comparative kinds are rejected before this point"),
    }
}

/// Evaluate a predicate treatment on one paper. `Ok(None)` means the paper
/// lacks a field the predicate needs (e.g. no venue for a venue pair).
/// Comparative treatments cannot be evaluated on a single paper and return
/// a usage error.
pub fn predicate(
    spec: &TreatmentSpec,
    paper: &PaperRecord,
    corpus: &Corpus,
) -> Result<Option<bool>> {
    match spec {
        TreatmentSpec::Single(kind) => {
            if !kind.is_predicate() {
                return Err(Error::Usage(format!(
                    "treatment {kind} compares the two members of a pair and has no single-paper predicate"
                )));
            }
            Ok(predicate_kind(kind, paper, corpus))
        }
        TreatmentSpec::VenuePair { treated, control } => Ok(match paper.venue.as_deref() {
            Some(v) if v == treated => Some(true),
            Some(v) if v == control => Some(false),
            _ => None,
        }),
        TreatmentSpec::Combo(members) => {
            let mut all_true = true;
            let mut all_false = true;
            for member in members {
                if !member.is_predicate() {
                    return Err(Error::Usage(format!(
                        "combo member {member} has no single-paper predicate"
                    )));
                }
                match predicate_kind(member, paper, corpus) {
                    Some(true) => all_false = false,
                    Some(false) => all_true = false,
                    None => return Ok(None),
                }
            }
            Ok(match (all_true, all_false) {
                (true, false) => Some(true),
                (false, true) => Some(false),
                // Mixed member values leave the paper in neither group.
                _ => None,
            })
        }
    }
}

/// An ordered (treated, control) reading of one twin pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub treated: String,
    pub control: String,
    pub pair: TwinPair,
}

/// `Some(true)` when the pair's first member is treated under this member
/// treatment, `Some(false)` when the second is, `None` when the member
/// cannot orient the pair (tie, missing field, both or neither satisfy).
fn member_orientation(
    kind: &TreatmentKind,
    first: &PaperRecord,
    second: &PaperRecord,
    corpus: &Corpus,
) -> Option<bool> {
    if kind.is_predicate() {
        let a = predicate_kind(kind, first, corpus)?;
        let b = predicate_kind(kind, second, corpus)?;
        return match (a, b) {
            (true, false) => Some(true),
            (false, true) => Some(false),
            _ => None,
        };
    }
    let (measure_kind, treated_is_smaller) = kind.comparison().expect("comparative kind");
    let a = measure(measure_kind, first)?;
    let b = measure(measure_kind, second)?;
    if a == b {
        return None;
    }
    Some((a < b) == treated_is_smaller)
}

/// Assign treated/control roles within a twin pair, or discard it
/// (`Ok(None)`) when the treatment cannot orient the pair. The result never
/// depends on which member happens to be stored first.
pub fn assign_pair(
    spec: &TreatmentSpec,
    pair: &TwinPair,
    corpus: &Corpus,
) -> Result<Option<Assignment>> {
    let first = corpus.get(pair.first()).ok_or_else(|| Error::MissingPaper {
        id: pair.first().to_string(),
    })?;
    let second = corpus.get(pair.second()).ok_or_else(|| Error::MissingPaper {
        id: pair.second().to_string(),
    })?;

    let first_treated = match spec {
        TreatmentSpec::Single(kind) => member_orientation(kind, first, second, corpus),
        TreatmentSpec::VenuePair { treated, control } => {
            match (first.venue.as_deref(), second.venue.as_deref()) {
                (Some(a), Some(b)) if a == treated && b == control => Some(true),
                (Some(a), Some(b)) if a == control && b == treated => Some(false),
                _ => None,
            }
        }
        TreatmentSpec::Combo(members) => {
            let mut agreed: Option<bool> = None;
            for member in members {
                match (agreed, member_orientation(member, first, second, corpus)) {
                    (_, None) => return Ok(None),
                    (None, Some(v)) => agreed = Some(v),
                    (Some(prev), Some(v)) if prev != v => return Ok(None),
                    _ => {}
                }
            }
            agreed
        }
    };

    Ok(first_treated.map(|first_treated| {
        let (treated, control) = if first_treated {
            (pair.first(), pair.second())
        } else {
            (pair.second(), pair.first())
        };
        Assignment {
            treated: treated.to_string(),
            control: control.to_string(),
            pair: pair.clone(),
        }
    }))
}
