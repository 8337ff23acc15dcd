//! Corpus generator with known potential outcomes.
//!
//! The generator plants twin pairs (mutual citations between same-community,
//! same-venue, adjacent-year papers), assigns each paper binary treatments,
//! and realizes citation counts from a log2 outcome model:
//!
//! ```text
//! y = base + venue_effect + noise + sum(effect_k * treated_k)
//! citations = max(0, round(2^y) - smoothing)
//! ```
//!
//! Treatments are planted through real record fields (a colon in the title,
//! extra references, ...), so the ordinary pipeline detects them with no
//! side channel. Confounding is tunable: with strength `rho`, a paper
//! adopts each treatment with probability `rho * venue_custom + (1 - rho) / 2`,
//! so venues can drive both treatment and outcome.
//!
//! Citation counts are integers, which quantizes the planted outcomes. The
//! ground-truth ledger therefore stores *quantized* potential outcomes: the
//! estimator is judged against what the outcome model can actually express,
//! not blamed for rounding.
//!
//! Background citations always point at earlier papers, so the planted
//! mutual edges are provably the only twins in the corpus. A small pool of
//! early papers exists to absorb those background references.

use std::collections::HashMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::PairDataset;
use crate::ingest::{normalize_venue, AuthorRef, Corpus, PaperRecord};
use crate::treatments::{TreatmentKind, TreatmentSpec};

/// One venue and its role in the outcome and confounding models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VenueSpec {
    pub name: String,
    /// Additive outcome effect of publishing here, log2 units.
    #[serde(default)]
    pub effect: f64,
    /// Probability that a paper here adopts a treatment when confounding is
    /// fully on (`rho = 1`).
    #[serde(default = "default_custom")]
    pub custom: f64,
}

fn default_custom() -> f64 {
    0.5
}

/// A treatment the generator plants, with its true effect in log2 units.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedTreatment {
    pub kind: TreatmentKind,
    pub effect: f64,
}

impl Serialize for PlantedTreatment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("PlantedTreatment", 2)?;
        s.serialize_field("kind", &self.kind.to_string())?;
        s.serialize_field("effect", &self.effect)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for PlantedTreatment {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            kind: String,
            #[serde(default)]
            effect: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        let kind: TreatmentKind = raw
            .kind
            .parse()
            .map_err(|e| serde::de::Error::custom(format!("{e}")))?;
        Ok(PlantedTreatment {
            kind,
            effect: raw.effect,
        })
    }
}

/// Generator configuration. Every field has a default, so a TOML config
/// only names what it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_papers: usize,
    /// Fraction of papers that belong to a twin pair.
    pub twin_fraction: f64,
    pub venues: Vec<VenueSpec>,
    pub treatments: Vec<PlantedTreatment>,
    /// Confounding strength `rho` in [0, 1].
    pub confounding: f64,
    /// Standard deviation of per-paper outcome noise, log2 units.
    pub outcome_noise: f64,
    /// Baseline log2 citation level.
    pub base_log_citations: f64,
    /// Smoothing the downstream outcome computation will use. Integral.
    pub smoothing: f64,
    pub year_range: (i32, i32),
    /// Distribution of |year(a) - year(b)| across twin pairs; index = gap.
    pub year_gap_probs: Vec<f64>,
    /// Probability that a twin pair spans two different venues.
    pub cross_venue_twin_prob: f64,
    pub authors_per_community: usize,
    pub authors_per_paper: (usize, usize),
    /// Share of authors carrying an explicit author id.
    pub author_id_coverage: f64,
    /// Range of background reference counts per paper.
    pub background_refs: (usize, usize),
    /// Extra references a reference-treated paper gains.
    pub ref_bump: usize,
    pub title_tokens: (usize, usize),
    pub title_bump: usize,
    pub abstract_vocab: usize,
    /// Vocabulary repetitions per abstract; 0 disables abstracts.
    pub abstract_repeats: usize,
    pub abstract_bump_repeats: usize,
    pub pages: (usize, usize),
    pub page_bump: usize,
    /// Probability a paper recruits one coauthor from another community.
    pub bridge_prob: f64,
    /// Early reference-sink papers, so every later paper can reach its
    /// exact background reference count.
    pub ref_pool: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_papers: 2000,
            twin_fraction: 0.5,
            venues: vec![
                VenueSpec {
                    name: "venue alpha".into(),
                    effect: 0.0,
                    custom: 1.0,
                },
                VenueSpec {
                    name: "venue beta".into(),
                    effect: 0.0,
                    custom: 0.0,
                },
            ],
            treatments: vec![PlantedTreatment {
                kind: TreatmentKind::ColonInTitle,
                effect: 0.5,
            }],
            confounding: 0.0,
            outcome_noise: 0.3,
            base_log_citations: 5.0,
            smoothing: 1.0,
            year_range: (1995, 2015),
            year_gap_probs: vec![0.55, 0.30, 0.10, 0.05],
            cross_venue_twin_prob: 0.0,
            authors_per_community: 60,
            authors_per_paper: (1, 3),
            author_id_coverage: 0.9,
            background_refs: (2, 6),
            ref_bump: 3,
            title_tokens: (4, 9),
            title_bump: 2,
            abstract_vocab: 30,
            abstract_repeats: 2,
            abstract_bump_repeats: 1,
            pages: (4, 14),
            page_bump: 6,
            bridge_prob: 0.05,
            ref_pool: 16,
            seed: 0,
        }
    }
}

fn check_prob(value: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Validation(format!(
            "{what} must be in [0, 1], got {value}"
        )));
    }
    Ok(())
}

impl SynthConfig {
    /// Number of twin pairs this configuration plants.
    pub fn n_twin_pairs(&self) -> usize {
        (self.n_papers as f64 * self.twin_fraction / 2.0).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_papers < 2 {
            return Err(Error::Validation("n_papers must be at least 2".into()));
        }
        check_prob(self.twin_fraction, "twin_fraction")?;
        check_prob(self.confounding, "confounding")?;
        check_prob(self.cross_venue_twin_prob, "cross_venue_twin_prob")?;
        check_prob(self.author_id_coverage, "author_id_coverage")?;
        check_prob(self.bridge_prob, "bridge_prob")?;
        if self.venues.is_empty() {
            return Err(Error::Validation("at least one venue is required".into()));
        }
        let mut names = std::collections::HashSet::new();
        for venue in &self.venues {
            check_prob(venue.custom, format!("custom of venue {:?}", venue.name).as_str())?;
            let normalized = normalize_venue(&venue.name);
            if normalized.is_empty() {
                return Err(Error::Validation(format!(
                    "venue name {:?} normalizes to an empty string",
                    venue.name
                )));
            }
            if !names.insert(normalized) {
                return Err(Error::Validation(format!(
                    "duplicate venue name {:?}",
                    venue.name
                )));
            }
        }
        if !(self.outcome_noise >= 0.0) || !self.outcome_noise.is_finite() {
            return Err(Error::Validation("outcome_noise must be non-negative".into()));
        }
        if self.smoothing < 0.0 || self.smoothing.fract() != 0.0 {
            return Err(Error::Validation(
                "smoothing must be a non-negative integer value".into(),
            ));
        }
        let twin_members = 2 * self.n_twin_pairs();
        if self.ref_pool + twin_members > self.n_papers {
            return Err(Error::Validation(format!(
                "infeasible layout: {} twin members plus {} pool papers exceed n_papers {}",
                twin_members, self.ref_pool, self.n_papers
            )));
        }
        if self.year_range.0 <= 0 || self.year_range.0 > self.year_range.1 {
            return Err(Error::Validation(format!(
                "invalid year_range {:?}",
                self.year_range
            )));
        }
        if self.year_gap_probs.is_empty()
            || self.year_gap_probs.iter().any(|p| *p < 0.0 || !p.is_finite())
            || self.year_gap_probs.iter().sum::<f64>() <= 0.0
        {
            return Err(Error::Validation(
                "year_gap_probs must be non-empty, non-negative and sum to a positive value"
                    .into(),
            ));
        }
        if self.authors_per_paper.0 < 1
            || self.authors_per_paper.0 > self.authors_per_paper.1
            || self.authors_per_paper.1 > self.authors_per_community
        {
            return Err(Error::Validation(format!(
                "authors_per_paper {:?} incompatible with authors_per_community {}",
                self.authors_per_paper, self.authors_per_community
            )));
        }
        if self.background_refs.0 < 1 || self.background_refs.0 > self.background_refs.1 {
            return Err(Error::Validation(format!(
                "invalid background_refs range {:?}",
                self.background_refs
            )));
        }
        if self.ref_pool < self.background_refs.1 + self.ref_bump + 1 {
            return Err(Error::Validation(format!(
                "ref_pool {} too small for up to {} references per paper",
                self.ref_pool,
                self.background_refs.1 + self.ref_bump
            )));
        }
        if self.title_tokens.0 < self.title_bump + 2 || self.title_tokens.0 > self.title_tokens.1 {
            return Err(Error::Validation(format!(
                "title_tokens {:?} must start at title_bump + 2 or higher",
                self.title_tokens
            )));
        }
        if self.abstract_repeats > 0 && self.abstract_vocab == 0 {
            return Err(Error::Validation(
                "abstract_vocab must be positive when abstracts are enabled".into(),
            ));
        }
        if self.pages.0 < 1 || self.pages.0 > self.pages.1 {
            return Err(Error::Validation(format!("invalid pages range {:?}", self.pages)));
        }
        let mut kinds = std::collections::HashSet::new();
        for planted in &self.treatments {
            if !planted.effect.is_finite() {
                return Err(Error::Validation("treatment effects must be finite".into()));
            }
            match &planted.kind {
                TreatmentKind::SelfCited | TreatmentKind::PublishedEarlier => {
                    return Err(Error::Validation(format!(
                        "the generator cannot plant treatment {}",
                        planted.kind
                    )));
                }
                kind => {
                    if !kinds.insert(kind.clone()) {
                        return Err(Error::Validation(format!(
                            "treatment {kind} planted twice"
                        )));
                    }
                }
            }
        }
        let worst_case = self.base_log_citations.abs()
            + self.venues.iter().map(|v| v.effect.abs()).fold(0.0, f64::max)
            + self.treatments.iter().map(|t| t.effect.abs()).sum::<f64>()
            + 12.0 * self.outcome_noise;
        if worst_case > 40.0 {
            return Err(Error::Validation(format!(
                "outcome magnitudes up to 2^{worst_case:.1} would overflow citation counts"
            )));
        }
        Ok(())
    }
}

/// Ground truth for one generated paper.
#[derive(Debug, Clone, PartialEq)]
pub struct PaperTruth {
    pub id: String,
    /// Continuous untreated outcome: base + venue effect + noise.
    pub base_outcome: f64,
    /// Realized treatment indicators, one per planted treatment.
    pub treated: Vec<bool>,
    /// Realized (quantized) citation count.
    pub citations: u64,
}

/// Ground-truth ledger for a generated corpus: per-paper potential outcomes
/// under each planted treatment, with everything else held at its realized
/// value.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTruth {
    smoothing: f64,
    planted: Vec<PlantedTreatment>,
    papers: Vec<PaperTruth>,
    index: HashMap<String, usize>,
}

/// Integer citation count realizing a continuous log2 outcome.
pub fn quantize_citations(y: f64, smoothing: f64) -> u64 {
    let raw = y.exp2().round() - smoothing;
    if raw <= 0.0 {
        0
    } else {
        raw as u64
    }
}

/// The outcome value the pipeline will compute from a quantized count.
pub fn quantized_outcome(y: f64, smoothing: f64) -> f64 {
    (quantize_citations(y, smoothing) as f64 + smoothing).log2()
}

impl SyntheticTruth {
    pub fn new(
        smoothing: f64,
        planted: Vec<PlantedTreatment>,
        papers: Vec<PaperTruth>,
    ) -> SyntheticTruth {
        let index = papers
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.clone(), i))
            .collect();
        SyntheticTruth {
            smoothing,
            planted,
            papers,
            index,
        }
    }

    pub fn planted(&self) -> &[PlantedTreatment] {
        &self.planted
    }

    pub fn papers(&self) -> &[PaperTruth] {
        &self.papers
    }

    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    pub fn get(&self, id: &str) -> Option<&PaperTruth> {
        self.index.get(id).map(|&i| &self.papers[i])
    }

    fn planted_index(&self, kind: &TreatmentKind) -> Result<usize> {
        self.planted
            .iter()
            .position(|p| &p.kind == kind)
            .ok_or_else(|| Error::Usage(format!("treatment {kind} was not planted")))
    }

    /// Quantized potential outcome for one paper with the given treatments
    /// forced to `arm` and every other planted treatment at its realized
    /// value.
    pub fn potential_outcome(&self, paper: &PaperTruth, kinds: &[usize], arm: bool) -> f64 {
        let mut y = paper.base_outcome;
        for (k, planted) in self.planted.iter().enumerate() {
            let treated = if kinds.contains(&k) {
                arm
            } else {
                paper.treated[k]
            };
            if treated {
                y += planted.effect;
            }
        }
        quantized_outcome(y, self.smoothing)
    }

    /// The estimand for a pair dataset: the mean quantized treatment effect
    /// over every paper appearing in the dataset, treated and control alike.
    pub fn truth_ate(&self, dataset: &PairDataset) -> Result<f64> {
        let kinds: Vec<usize> = match &dataset.spec {
            TreatmentSpec::Single(kind) => vec![self.planted_index(kind)?],
            TreatmentSpec::Combo(members) => members
                .iter()
                .map(|k| self.planted_index(k))
                .collect::<Result<_>>()?,
            TreatmentSpec::VenuePair { .. } => {
                return Err(Error::Usage(
                    "venue effects are planted as venue effects, not as a potential-outcome pair"
                        .into(),
                ))
            }
        };
        if dataset.is_empty() {
            return Err(Error::Validation(
                "truth ATE of an empty dataset is undefined".into(),
            ));
        }
        let mut total = 0.0;
        let mut count = 0usize;
        for assignment in &dataset.assignments {
            for id in [&assignment.treated, &assignment.control] {
                let paper = self
                    .get(id)
                    .ok_or_else(|| Error::MissingPaper { id: id.clone() })?;
                total += self.potential_outcome(paper, &kinds, true)
                    - self.potential_outcome(paper, &kinds, false);
                count += 1;
            }
        }
        Ok(total / count as f64)
    }

    /// Write the ledger: `id treated y1 y0 citations`, where the columns
    /// describe the first planted treatment.
    pub fn write_tsv<W: Write>(&self, writer: &mut W) -> Result<()> {
        let io_err = |e: std::io::Error| Error::Format(format!("write failed: {e}"));
        writeln!(writer, "id\ttreated\ty1\ty0\tcitations").map_err(io_err)?;
        for paper in &self.papers {
            let (treated, y1, y0) = if self.planted.is_empty() {
                let y = quantized_outcome(paper.base_outcome, self.smoothing);
                (false, y, y)
            } else {
                (
                    paper.treated[0],
                    self.potential_outcome(paper, &[0], true),
                    self.potential_outcome(paper, &[0], false),
                )
            };
            writeln!(
                writer,
                "{}\t{}\t{}\t{}\t{}",
                paper.id, treated as u8, y1, y0, paper.citations
            )
            .map_err(io_err)?;
        }
        Ok(())
    }
}

struct Generator<'a> {
    config: &'a SynthConfig,
    rng: ChaCha8Rng,
    noise: Option<Normal<f64>>,
    /// One vocabulary per venue; venues double as communities.
    vocab: Vec<Vec<String>>,
    id_width: usize,
    records: Vec<PaperRecord>,
    truths: Vec<PaperTruth>,
}

impl<'a> Generator<'a> {
    fn new(config: &'a SynthConfig) -> Result<Generator<'a>> {
        let noise = if config.outcome_noise > 0.0 {
            Some(
                Normal::new(0.0, config.outcome_noise)
                    .map_err(|e| Error::Validation(format!("bad outcome noise: {e}")))?,
            )
        } else {
            None
        };
        let vocab = (0..config.venues.len())
            .map(|c| {
                (0..config.abstract_vocab.max(config.title_tokens.1))
                    .map(|j| format!("w{c}x{j}"))
                    .collect()
            })
            .collect();
        Ok(Generator {
            config,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            noise,
            vocab,
            id_width: config.n_papers.to_string().len(),
            records: Vec::with_capacity(config.n_papers),
            truths: Vec::with_capacity(config.n_papers),
        })
    }

    fn paper_id(&self, index: usize) -> String {
        format!("p{index:0width$}", width = self.id_width)
    }

    fn draw_range(&mut self, range: (usize, usize)) -> usize {
        self.rng.random_range(range.0..=range.1)
    }

    fn draw_year_gap(&mut self) -> i32 {
        let total: f64 = self.config.year_gap_probs.iter().sum();
        let mut u = self.rng.random::<f64>() * total;
        for (gap, p) in self.config.year_gap_probs.iter().enumerate() {
            u -= p;
            if u <= 0.0 {
                return gap as i32;
            }
        }
        (self.config.year_gap_probs.len() - 1) as i32
    }

    fn draw_treatments(&mut self, venue: usize) -> Vec<bool> {
        let custom = self.config.venues[venue].custom;
        let p = self.config.confounding * custom + (1.0 - self.config.confounding) * 0.5;
        (0..self.config.treatments.len())
            .map(|_| self.rng.random_bool(p))
            .collect()
    }

    fn planted_flag(&self, treated: &[bool], want: fn(&TreatmentKind) -> bool) -> bool {
        self.config
            .treatments
            .iter()
            .zip(treated)
            .any(|(planted, &t)| t && want(&planted.kind))
    }

    fn planted_keyword(&self, treated: &[bool]) -> Option<&str> {
        self.config
            .treatments
            .iter()
            .zip(treated)
            .find_map(|(planted, &t)| match (&planted.kind, t) {
                (TreatmentKind::KeywordInTitle(w), true) => Some(w.as_str()),
                _ => None,
            })
    }

    fn make_title(&mut self, venue: usize, base_tokens: usize, treated: &[bool]) -> String {
        let cfg = self.config;
        let shorter = self.planted_flag(treated, |k| matches!(k, TreatmentKind::TitleShorter));
        let mut target = base_tokens - if shorter { cfg.title_bump } else { 0 };
        let keyword = self.planted_keyword(treated).map(str::to_string);
        if keyword.is_some() {
            target -= 1;
        }
        let mut tokens: Vec<String> = (0..target.max(1))
            .map(|_| {
                let w = &self.vocab[venue];
                w[self.rng.random_range(0..w.len())].clone()
            })
            .collect();
        if let Some(word) = keyword {
            let at = self.rng.random_range(0..=tokens.len());
            tokens.insert(at, word);
        }
        if self.planted_flag(treated, |k| matches!(k, TreatmentKind::ColonInTitle)) {
            tokens[0].push(':');
        }
        tokens.join(" ")
    }

    fn make_abstract(&mut self, venue: usize, treated: &[bool]) -> Option<String> {
        let cfg = self.config;
        if cfg.abstract_repeats == 0 {
            return None;
        }
        let longer = self.planted_flag(treated, |k| matches!(k, TreatmentKind::AbstractLonger));
        let reps = cfg.abstract_repeats + if longer { cfg.abstract_bump_repeats } else { 0 };
        // Whole-vocabulary repetitions keep the normalized term frequencies
        // uniform, so abstract length varies without moving the
        // bag-of-words distance.
        let mut tokens: Vec<&str> = Vec::with_capacity(reps * cfg.abstract_vocab);
        for _ in 0..reps {
            for word in self.vocab[venue].iter().take(cfg.abstract_vocab) {
                tokens.push(word);
            }
        }
        tokens.shuffle(&mut self.rng);
        Some(tokens.join(" "))
    }

    fn make_authors(&mut self, venue: usize) -> Vec<AuthorRef> {
        let cfg = self.config;
        let count = self.draw_range(cfg.authors_per_paper);
        let picks = rand::seq::index::sample(&mut self.rng, cfg.authors_per_community, count);
        let mut chosen: Vec<(usize, usize)> = picks.iter().map(|k| (venue, k)).collect();
        if cfg.venues.len() > 1 && self.rng.random_bool(cfg.bridge_prob) {
            let other = (venue + 1 + self.rng.random_range(0..cfg.venues.len() - 1))
                % cfg.venues.len();
            chosen[0] = (other, self.rng.random_range(0..cfg.authors_per_community));
        }
        chosen
            .into_iter()
            .map(|(c, k)| {
                let with_id = self.rng.random_bool(cfg.author_id_coverage);
                AuthorRef {
                    author_id: with_id.then(|| format!("a{c}x{k}")),
                    name: format!("author {c} {k}"),
                }
            })
            .collect()
    }

    fn make_references(
        &mut self,
        index: usize,
        partner: Option<usize>,
        base_refs: usize,
        treated: &[bool],
    ) -> Vec<String> {
        let cfg = self.config;
        let longer = self.planted_flag(treated, |k| matches!(k, TreatmentKind::ReferenceLonger));
        let target = base_refs + if longer { cfg.ref_bump } else { 0 };

        let mut refs = Vec::with_capacity(target + 1);
        if let Some(p) = partner {
            refs.push(self.paper_id(p));
        }
        // Background references go strictly backwards, so they can never
        // close a citation cycle; the partner edge above is the only
        // forward reference in the corpus.
        let background = if partner.is_some() {
            target.saturating_sub(1)
        } else {
            target.min(index)
        };
        if background > 0 {
            let sample_size = (background + 1).min(index);
            let picks = rand::seq::index::sample(&mut self.rng, index, sample_size);
            let mut taken = 0;
            for candidate in picks.iter() {
                if Some(candidate) == partner {
                    continue;
                }
                refs.push(self.paper_id(candidate));
                taken += 1;
                if taken == background {
                    break;
                }
            }
        }
        refs
    }

    /// Generate one paper. `pair` carries the shared context for twin
    /// members; `None` makes an independent singleton.
    fn push_paper(&mut self, index: usize, venue: usize, year: i32, pair: Option<PairContext>) {
        let cfg = self.config;
        let (partner, title_base, refs_base, pages_base, page_start) = match pair {
            Some(ctx) => (
                Some(ctx.partner),
                ctx.title_base,
                ctx.refs_base,
                ctx.pages_base,
                ctx.page_start,
            ),
            None => (
                None,
                self.draw_range(cfg.title_tokens),
                self.draw_range(cfg.background_refs),
                self.draw_range(cfg.pages),
                self.rng.random_range(1..400),
            ),
        };

        let treated = self.draw_treatments(venue);
        let noise = match self.noise {
            Some(normal) => normal.sample(&mut self.rng),
            None => 0.0,
        };
        let base_outcome = cfg.base_log_citations + cfg.venues[venue].effect + noise;
        let realized = base_outcome
            + cfg
                .treatments
                .iter()
                .zip(&treated)
                .filter(|(_, &t)| t)
                .map(|(p, _)| p.effect)
                .sum::<f64>();
        let citations = quantize_citations(realized, cfg.smoothing);

        let longer_pages = self.planted_flag(treated.as_slice(), |k| {
            matches!(k, TreatmentKind::PaperLonger)
        });
        let page_count = pages_base + if longer_pages { cfg.page_bump } else { 0 };

        let id = self.paper_id(index);
        let record = PaperRecord {
            id: id.clone(),
            title: self.make_title(venue, title_base, &treated),
            abstract_text: self.make_abstract(venue, &treated),
            year: Some(year),
            venue: Some(normalize_venue(&cfg.venues[venue].name)),
            authors: self.make_authors(venue),
            references: self.make_references(index, partner, refs_base, &treated),
            citation_count: Some(citations),
            page_start: Some(page_start as i64),
            page_end: Some((page_start + page_count - 1) as i64),
        };
        self.records.push(record);
        self.truths.push(PaperTruth {
            id,
            base_outcome,
            treated,
            citations,
        });
    }

    fn run(mut self) -> Result<(Corpus, SyntheticTruth)> {
        let cfg = self.config;
        let n_pairs = cfg.n_twin_pairs();
        let pair_start = cfg.ref_pool.min(cfg.n_papers - 2 * n_pairs);

        for index in 0..pair_start {
            let venue = self.rng.random_range(0..cfg.venues.len());
            let year = self.rng.random_range(cfg.year_range.0..=cfg.year_range.1);
            self.push_paper(index, venue, year, None);
        }

        for pair_idx in 0..n_pairs {
            let first = pair_start + 2 * pair_idx;
            let second = first + 1;
            let venue_a = self.rng.random_range(0..cfg.venues.len());
            let venue_b = if cfg.venues.len() > 1 && self.rng.random_bool(cfg.cross_venue_twin_prob)
            {
                (venue_a + 1 + self.rng.random_range(0..cfg.venues.len() - 1)) % cfg.venues.len()
            } else {
                venue_a
            };
            let anchor = self.rng.random_range(cfg.year_range.0..=cfg.year_range.1);
            let gap = self.draw_year_gap();
            let first_is_earlier = self.rng.random_bool(0.5);
            let (year_a, year_b) = if first_is_earlier {
                (anchor, anchor + gap)
            } else {
                (anchor + gap, anchor)
            };
            let shared = PairContext {
                partner: second,
                title_base: self.draw_range(cfg.title_tokens),
                refs_base: self.draw_range(cfg.background_refs),
                pages_base: self.draw_range(cfg.pages),
                page_start: self.rng.random_range(1..400),
            };
            self.push_paper(first, venue_a, year_a, Some(shared));
            self.push_paper(
                second,
                venue_b,
                year_b,
                Some(PairContext {
                    partner: first,
                    ..shared
                }),
            );
        }

        for index in (pair_start + 2 * n_pairs)..cfg.n_papers {
            let venue = self.rng.random_range(0..cfg.venues.len());
            let year = self.rng.random_range(cfg.year_range.0..=cfg.year_range.1);
            self.push_paper(index, venue, year, None);
        }

        let (corpus, duplicates) = Corpus::from_records(self.records);
        if duplicates > 0 {
            return Err(Error::Validation(
                "generator produced duplicate ids; this is a bug".into(),
            ));
        }
        let truth = SyntheticTruth::new(cfg.smoothing, cfg.treatments.clone(), self.truths);
        Ok((corpus, truth))
    }
}

#[derive(Clone, Copy)]
struct PairContext {
    partner: usize,
    title_base: usize,
    refs_base: usize,
    pages_base: usize,
    page_start: usize,
}

/// Generate a corpus and its ground-truth ledger. Fully determined by the
/// configuration, including the seed.
pub fn generate(config: &SynthConfig) -> Result<(Corpus, SyntheticTruth)> {
    config.validate()?;
    Generator::new(config)?.run()
}
