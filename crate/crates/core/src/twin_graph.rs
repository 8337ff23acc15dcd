//! Twin detection and the coauthorship network.
//!
//! A twin is an unordered pair of papers that cite each other. Detection
//! hashes every corpus-internal directed edge once and probes for the
//! reverse edge, so the cost is linear in the total reference count rather
//! than quadratic in the corpus size.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::{hex_digest, AuthorKey, Corpus, PaperRecord};

/// An unordered pair of mutually-citing papers, stored with
/// `first < second` in byte order so each pair has exactly one encoding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwinPair {
    first: String,
    second: String,
}

impl TwinPair {
    /// Canonicalize an unordered id pair. Returns `None` for degenerate
    /// pairs (identical ids).
    pub fn new(a: impl Into<String>, b: impl Into<String>) -> Option<TwinPair> {
        let a = a.into();
        let b = b.into();
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(TwinPair { first: a, second: b }),
            std::cmp::Ordering::Greater => Some(TwinPair { first: b, second: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn first(&self) -> &str {
        &self.first
    }

    pub fn second(&self) -> &str {
        &self.second
    }

    pub fn contains(&self, id: &str) -> bool {
        self.first == id || self.second == id
    }

    /// The twin of `id` within this pair.
    pub fn other(&self, id: &str) -> Option<&str> {
        if self.first == id {
            Some(&self.second)
        } else if self.second == id {
            Some(&self.first)
        } else {
            None
        }
    }
}

impl fmt::Display for TwinPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}", self.first, self.second)
    }
}

/// The set of twin pairs found in one corpus, sorted by canonical pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwinSet {
    pairs: Vec<TwinPair>,
    corpus_fingerprint: String,
}

impl TwinSet {
    /// Build from arbitrary pairs: canonical order is enforced by
    /// [`TwinPair`], duplicates collapse, output is sorted.
    pub fn from_pairs(mut pairs: Vec<TwinPair>, corpus_fingerprint: String) -> TwinSet {
        pairs.sort();
        pairs.dedup();
        TwinSet {
            pairs,
            corpus_fingerprint,
        }
    }

    pub fn pairs(&self) -> &[TwinPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn corpus_fingerprint(&self) -> &str {
        &self.corpus_fingerprint
    }

    /// Digest over the pair list and the source corpus fingerprint; used as
    /// provenance for derived pair datasets.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.corpus_fingerprint.as_bytes());
        for pair in &self.pairs {
            hasher.update(pair.first.as_bytes());
            hasher.update([0u8]);
            hasher.update(pair.second.as_bytes());
            hasher.update([b'\n']);
        }
        hex_digest(hasher)
    }

    /// Write the interchange format: one `first<TAB>second` line per pair.
    pub fn write_tsv<W: Write>(&self, writer: &mut W) -> Result<()> {
        for pair in &self.pairs {
            writeln!(writer, "{pair}")
                .map_err(|e| Error::Format(format!("write failed: {e}")))?;
        }
        Ok(())
    }

    pub fn save_tsv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut writer = BufWriter::new(file);
        self.write_tsv(&mut writer)?;
        writer.flush().map_err(|e| Error::io(path, e))
    }

    /// Read a twin list and bind it to `corpus`. Every id must resolve.
    pub fn load_tsv(path: &Path, corpus: &Corpus) -> Result<TwinSet> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let reader = BufReader::new(file);
        let mut pairs = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let (a, b) = line.split_once('\t').ok_or_else(|| {
                Error::Format(format!(
                    "{}:{}: expected two tab-separated ids",
                    path.display(),
                    lineno + 1
                ))
            })?;
            for id in [a, b] {
                if !corpus.contains(id) {
                    return Err(Error::MissingPaper { id: id.to_string() });
                }
            }
            let pair = TwinPair::new(a, b).ok_or_else(|| {
                Error::Format(format!(
                    "{}:{}: pair of identical ids {a:?}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            pairs.push(pair);
        }
        Ok(TwinSet::from_pairs(pairs, corpus.fingerprint()))
    }
}

fn pack_edge(a: u32, b: u32) -> u64 {
    ((a as u64) << 32) | b as u64
}

/// Find every pair of papers that cite each other.
///
/// Pass one inserts each corpus-internal edge `s -> t` with `s < t`
/// (position order) into a hash set; pass two probes the set with the
/// reversed form of every `s -> t` edge where `s > t`. Each mutual pair is
/// therefore found exactly once. Output is canonicalized by id and sorted,
/// so it is invariant under permutation of the input records.
pub fn detect_twins(corpus: &Corpus) -> TwinSet {
    let mut forward: HashSet<u64> = HashSet::new();
    for (pos, paper) in corpus.papers().iter().enumerate() {
        let s = pos as u32;
        for target in &paper.references {
            if let Some(t) = corpus.position(target) {
                if s < t {
                    forward.insert(pack_edge(s, t));
                }
            }
        }
    }

    let mut pairs = Vec::new();
    for (pos, paper) in corpus.papers().iter().enumerate() {
        let s = pos as u32;
        for target in &paper.references {
            if let Some(t) = corpus.position(target) {
                if s > t && forward.contains(&pack_edge(t, s)) {
                    let a = &corpus.by_position(t).id;
                    let b = &corpus.by_position(s).id;
                    pairs.push(TwinPair::new(a.clone(), b.clone()).expect("distinct positions"));
                }
            }
        }
    }

    TwinSet::from_pairs(pairs, corpus.fingerprint())
}

/// Result of a year-gap filter pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredTwins {
    pub twins: TwinSet,
    /// Pairs dropped because a member had no publication year (only when a
    /// bound was given).
    pub dropped_missing_year: u64,
}

/// Keep pairs whose publication years differ by at most `max_year_gap`.
/// Without a bound the input passes through unchanged.
pub fn filter_twins(twins: &TwinSet, corpus: &Corpus, max_year_gap: Option<u32>) -> FilteredTwins {
    let Some(bound) = max_year_gap else {
        return FilteredTwins {
            twins: twins.clone(),
            dropped_missing_year: 0,
        };
    };
    let mut kept = Vec::new();
    let mut dropped_missing_year = 0u64;
    for pair in twins.pairs() {
        let years = (
            corpus.get(pair.first()).and_then(|p| p.year),
            corpus.get(pair.second()).and_then(|p| p.year),
        );
        match years {
            (Some(a), Some(b)) => {
                if a.abs_diff(b) <= bound {
                    kept.push(pair.clone());
                }
            }
            _ => dropped_missing_year += 1,
        }
    }
    FilteredTwins {
        twins: TwinSet::from_pairs(kept, twins.corpus_fingerprint().to_string()),
        dropped_missing_year,
    }
}

/// Undirected coauthorship graph. A node is an author key; an edge means
/// the two authors appear together on at least one paper.
#[derive(Debug, Clone)]
pub struct CollabGraph {
    node_index: HashMap<AuthorKey, u32>,
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
}

impl CollabGraph {
    pub fn build(corpus: &Corpus) -> CollabGraph {
        let mut node_index: HashMap<AuthorKey, u32> = HashMap::new();
        let mut paper_nodes: Vec<u32> = Vec::new();
        let mut edges: HashSet<u64> = HashSet::new();

        for paper in corpus.papers() {
            paper_nodes.clear();
            for key in paper.author_keys() {
                let next = node_index.len() as u32;
                let node = *node_index.entry(key).or_insert(next);
                if !paper_nodes.contains(&node) {
                    paper_nodes.push(node);
                }
            }
            for i in 0..paper_nodes.len() {
                for j in (i + 1)..paper_nodes.len() {
                    let (a, b) = (
                        paper_nodes[i].min(paper_nodes[j]),
                        paper_nodes[i].max(paper_nodes[j]),
                    );
                    edges.insert(pack_edge(a, b));
                }
            }
        }

        let mut adjacency = vec![Vec::new(); node_index.len()];
        for edge in &edges {
            let a = (edge >> 32) as u32;
            let b = (edge & 0xFFFF_FFFF) as u32;
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        CollabGraph {
            node_index,
            adjacency,
            edge_count: edges.len(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn node(&self, key: &AuthorKey) -> Option<u32> {
        self.node_index.get(key).copied()
    }

    pub fn neighbors(&self, node: u32) -> &[u32] {
        &self.adjacency[node as usize]
    }
}

/// Paper-to-paper distance in the coauthorship graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollabDistance {
    Hops(u32),
    /// Both papers have authors but no connecting path exists.
    Unreachable,
    /// At least one paper has no authors, so distance is undefined.
    NoAuthors,
}

impl CollabDistance {
    pub fn hops(&self) -> Option<u32> {
        match self {
            CollabDistance::Hops(d) => Some(*d),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, CollabDistance::Hops(_))
    }
}

impl fmt::Display for CollabDistance {
    /// Unreachable pairs (either kind) print as `inf` in tabular output.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CollabDistance::Hops(d) => write!(f, "{d}"),
            CollabDistance::Unreachable | CollabDistance::NoAuthors => write!(f, "inf"),
        }
    }
}

/// Minimum hop distance between any author of `a` and any author of `b`.
///
/// Runs one multi-source breadth-first search from `a`'s authors and stops
/// at the first level containing an author of `b`. Papers sharing an author
/// are at distance 0. Scratch space is per call, so concurrent queries on a
/// shared graph are safe.
pub fn paper_collab_distance(
    graph: &CollabGraph,
    a: &PaperRecord,
    b: &PaperRecord,
) -> CollabDistance {
    let sources: Vec<u32> = a.author_keys().filter_map(|k| graph.node(&k)).collect();
    let targets: HashSet<u32> = b.author_keys().filter_map(|k| graph.node(&k)).collect();
    if sources.is_empty() || targets.is_empty() {
        return CollabDistance::NoAuthors;
    }
    if sources.iter().any(|s| targets.contains(s)) {
        return CollabDistance::Hops(0);
    }

    let mut visited = vec![false; graph.node_count()];
    let mut frontier = sources;
    for &s in &frontier {
        visited[s as usize] = true;
    }
    let mut depth = 0u32;
    let mut next = Vec::new();
    while !frontier.is_empty() {
        depth += 1;
        next.clear();
        for &node in &frontier {
            for &nb in graph.neighbors(node) {
                if !visited[nb as usize] {
                    if targets.contains(&nb) {
                        return CollabDistance::Hops(depth);
                    }
                    visited[nb as usize] = true;
                    next.push(nb);
                }
            }
        }
        std::mem::swap(&mut frontier, &mut next);
    }
    CollabDistance::Unreachable
}
