//! Corpus ingestion: parse line-delimited bibliographic records into a
//! validated, immutable [`Corpus`].
//!
//! Two input formats are supported:
//!
//! * `json-lines`: one JSON object per line with keys `id`, `title`,
//!   `abstract`, `year`, `venue`, `authors` (list of `{id, name}`),
//!   `references` (list of id strings), `n_citation`, `page_start`,
//!   `page_end`. Missing keys mean absent optional fields.
//! * `tsv`: ten tab-separated columns in the same order; `references` are
//!   `;`-joined, authors are `;`-joined `id|name` entries, empty columns
//!   mean absent fields. Fields containing tabs, `;` or `|` cannot be
//!   represented and such lines are counted as malformed.
//!
//! Malformed lines are counted and reported, never silently dropped; a file
//! where more than half the lines fail to parse is rejected outright since
//! that almost always means the wrong `--format` flag.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Magic prefix + schema version embedded in corpus cache files.
const CACHE_MAGIC: &[u8; 8] = b"TWSCORP\0";
const CACHE_VERSION: u32 = 1;

/// One author of a paper. At least one of `author_id` / `name` is non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorRef {
    pub author_id: Option<String>,
    /// Lowercased, whitespace-collapsed form of the raw name.
    pub name: String,
}

/// Identity used for collaboration-network nodes and self-citation checks:
/// the author id when present, otherwise the normalized name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AuthorKey {
    Id(String),
    Name(String),
}

impl fmt::Display for AuthorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuthorKey::Id(s) => write!(f, "id:{s}"),
            AuthorKey::Name(s) => write!(f, "name:{s}"),
        }
    }
}

impl AuthorRef {
    /// Build a normalized author, rejecting entries with no identity at all.
    pub fn new(author_id: Option<String>, raw_name: &str) -> Option<AuthorRef> {
        let author_id = author_id.filter(|s| !s.is_empty());
        let name = normalize_author_name(raw_name);
        if author_id.is_none() && name.is_empty() {
            return None;
        }
        Some(AuthorRef { author_id, name })
    }

    pub fn key(&self) -> AuthorKey {
        match &self.author_id {
            Some(id) => AuthorKey::Id(id.clone()),
            None => AuthorKey::Name(self.name.clone()),
        }
    }
}

/// One normalized bibliographic record.
///
/// Invariants (enforced at parse time, preserved by construction elsewhere):
/// `id` is non-empty; `references` holds no duplicates and never the record's
/// own id; `year`, when present, is positive; `page_end >= page_start` when
/// both are present; every author carries an id or a non-empty name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub id: String,
    pub title: String,
    pub abstract_text: Option<String>,
    pub year: Option<i32>,
    /// Normalized venue string (see [`normalize_venue`]).
    pub venue: Option<String>,
    pub authors: Vec<AuthorRef>,
    /// Outgoing citations by paper id. May point outside the corpus.
    pub references: Vec<String>,
    /// Citation count as recorded in the source snapshot.
    pub citation_count: Option<u64>,
    pub page_start: Option<i64>,
    pub page_end: Option<i64>,
}

impl PaperRecord {
    pub fn author_keys(&self) -> impl Iterator<Item = AuthorKey> + '_ {
        self.authors.iter().map(AuthorRef::key)
    }

    pub fn page_count(&self) -> Option<i64> {
        match (self.page_start, self.page_end) {
            (Some(s), Some(e)) => Some(e - s + 1),
            _ => None,
        }
    }
}

/// Lowercase, collapse internal whitespace, strip surrounding punctuation.
/// Deterministic and idempotent; empty input maps to empty output.
pub fn normalize_venue(raw: &str) -> String {
    let trimmed = raw.trim_matches(|c: char| !c.is_alphanumeric());
    let lowered = trimmed.to_lowercase();
    lowered.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Lowercase and collapse whitespace; used for author names.
pub fn normalize_author_name(raw: &str) -> String {
    raw.to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Input formats accepted by [`parse_corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    JsonLines,
    Tsv,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json-lines" | "jsonl" => Ok(CorpusFormat::JsonLines),
            "tsv" => Ok(CorpusFormat::Tsv),
            other => Err(Error::Usage(format!(
                "unknown corpus format {other:?}; expected json-lines or tsv"
            ))),
        }
    }
}

/// Counters accumulated while parsing a corpus file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestStats {
    /// Non-blank input lines seen.
    pub lines: u64,
    /// Records accepted into the corpus.
    pub accepted: u64,
    /// Lines that failed to parse or validate.
    pub malformed: u64,
    /// Well-formed records dropped because their id was already taken.
    pub duplicate_ids: u64,
    /// First few malformed-line descriptions, for operator diagnostics.
    pub sample_errors: Vec<String>,
}

impl IngestStats {
    /// Malformed lines plus duplicate-id records.
    pub fn rejected(&self) -> u64 {
        self.malformed + self.duplicate_ids
    }
}

/// A parsed corpus together with its ingest statistics.
#[derive(Debug)]
pub struct ParsedCorpus {
    pub corpus: Corpus,
    pub stats: IngestStats,
}

/// Validated, immutable collection of paper records.
///
/// Construction builds a reverse-citation index over corpus-internal
/// references; dangling references (targets outside the corpus) stay in the
/// records but contribute nothing to the index. After construction the
/// corpus is read-only and safe to share across threads.
#[derive(Debug, Clone)]
pub struct Corpus {
    papers: Vec<PaperRecord>,
    index: HashMap<String, u32>,
    /// CSR layout of citing-paper positions, grouped by cited paper.
    citer_offsets: Vec<u32>,
    citers: Vec<u32>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        // The index and citer structures are functions of `papers`.
        self.papers == other.papers
    }
}

impl Corpus {
    /// Build a corpus from records, keeping the first record per id and
    /// counting later duplicates.
    pub fn from_records(records: Vec<PaperRecord>) -> (Corpus, u64) {
        let mut index: HashMap<String, u32> = HashMap::with_capacity(records.len());
        let mut papers: Vec<PaperRecord> = Vec::with_capacity(records.len());
        let mut duplicates = 0u64;
        for record in records {
            if index.contains_key(&record.id) {
                duplicates += 1;
                continue;
            }
            index.insert(record.id.clone(), papers.len() as u32);
            papers.push(record);
        }

        // Reverse-citation index: count, prefix-sum, fill.
        let n = papers.len();
        let mut counts = vec![0u32; n];
        for paper in &papers {
            for target in &paper.references {
                if let Some(&pos) = index.get(target) {
                    counts[pos as usize] += 1;
                }
            }
        }
        let mut citer_offsets = Vec::with_capacity(n + 1);
        let mut running = 0u32;
        citer_offsets.push(0);
        for c in &counts {
            running += c;
            citer_offsets.push(running);
        }
        let mut cursor: Vec<u32> = citer_offsets[..n].to_vec();
        let mut citers = vec![0u32; running as usize];
        for (src, paper) in papers.iter().enumerate() {
            for target in &paper.references {
                if let Some(&pos) = index.get(target) {
                    citers[cursor[pos as usize] as usize] = src as u32;
                    cursor[pos as usize] += 1;
                }
            }
        }

        (
            Corpus {
                papers,
                index,
                citer_offsets,
                citers,
            },
            duplicates,
        )
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn papers(&self) -> &[PaperRecord] {
        &self.papers
    }

    pub fn get(&self, id: &str) -> Option<&PaperRecord> {
        self.index.get(id).map(|&pos| &self.papers[pos as usize])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn position(&self, id: &str) -> Option<u32> {
        self.index.get(id).copied()
    }

    pub fn by_position(&self, pos: u32) -> &PaperRecord {
        &self.papers[pos as usize]
    }

    /// Corpus-internal incoming reference count for a paper position.
    pub fn in_citations_at(&self, pos: u32) -> u32 {
        let pos = pos as usize;
        self.citer_offsets[pos + 1] - self.citer_offsets[pos]
    }

    /// Corpus-internal incoming reference count; 0 for unknown ids.
    pub fn in_citations(&self, id: &str) -> u32 {
        self.position(id).map_or(0, |p| self.in_citations_at(p))
    }

    /// Positions of the papers citing the paper at `pos`, ascending.
    pub fn citers_at(&self, pos: u32) -> &[u32] {
        let pos = pos as usize;
        &self.citers[self.citer_offsets[pos] as usize..self.citer_offsets[pos + 1] as usize]
    }

    pub fn citing_papers<'a>(&'a self, id: &str) -> impl Iterator<Item = &'a PaperRecord> + 'a {
        let slice = match self.position(id) {
            Some(pos) => self.citers_at(pos),
            None => &[],
        };
        slice.iter().map(move |&p| &self.papers[p as usize])
    }

    /// SHA-256 of the canonical binary encoding of all records, in order.
    pub fn fingerprint(&self) -> String {
        let mut hasher = HashWriter(Sha256::new());
        bincode::serialize_into(&mut hasher, &self.papers).expect("in-memory hashing cannot fail");
        hex_digest(hasher.0)
    }

    /// Write a versioned binary snapshot of the corpus.
    pub fn save_cache(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut writer = BufWriter::new(file);
        writer
            .write_all(CACHE_MAGIC)
            .and_then(|_| writer.write_all(&CACHE_VERSION.to_le_bytes()))
            .map_err(|e| Error::io(path, e))?;
        bincode::serialize_into(&mut writer, &self.papers)
            .map_err(|e| Error::Format(format!("failed to encode corpus cache: {e}")))?;
        writer.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    /// Load a corpus snapshot, refusing unknown versions.
    pub fn load_cache(path: &Path) -> Result<Corpus> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = BufReader::new(file);
        let mut magic = [0u8; 8];
        let mut version = [0u8; 4];
        reader
            .read_exact(&mut magic)
            .and_then(|_| reader.read_exact(&mut version))
            .map_err(|e| Error::io(path, e))?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Format(format!(
                "{} is not a corpus cache (bad magic)",
                path.display()
            )));
        }
        let version = u32::from_le_bytes(version);
        if version != CACHE_VERSION {
            return Err(Error::Format(format!(
                "corpus cache {} has schema version {version}, this build reads version {CACHE_VERSION}",
                path.display()
            )));
        }
        let papers: Vec<PaperRecord> = bincode::deserialize_from(&mut reader)
            .map_err(|e| Error::Format(format!("corrupt corpus cache {}: {e}", path.display())))?;
        let (corpus, duplicates) = Corpus::from_records(papers);
        if duplicates > 0 {
            return Err(Error::Format(format!(
                "corrupt corpus cache {}: {duplicates} duplicate ids",
                path.display()
            )));
        }
        Ok(corpus)
    }
}

struct HashWriter(Sha256);

impl Write for HashWriter {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.update(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

pub(crate) fn hex_digest(hasher: Sha256) -> String {
    let bytes = hasher.finalize();
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        use fmt::Write as _;
        write!(out, "{b:02x}").expect("writing to String cannot fail");
    }
    out
}

/// Parse a corpus file. Malformed lines are counted, not fatal; more than
/// 50% malformed lines is treated as a wrong-format error.
pub fn parse_corpus(path: &Path, format: CorpusFormat) -> Result<ParsedCorpus> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus_str(&content, format)
}

/// Same as [`parse_corpus`] over in-memory text.
pub fn parse_corpus_str(content: &str, format: CorpusFormat) -> Result<ParsedCorpus> {
    let lines: Vec<&str> = content
        .lines()
        .filter(|line| !line.trim().is_empty())
        .collect();

    // Line parsing is pure, so shard order cannot affect the result; the
    // indexed collect keeps output order equal to input order.
    let parsed: Vec<std::result::Result<PaperRecord, String>> = lines
        .par_iter()
        .map(|line| match format {
            CorpusFormat::JsonLines => parse_json_line(line),
            CorpusFormat::Tsv => parse_tsv_line(line),
        })
        .collect();

    let mut stats = IngestStats {
        lines: lines.len() as u64,
        ..IngestStats::default()
    };
    let mut records = Vec::with_capacity(parsed.len());
    for (lineno, item) in parsed.into_iter().enumerate() {
        match item {
            Ok(record) => records.push(record),
            Err(reason) => {
                stats.malformed += 1;
                if stats.sample_errors.len() < 5 {
                    stats.sample_errors.push(format!("line {}: {reason}", lineno + 1));
                }
            }
        }
    }

    if stats.lines > 0 && stats.malformed * 2 > stats.lines {
        return Err(Error::Format(format!(
            "{} of {} lines malformed; is the format flag correct?",
            stats.malformed, stats.lines
        )));
    }

    let (corpus, duplicates) = Corpus::from_records(records);
    stats.duplicate_ids = duplicates;
    stats.accepted = corpus.len() as u64;
    Ok(ParsedCorpus { corpus, stats })
}

/// Wire shape of one json-lines record.
#[derive(Serialize, Deserialize)]
struct RawRecord<'a> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    title: Option<String>,
    #[serde(rename = "abstract", default, skip_serializing_if = "Option::is_none")]
    abstract_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    year: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    venue: Option<std::borrow::Cow<'a, str>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    authors: Option<Vec<RawAuthor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    references: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_citation: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    page_start: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    page_end: Option<i64>,
}

#[derive(Serialize, Deserialize)]
struct RawAuthor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

fn parse_json_line(line: &str) -> std::result::Result<PaperRecord, String> {
    let raw: RawRecord =
        serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    validate_raw(raw)
}

fn validate_raw(raw: RawRecord) -> std::result::Result<PaperRecord, String> {
    let id = raw.id.filter(|s| !s.is_empty()).ok_or("missing or empty id")?;
    let title = raw.title.ok_or("missing title")?;

    let year = match raw.year {
        None => None,
        Some(y) if y > 0 && y <= i32::MAX as i64 => Some(y as i32),
        Some(y) => return Err(format!("year {y} out of range")),
    };

    let venue = raw
        .venue
        .map(|v| normalize_venue(&v))
        .filter(|v| !v.is_empty());

    let mut authors = Vec::new();
    for (i, a) in raw.authors.unwrap_or_default().into_iter().enumerate() {
        match AuthorRef::new(a.id, a.name.as_deref().unwrap_or("")) {
            Some(author) => authors.push(author),
            None => return Err(format!("author {i} has neither id nor name")),
        }
    }

    // Keep references first-occurrence-unique and never self-referential.
    let mut references = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for r in raw.references.unwrap_or_default() {
        if r == id || r.is_empty() {
            continue;
        }
        if seen.insert(r.clone()) {
            references.push(r);
        }
    }

    let citation_count = match raw.n_citation {
        None => None,
        Some(c) if c >= 0 => Some(c as u64),
        Some(c) => return Err(format!("negative citation count {c}")),
    };

    if let (Some(s), Some(e)) = (raw.page_start, raw.page_end) {
        if e < s {
            return Err(format!("page_end {e} before page_start {s}"));
        }
    }

    Ok(PaperRecord {
        id,
        title,
        abstract_text: raw.abstract_text,
        year,
        venue,
        authors,
        references,
        citation_count,
        page_start: raw.page_start,
        page_end: raw.page_end,
    })
}

const TSV_COLUMNS: usize = 10;

fn parse_tsv_line(line: &str) -> std::result::Result<PaperRecord, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != TSV_COLUMNS {
        return Err(format!(
            "expected {TSV_COLUMNS} tab-separated columns, found {}",
            fields.len()
        ));
    }
    let opt = |s: &str| -> Option<String> {
        if s.is_empty() {
            None
        } else {
            Some(s.to_string())
        }
    };
    let parse_int = |s: &str, what: &str| -> std::result::Result<Option<i64>, String> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse::<i64>()
                .map(Some)
                .map_err(|_| format!("invalid {what}: {s:?}"))
        }
    };

    let authors = if fields[5].is_empty() {
        None
    } else {
        let mut list = Vec::new();
        for entry in fields[5].split(';') {
            let (id, name) = entry
                .split_once('|')
                .ok_or_else(|| format!("author entry {entry:?} is not id|name"))?;
            list.push(RawAuthor {
                id: opt(id),
                name: opt(name),
            });
        }
        Some(list)
    };
    let references = if fields[6].is_empty() {
        None
    } else {
        Some(fields[6].split(';').map(str::to_string).collect())
    };

    let raw = RawRecord {
        id: opt(fields[0]),
        title: opt(fields[1]),
        abstract_text: opt(fields[2]),
        year: parse_int(fields[3], "year")?,
        venue: opt(fields[4]).map(std::borrow::Cow::Owned),
        authors,
        references,
        n_citation: parse_int(fields[7], "n_citation")?,
        page_start: parse_int(fields[8], "page_start")?,
        page_end: parse_int(fields[9], "page_end")?,
    };
    validate_raw(raw)
}

fn record_to_raw(record: &PaperRecord) -> RawRecord<'_> {
    RawRecord {
        id: Some(record.id.clone()),
        title: Some(record.title.clone()),
        abstract_text: record.abstract_text.clone(),
        year: record.year.map(|y| y as i64),
        venue: record.venue.as_deref().map(std::borrow::Cow::Borrowed),
        authors: Some(
            record
                .authors
                .iter()
                .map(|a| RawAuthor {
                    id: a.author_id.clone(),
                    name: Some(a.name.clone()),
                })
                .collect(),
        ),
        references: Some(record.references.clone()),
        n_citation: record.citation_count.map(|c| c as i64),
        page_start: record.page_start,
        page_end: record.page_end,
    }
}

/// Serialize a corpus as json-lines, one record per line, corpus order.
pub fn write_corpus_jsonl<W: Write>(corpus: &Corpus, writer: &mut W) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Format(format!("write failed: {e}"));
    for record in corpus.papers() {
        let raw = record_to_raw(record);
        let line = serde_json::to_string(&raw)
            .map_err(|e| Error::Format(format!("failed to encode record {}: {e}", record.id)))?;
        writer.write_all(line.as_bytes()).map_err(io_err)?;
        writer.write_all(b"\n").map_err(io_err)?;
    }
    Ok(())
}

/// Serialize a corpus in the tab-separated layout. Fields that would collide
/// with the format's separators are rejected.
pub fn write_corpus_tsv<W: Write>(corpus: &Corpus, writer: &mut W) -> Result<()> {
    let check = |s: &str, id: &str| -> Result<()> {
        if s.contains('\t') || s.contains(';') || s.contains('|') || s.contains('\n') {
            return Err(Error::Format(format!(
                "record {id} contains tsv separator characters; use json-lines"
            )));
        }
        Ok(())
    };
    let io_err = |e: std::io::Error| Error::Format(format!("write failed: {e}"));
    for r in corpus.papers() {
        let abstract_text = r.abstract_text.as_deref().unwrap_or("");
        let venue = r.venue.as_deref().unwrap_or("");
        check(&r.title, &r.id)?;
        check(abstract_text, &r.id)?;
        check(venue, &r.id)?;
        for a in &r.authors {
            check(a.author_id.as_deref().unwrap_or(""), &r.id)?;
            check(&a.name, &r.id)?;
        }
        for reference in &r.references {
            check(reference, &r.id)?;
        }
        let authors = r
            .authors
            .iter()
            .map(|a| format!("{}|{}", a.author_id.as_deref().unwrap_or(""), a.name))
            .collect::<Vec<_>>()
            .join(";");
        let fmt_opt = |v: Option<i64>| v.map(|x| x.to_string()).unwrap_or_default();
        let line = format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.id,
            r.title,
            abstract_text,
            r.year.map(|y| y.to_string()).unwrap_or_default(),
            venue,
            authors,
            r.references.join(";"),
            fmt_opt(r.citation_count.map(|c| c as i64)),
            fmt_opt(r.page_start),
            fmt_opt(r.page_end),
        );
        writer.write_all(line.as_bytes()).map_err(io_err)?;
    }
    Ok(())
}
