//! Citation corpus ingestion and indexing.
//!
//! A [`Corpus`] is an immutable, id-indexed snapshot of a publication
//! database: every paper with its year, authors, and resolved references,
//! plus the reverse citation index needed to replay citation events.
//! Two input formats are supported:
//!
//! - a newline-delimited JSON dump (one record per line, DBLP v12 style),
//! - a normalized delimited table (`paper_id, year, author_ids, reference_ids`).
//!
//! Both roads lead to the same [`Corpus`]; ingestion is order-independent
//! and a corpus round-trips through the table format unchanged.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

/// Opaque paper identifier. Input tokens that are not decimal integers are
/// folded to 64 bits with FNV-1a; identity never depends on names or titles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PaperId(pub u64);

/// Opaque author identifier with the same token rules as [`PaperId`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AuthorId(pub u64);

impl std::fmt::Display for PaperId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::fmt::Display for AuthorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Publication years outside this window are treated as missing.
pub const YEAR_MIN: i32 = 1000;
pub const YEAR_MAX: i32 = 3000;

/// One publication after cleaning: unique id, a valid year, at least one
/// author, and a deduplicated reference list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaperRecord {
    pub paper_id: PaperId,
    pub year: i32,
    /// Author list in publication order, duplicates removed.
    pub author_ids: Vec<AuthorId>,
    /// Cited paper ids, sorted and deduplicated. In a built [`Corpus`] this
    /// holds only references that resolved to papers in the corpus.
    pub reference_ids: Vec<PaperId>,
}

/// Counters describing one ingestion run. `papers_kept` plus the three
/// `papers_dropped_*` counters equals the number of records seen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub papers_kept: u64,
    pub papers_dropped_no_year: u64,
    pub papers_dropped_no_authors: u64,
    pub papers_dropped_duplicate_id: u64,
    pub references_total: u64,
    pub references_resolved: u64,
    pub parse_errors: u64,
}

impl IngestReport {
    /// Records that survived cleaning plus records dropped by it.
    pub fn records_seen(&self) -> u64 {
        self.papers_kept
            + self.papers_dropped_no_year
            + self.papers_dropped_no_authors
            + self.papers_dropped_duplicate_id
    }
}

/// Optional knobs for ingestion, mostly for smoke-testing large dumps.
#[derive(Debug, Clone, Copy, Default)]
pub struct IngestLimits {
    /// Stop after this many records have been read (kept or dropped).
    pub max_records: Option<u64>,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("event table is missing required column {0:?}")]
    MissingColumn(&'static str),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cannot access cache {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{path} is not a citeflow cache (bad magic)")]
    BadMagic { path: String },
    #[error("cache {path} has schema version {found}, this build reads version {expected}")]
    VersionMismatch {
        path: String,
        found: u32,
        expected: u32,
    },
    #[error("cache {path} is truncated or corrupt")]
    Corrupt { path: String },
}

/// Immutable, indexed citation corpus.
///
/// Construction canonicalizes everything: papers are sorted by id, each
/// author's publication list by `(year, paper_id)`, and incoming-citation
/// lists by citing id, so two corpora built from the same records in any
/// order compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    papers: Vec<PaperRecord>,
    index: HashMap<PaperId, u32>,
    by_author: BTreeMap<AuthorId, Vec<PaperId>>,
    in_citations: HashMap<PaperId, Vec<PaperId>>,
}

impl Corpus {
    /// Build a corpus from cleaned-or-raw records, counting everything that
    /// gets dropped. Cleaning drops records without a usable year or author
    /// list and deduplicates authors and references within a record.
    pub fn build(records: impl IntoIterator<Item = PaperRecord>) -> (Corpus, IngestReport) {
        let mut report = IngestReport::default();
        let mut papers: Vec<PaperRecord> = Vec::new();
        let mut index: HashMap<PaperId, u32> = HashMap::new();

        for mut rec in records {
            if rec.year < YEAR_MIN || rec.year > YEAR_MAX {
                report.papers_dropped_no_year += 1;
                continue;
            }
            dedup_preserving_order(&mut rec.author_ids);
            if rec.author_ids.is_empty() {
                report.papers_dropped_no_authors += 1;
                continue;
            }
            if index.contains_key(&rec.paper_id) {
                report.papers_dropped_duplicate_id += 1;
                continue;
            }
            rec.reference_ids.sort_unstable();
            rec.reference_ids.dedup();
            index.insert(rec.paper_id, 0);
            papers.push(rec);
            report.papers_kept += 1;
        }

        papers.sort_unstable_by_key(|p| p.paper_id);
        for (i, p) in papers.iter().enumerate() {
            index.insert(p.paper_id, i as u32);
        }

        // Resolve references: keep only edges whose target is in the corpus
        // and build the reverse index. Unresolved references are counted.
        let mut in_citations: HashMap<PaperId, Vec<PaperId>> = HashMap::new();
        for p in &mut papers {
            report.references_total += p.reference_ids.len() as u64;
            p.reference_ids.retain(|r| index.contains_key(r));
            report.references_resolved += p.reference_ids.len() as u64;
        }
        for p in &papers {
            for r in &p.reference_ids {
                in_citations.entry(*r).or_default().push(p.paper_id);
            }
        }
        for citers in in_citations.values_mut() {
            citers.sort_unstable();
        }

        let mut by_author: BTreeMap<AuthorId, Vec<PaperId>> = BTreeMap::new();
        for p in &papers {
            for a in &p.author_ids {
                by_author.entry(*a).or_default().push(p.paper_id);
            }
        }
        let year_of: HashMap<PaperId, i32> = papers.iter().map(|p| (p.paper_id, p.year)).collect();
        for list in by_author.values_mut() {
            list.sort_unstable_by_key(|id| (year_of[id], *id));
        }

        (
            Corpus {
                papers,
                index,
                by_author,
                in_citations,
            },
            report,
        )
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn get(&self, id: PaperId) -> Option<&PaperRecord> {
        self.index.get(&id).map(|&i| &self.papers[i as usize])
    }

    /// All records, sorted by paper id.
    pub fn records(&self) -> &[PaperRecord] {
        &self.papers
    }

    /// Papers by one author, sorted by `(year, paper_id)`.
    pub fn papers_of(&self, author: AuthorId) -> Option<&[PaperId]> {
        self.by_author.get(&author).map(|v| v.as_slice())
    }

    /// All author ids in ascending order.
    pub fn authors(&self) -> impl Iterator<Item = AuthorId> + '_ {
        self.by_author.keys().copied()
    }

    pub fn author_count(&self) -> usize {
        self.by_author.len()
    }

    /// Papers citing `id`, sorted by citing paper id. Empty if uncited.
    pub fn citers_of(&self, id: PaperId) -> &[PaperId] {
        self.in_citations.get(&id).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

fn dedup_preserving_order<T: Copy + Eq + std::hash::Hash>(items: &mut Vec<T>) {
    let mut seen = std::collections::HashSet::with_capacity(items.len());
    items.retain(|x| seen.insert(*x));
}

/// Deterministic summary of a corpus: totals and the publication-year
/// histogram (which always sums to the number of kept papers).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub papers: u64,
    pub authors: u64,
    pub publications_by_year: BTreeMap<i32, u64>,
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut publications_by_year = BTreeMap::new();
    for p in corpus.records() {
        *publications_by_year.entry(p.year).or_insert(0) += 1;
    }
    CorpusStats {
        papers: corpus.len() as u64,
        authors: corpus.author_count() as u64,
        publications_by_year,
    }
}

// ---------------------------------------------------------------------------
// Dump ingestion (newline-delimited JSON records)
// ---------------------------------------------------------------------------

/// An id token in the wild: either a JSON integer or a string.
#[derive(Deserialize)]
#[serde(untagged)]
enum IdToken {
    Int(u64),
    Str(String),
}

impl IdToken {
    fn to_u64(&self) -> Option<u64> {
        match self {
            IdToken::Int(v) => Some(*v),
            IdToken::Str(s) => {
                let s = s.trim();
                if s.is_empty() {
                    None
                } else {
                    Some(s.parse::<u64>().unwrap_or_else(|_| fnv1a64(s.as_bytes())))
                }
            }
        }
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Deserialize)]
struct RawAuthor {
    id: Option<IdToken>,
}

#[derive(Deserialize)]
struct RawRecord {
    id: IdToken,
    year: Option<i32>,
    #[serde(default)]
    authors: Vec<RawAuthor>,
    #[serde(default)]
    references: Vec<IdToken>,
}

impl RawRecord {
    fn into_record(self) -> Option<PaperRecord> {
        let paper_id = PaperId(self.id.to_u64()?);
        // A missing year is encoded as an out-of-range sentinel so that
        // Corpus::build counts the drop.
        let year = self.year.unwrap_or(YEAR_MIN - 1);
        let author_ids = self
            .authors
            .iter()
            .filter_map(|a| a.id.as_ref().and_then(IdToken::to_u64))
            .map(AuthorId)
            .collect();
        let reference_ids = self
            .references
            .iter()
            .filter_map(IdToken::to_u64)
            .map(PaperId)
            .collect();
        Some(PaperRecord {
            paper_id,
            year,
            author_ids,
            reference_ids,
        })
    }
}

/// Ingest a newline-delimited JSON dump.
///
/// Each line holds one record with fields `id`, `year`, `authors` (a list of
/// `{id}` objects) and `references`; unknown fields are ignored. Array
/// punctuation lines (`[`, `]`) and leading/trailing commas, as produced by
/// array-shaped dumps, are tolerated. Malformed lines are skipped and
/// counted in `parse_errors`.
pub fn ingest_dump(
    path: impl AsRef<Path>,
    limits: &IngestLimits,
) -> Result<(Corpus, IngestReport), IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut parse_errors = 0u64;
    let mut records = Vec::new();
    let mut seen = 0u64;

    for line in reader.lines() {
        if let Some(max) = limits.max_records {
            if seen >= max {
                break;
            }
        }
        let line = line.map_err(|source| IngestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let trimmed = line.trim().trim_start_matches(',').trim_end_matches(',').trim();
        if trimmed.is_empty() || trimmed == "[" || trimmed == "]" {
            continue;
        }
        if trimmed.starts_with('[') {
            // Whole array on one line.
            match serde_json::from_str::<Vec<RawRecord>>(trimmed) {
                Ok(raws) => {
                    for raw in raws {
                        seen += 1;
                        match raw.into_record() {
                            Some(rec) => records.push(rec),
                            None => parse_errors += 1,
                        }
                        if let Some(max) = limits.max_records {
                            if seen >= max {
                                break;
                            }
                        }
                    }
                }
                Err(_) => parse_errors += 1,
            }
            continue;
        }
        seen += 1;
        match serde_json::from_str::<RawRecord>(trimmed) {
            Ok(raw) => match raw.into_record() {
                Some(rec) => records.push(rec),
                None => parse_errors += 1,
            },
            Err(_) => parse_errors += 1,
        }
    }

    let (corpus, mut report) = Corpus::build(records);
    report.parse_errors = parse_errors;
    Ok((corpus, report))
}

// ---------------------------------------------------------------------------
// Normalized event table (delimited text)
// ---------------------------------------------------------------------------

const TABLE_COLUMNS: [&str; 4] = ["paper_id", "year", "author_ids", "reference_ids"];

/// Ingest the normalized table: CSV with header columns `paper_id`, `year`,
/// `author_ids`, `reference_ids`; id lists are semicolon-joined and the
/// reference list may be empty. Rows violating the schema are skipped and
/// counted.
pub fn ingest_event_table(path: impl AsRef<Path>) -> Result<(Corpus, IngestReport), IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(BufReader::new(file));

    let headers = reader.headers()?.clone();
    let mut col = [0usize; 4];
    for (slot, name) in col.iter_mut().zip(TABLE_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or(IngestError::MissingColumn(match name {
                "paper_id" => "paper_id",
                "year" => "year",
                "author_ids" => "author_ids",
                _ => "reference_ids",
            }))?;
    }

    let mut parse_errors = 0u64;
    let mut records = Vec::new();
    for row in reader.records() {
        let row = match row {
            Ok(r) => r,
            Err(_) => {
                parse_errors += 1;
                continue;
            }
        };
        match parse_table_row(&row, &col) {
            Some(rec) => records.push(rec),
            None => parse_errors += 1,
        }
    }

    let (corpus, mut report) = Corpus::build(records);
    report.parse_errors = parse_errors;
    Ok((corpus, report))
}

fn parse_table_row(row: &csv::StringRecord, col: &[usize; 4]) -> Option<PaperRecord> {
    let paper_id = PaperId(parse_id_token(row.get(col[0])?)?);
    let year_field = row.get(col[1])?.trim();
    let year = if year_field.is_empty() {
        YEAR_MIN - 1
    } else {
        year_field.parse::<i32>().ok()?
    };
    let author_ids = split_ids(row.get(col[2])?).map(AuthorId).collect();
    let reference_ids = split_ids(row.get(col[3])?).map(PaperId).collect();
    Some(PaperRecord {
        paper_id,
        year,
        author_ids,
        reference_ids,
    })
}

/// Resolve an id token the way ingestion does: decimal integers parse
/// directly, anything else is FNV-1a hashed to 64 bits.
pub fn parse_id_token(s: &str) -> Option<u64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    Some(s.parse::<u64>().unwrap_or_else(|_| fnv1a64(s.as_bytes())))
}

fn split_ids(field: &str) -> impl Iterator<Item = u64> + '_ {
    field
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .filter_map(parse_id_token)
}

/// Write records in the normalized table format. A corpus exported this way
/// and re-ingested yields an identical corpus.
pub fn write_event_table<'a, W: Write>(
    records: impl IntoIterator<Item = &'a PaperRecord>,
    writer: W,
) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TABLE_COLUMNS)?;
    for rec in records {
        let authors: Vec<String> = rec.author_ids.iter().map(|a| a.0.to_string()).collect();
        let refs: Vec<String> = rec.reference_ids.iter().map(|r| r.0.to_string()).collect();
        w.write_record([
            rec.paper_id.0.to_string(),
            rec.year.to_string(),
            authors.join(";"),
            refs.join(";"),
        ])?;
    }
    w.flush().map_err(|source| IngestError::Io {
        path: "<writer>".into(),
        source,
    })?;
    Ok(())
}

pub fn write_event_table_file(
    records: &[PaperRecord],
    path: impl AsRef<Path>,
) -> Result<(), IngestError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_event_table(records.iter(), BufWriter::new(file))
}

// ---------------------------------------------------------------------------
// Binary cache
// ---------------------------------------------------------------------------

const CACHE_MAGIC: &[u8; 8] = b"CITEFLW\0";
const CACHE_VERSION: u32 = 1;

/// Write corpus records and the ingest report to a compact little-endian
/// binary cache. The layout is versioned; readers refuse other versions.
pub fn write_cache(
    corpus: &Corpus,
    report: &IngestReport,
    path: impl AsRef<Path>,
) -> Result<(), CacheError> {
    let path = path.as_ref();
    let err = |source| CacheError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(err)?);
    let mut put = |buf: &[u8]| w.write_all(buf).map_err(err);

    put(CACHE_MAGIC)?;
    put(&CACHE_VERSION.to_le_bytes())?;
    for counter in [
        report.papers_kept,
        report.papers_dropped_no_year,
        report.papers_dropped_no_authors,
        report.papers_dropped_duplicate_id,
        report.references_total,
        report.references_resolved,
        report.parse_errors,
    ] {
        put(&counter.to_le_bytes())?;
    }
    put(&(corpus.len() as u64).to_le_bytes())?;
    for rec in corpus.records() {
        put(&rec.paper_id.0.to_le_bytes())?;
        put(&rec.year.to_le_bytes())?;
        put(&(rec.author_ids.len() as u32).to_le_bytes())?;
        for a in &rec.author_ids {
            put(&a.0.to_le_bytes())?;
        }
        put(&(rec.reference_ids.len() as u32).to_le_bytes())?;
        for r in &rec.reference_ids {
            put(&r.0.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Read a cache written by [`write_cache`], rebuilding all indexes.
pub fn read_cache(path: impl AsRef<Path>) -> Result<(Corpus, IngestReport), CacheError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let file = File::open(path).map_err(|source| CacheError::Io {
        path: display.clone(),
        source,
    })?;
    let mut r = BufReader::new(file);

    let corrupt = || CacheError::Corrupt {
        path: display.clone(),
    };

    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| corrupt())?;
    if &magic != CACHE_MAGIC {
        return Err(CacheError::BadMagic { path: display });
    }
    let version = read_u32(&mut r).ok_or_else(corrupt)?;
    if version != CACHE_VERSION {
        return Err(CacheError::VersionMismatch {
            path: display,
            found: version,
            expected: CACHE_VERSION,
        });
    }

    let mut counters = [0u64; 7];
    for c in &mut counters {
        *c = read_u64(&mut r).ok_or_else(corrupt)?;
    }
    let report = IngestReport {
        papers_kept: counters[0],
        papers_dropped_no_year: counters[1],
        papers_dropped_no_authors: counters[2],
        papers_dropped_duplicate_id: counters[3],
        references_total: counters[4],
        references_resolved: counters[5],
        parse_errors: counters[6],
    };

    let n_papers = read_u64(&mut r).ok_or_else(corrupt)? as usize;
    let mut records = Vec::with_capacity(n_papers);
    for _ in 0..n_papers {
        let paper_id = PaperId(read_u64(&mut r).ok_or_else(corrupt)?);
        let year = read_i32(&mut r).ok_or_else(corrupt)?;
        let n_authors = read_u32(&mut r).ok_or_else(corrupt)? as usize;
        let mut author_ids = Vec::with_capacity(n_authors);
        for _ in 0..n_authors {
            author_ids.push(AuthorId(read_u64(&mut r).ok_or_else(corrupt)?));
        }
        let n_refs = read_u32(&mut r).ok_or_else(corrupt)? as usize;
        let mut reference_ids = Vec::with_capacity(n_refs);
        for _ in 0..n_refs {
            reference_ids.push(PaperId(read_u64(&mut r).ok_or_else(corrupt)?));
        }
        records.push(PaperRecord {
            paper_id,
            year,
            author_ids,
            reference_ids,
        });
    }

    let (corpus, _) = Corpus::build(records);
    Ok((corpus, report))
}

fn read_u64<R: Read>(r: &mut R) -> Option<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf).ok()?;
    Some(u64::from_le_bytes(buf))
}

fn read_u32<R: Read>(r: &mut R) -> Option<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).ok()?;
    Some(u32::from_le_bytes(buf))
}

fn read_i32<R: Read>(r: &mut R) -> Option<i32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).ok()?;
    Some(i32::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn rec(id: u64, year: i32, authors: &[u64], refs: &[u64]) -> PaperRecord {
        PaperRecord {
            paper_id: PaperId(id),
            year,
            author_ids: authors.iter().copied().map(AuthorId).collect(),
            reference_ids: refs.iter().copied().map(PaperId).collect(),
        }
    }

    #[test]
    fn minimal_record() {
        let (corpus, report) = Corpus::build([rec(1, 2000, &[7], &[])]);
        assert_eq!(corpus.len(), 1);
        assert_eq!(report.papers_kept, 1);
        assert_eq!(report.references_resolved, 0);
    }

    #[test]
    fn single_edge_reconstruction() {
        let (corpus, report) =
            Corpus::build([rec(1, 2000, &[7], &[]), rec(2, 2005, &[8], &[1])]);
        assert_eq!(corpus.citers_of(PaperId(1)), &[PaperId(2)]);
        assert_eq!(report.references_resolved, 1);
        assert_eq!(report.references_total, 1);
    }

    #[test]
    fn unresolved_reference_counted_not_stored() {
        let (corpus, report) = Corpus::build([rec(1, 2000, &[7], &[99])]);
        assert_eq!(report.references_total, 1);
        assert_eq!(report.references_resolved, 0);
        assert!(corpus.get(PaperId(1)).unwrap().reference_ids.is_empty());
        assert!(corpus.citers_of(PaperId(99)).is_empty());
    }

    #[test]
    fn cleaning_drops_and_counts() {
        let (corpus, report) = Corpus::build([
            rec(1, 2000, &[7], &[]),
            rec(2, YEAR_MIN - 1, &[7], &[]), // missing year sentinel
            rec(3, 99999, &[7], &[]),        // out-of-range year
            rec(4, 2001, &[], &[]),          // no authors
            rec(1, 2002, &[9], &[]),         // duplicate id
        ]);
        assert_eq!(corpus.len(), 1);
        assert_eq!(report.papers_kept, 1);
        assert_eq!(report.papers_dropped_no_year, 2);
        assert_eq!(report.papers_dropped_no_authors, 1);
        assert_eq!(report.papers_dropped_duplicate_id, 1);
        assert_eq!(report.records_seen(), 5);
    }

    #[test]
    fn duplicate_refs_and_authors_dedup() {
        let (corpus, report) = Corpus::build([
            rec(1, 2000, &[7], &[]),
            rec(2, 2005, &[8, 8, 9], &[1, 1, 1]),
        ]);
        let p2 = corpus.get(PaperId(2)).unwrap();
        assert_eq!(p2.author_ids, vec![AuthorId(8), AuthorId(9)]);
        assert_eq!(p2.reference_ids, vec![PaperId(1)]);
        assert_eq!(report.references_total, 1);
        assert_eq!(corpus.citers_of(PaperId(1)), &[PaperId(2)]);
    }

    #[test]
    fn order_independent_construction() {
        let records = vec![
            rec(3, 2001, &[7, 8], &[1, 2]),
            rec(1, 2000, &[7], &[]),
            rec(2, 2000, &[8], &[1]),
        ];
        let mut reversed = records.clone();
        reversed.reverse();
        let (a, ra) = Corpus::build(records);
        let (b, rb) = Corpus::build(reversed);
        assert_eq!(a, b);
        assert_eq!(ra, rb);
    }

    #[test]
    fn stats_histogram_sums_to_kept() {
        let (corpus, report) = Corpus::build([
            rec(1, 2000, &[7], &[]),
            rec(2, 2000, &[7], &[]),
            rec(3, 2001, &[8], &[]),
        ]);
        let stats = corpus_stats(&corpus);
        assert_eq!(stats.publications_by_year.get(&2000), Some(&2));
        assert_eq!(stats.publications_by_year.get(&2001), Some(&1));
        let total: u64 = stats.publications_by_year.values().sum();
        assert_eq!(total, report.papers_kept);
        assert_eq!(stats.authors, 2);
    }

    #[test]
    fn empty_corpus_stats() {
        let (corpus, _) = Corpus::build([]);
        let stats = corpus_stats(&corpus);
        assert_eq!(stats.papers, 0);
        assert_eq!(stats.authors, 0);
        assert!(stats.publications_by_year.is_empty());
    }

    #[test]
    fn dump_ingestion_with_errors_and_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dump.jsonl");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "[").unwrap();
        writeln!(f, r#"{{"id":1,"year":2000,"authors":[{{"id":7,"name":"A"}}],"references":[]}}"#).unwrap();
        writeln!(f, r#",{{"id":"2","year":2005,"authors":[{{"id":"8"}}],"references":[1,99]}}"#).unwrap();
        writeln!(f, "this is not json").unwrap();
        writeln!(f, "]").unwrap();
        drop(f);

        let (corpus, report) = ingest_dump(&path, &IngestLimits::default()).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(report.parse_errors, 1);
        assert_eq!(report.references_total, 2);
        assert_eq!(report.references_resolved, 1);
        assert_eq!(corpus.citers_of(PaperId(1)), &[PaperId(2)]);
    }

    #[test]
    fn dump_record_limit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dump.jsonl");
        let mut f = File::create(&path).unwrap();
        for i in 0..10 {
            writeln!(f, r#"{{"id":{i},"year":2000,"authors":[{{"id":7}}]}}"#).unwrap();
        }
        drop(f);
        let limits = IngestLimits {
            max_records: Some(3),
        };
        let (corpus, _) = ingest_dump(&path, &limits).unwrap();
        assert_eq!(corpus.len(), 3);
    }

    #[test]
    fn empty_table_gives_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "paper_id,year,author_ids,reference_ids\n").unwrap();
        let (corpus, report) = ingest_event_table(&path).unwrap();
        assert!(corpus.is_empty());
        assert_eq!(report, IngestReport::default());
    }

    #[test]
    fn table_matches_dump_on_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let dump = dir.path().join("dump.jsonl");
        let mut f = File::create(&dump).unwrap();
        writeln!(f, r#"{{"id":1,"year":2000,"authors":[{{"id":7}}],"references":[]}}"#).unwrap();
        writeln!(f, r#"{{"id":2,"year":2005,"authors":[{{"id":8}}],"references":[1]}}"#).unwrap();
        drop(f);
        let (from_dump, _) = ingest_dump(&dump, &IngestLimits::default()).unwrap();

        let table = dir.path().join("t.csv");
        std::fs::write(
            &table,
            "paper_id,year,author_ids,reference_ids\n1,2000,7,\n2,2005,8,1\n",
        )
        .unwrap();
        let (from_table, _) = ingest_event_table(&table).unwrap();
        assert_eq!(from_dump, from_table);
    }

    #[test]
    fn table_row_schema_violation_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(
            &path,
            "paper_id,year,author_ids,reference_ids\n1,2000,7,\nnotanum?,\u{7};;,x,y\n,,,\n",
        )
        .unwrap();
        let (corpus, report) = ingest_event_table(&path).unwrap();
        assert_eq!(corpus.len(), 1);
        assert!(report.parse_errors >= 1);
    }

    #[test]
    fn round_trip_through_table() {
        let (corpus, _) = Corpus::build([
            rec(1, 2000, &[7], &[]),
            rec(2, 2000, &[8, 7], &[1]),
            rec(3, 2001, &[9], &[1, 2]),
        ]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_event_table_file(corpus.records(), &path).unwrap();
        let (again, _) = ingest_event_table(&path).unwrap();
        assert_eq!(corpus, again);
    }

    #[test]
    fn time_travel_rows_kept_at_this_layer() {
        // Exclusion of citing-year < cited-year happens downstream.
        let (corpus, report) =
            Corpus::build([rec(1, 2010, &[7], &[]), rec(2, 2005, &[8], &[1])]);
        assert_eq!(report.references_resolved, 1);
        assert_eq!(corpus.citers_of(PaperId(1)), &[PaperId(2)]);
    }

    #[test]
    fn cache_round_trip_and_versioning() {
        let (corpus, report) = Corpus::build([
            rec(1, 2000, &[7], &[]),
            rec(2, 2005, &[8], &[1, 99]),
        ]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.bin");
        write_cache(&corpus, &report, &path).unwrap();
        let (loaded, loaded_report) = read_cache(&path).unwrap();
        assert_eq!(corpus, loaded);
        assert_eq!(report, loaded_report);

        // Tampering with the version must be refused.
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[8] = 0xFF;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            read_cache(&path),
            Err(CacheError::VersionMismatch { .. })
        ));

        std::fs::write(&path, b"garbage").unwrap();
        assert!(matches!(read_cache(&path), Err(CacheError::BadMagic { .. }) | Err(CacheError::Corrupt { .. })));
    }
}
