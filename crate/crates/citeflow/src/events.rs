//! Per-author citation event streams.
//!
//! The unit of analysis is a [`Career`] — one author's publications in year
//! order — together with the [`CitationEvent`]s that hit those publications.
//! Each event records *which* career paper received a citation (by its
//! 1-based position in the career), in which year, from which citing paper,
//! and whether the citing paper shares the author (a self-citation).
//!
//! Citations whose citing year precedes the cited year cannot be placed in
//! the allocation process and are excluded (counted, so data quality is
//! visible). A paper citing itself is treated as a data error and dropped.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::corpus::{AuthorId, Corpus, PaperId};

/// Whether the citing paper shares the career's author.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CitationKind {
    SelfCitation,
    External,
}

impl std::fmt::Display for CitationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CitationKind::SelfCitation => write!(f, "self"),
            CitationKind::External => write!(f, "external"),
        }
    }
}

/// One author's publication list, sorted by `(year, paper_id)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Career {
    pub author_id: AuthorId,
    paper_ids: Vec<PaperId>,
    pub_years: Vec<i32>,
}

impl Career {
    pub fn new(author_id: AuthorId, mut papers: Vec<(PaperId, i32)>) -> Career {
        papers.sort_unstable_by_key(|&(id, year)| (year, id));
        papers.dedup();
        Career {
            author_id,
            paper_ids: papers.iter().map(|&(id, _)| id).collect(),
            pub_years: papers.iter().map(|&(_, year)| year).collect(),
        }
    }

    pub fn from_corpus(corpus: &Corpus, author: AuthorId) -> Option<Career> {
        let ids = corpus.papers_of(author)?;
        let papers = ids
            .iter()
            .map(|&id| (id, corpus.get(id).expect("corpus index is consistent").year))
            .collect();
        Some(Career::new(author, papers))
    }

    pub fn len(&self) -> usize {
        self.paper_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paper_ids.is_empty()
    }

    /// Papers in career order (year, then id).
    pub fn paper_ids(&self) -> &[PaperId] {
        &self.paper_ids
    }

    pub fn pub_years(&self) -> &[i32] {
        &self.pub_years
    }

    /// 1-based career position of `id`, if the author wrote it.
    pub fn position_of(&self, id: PaperId) -> Option<u32> {
        self.paper_ids
            .iter()
            .position(|&p| p == id)
            .map(|i| (i + 1) as u32)
    }

    /// Papers published in year `t` or earlier. Because careers are sorted
    /// by year, the first `n_of(t)` career papers are exactly those.
    pub fn n_of(&self, t: i32) -> usize {
        self.pub_years.partition_point(|&y| y <= t)
    }

    /// Papers published strictly before year `t`.
    pub fn n_before(&self, t: i32) -> usize {
        self.pub_years.partition_point(|&y| y < t)
    }

    pub fn start_year(&self) -> Option<i32> {
        self.pub_years.first().copied()
    }
}

/// One citation received by a career paper.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CitationEvent {
    pub year: i32,
    /// 1-based index of the cited paper within the career. Always at most
    /// the number of career papers published by `year`.
    pub target_index: u32,
    pub kind: CitationKind,
    pub citing_paper_id: PaperId,
}

/// Event totals by kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KindTotals {
    pub external: u64,
    pub self_citations: u64,
}

impl KindTotals {
    pub fn total(&self) -> u64 {
        self.external + self.self_citations
    }
}

/// Citations that could not become events, by reason.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExclusionCounts {
    /// Citing year strictly before the cited paper's year.
    pub time_travel: u64,
    /// Citing paper and cited paper are the same record.
    pub self_loops: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EventsError {
    #[error("author {0} has no papers in the corpus")]
    UnknownAuthor(AuthorId),
    #[error(
        "event in year {year} targets career position {target_index}, but only {available} papers exist by then"
    )]
    TargetNotYetPublished {
        year: i32,
        target_index: u32,
        available: usize,
    },
    #[error("event targets career position {0}, career has {1} papers")]
    TargetOutOfRange(u32, usize),
}

/// A career plus its chronologically sorted citation events.
///
/// Events are ordered by `(year, citing_paper_id, target_index)`; the
/// invariant `target_index <= n_of(year)` holds for every event, so replay
/// never cites an unpublished paper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStream {
    career: Career,
    events: Vec<CitationEvent>,
    totals: KindTotals,
    exclusions: ExclusionCounts,
}

impl EventStream {
    /// Assemble a stream from parts, sorting events and checking the
    /// publication-order invariant.
    pub fn from_parts(career: Career, mut events: Vec<CitationEvent>) -> Result<EventStream, EventsError> {
        events.sort_unstable_by_key(|e| (e.year, e.citing_paper_id, e.target_index));
        let mut totals = KindTotals::default();
        for e in &events {
            if e.target_index == 0 || e.target_index as usize > career.len() {
                return Err(EventsError::TargetOutOfRange(e.target_index, career.len()));
            }
            let available = career.n_of(e.year);
            if e.target_index as usize > available {
                return Err(EventsError::TargetNotYetPublished {
                    year: e.year,
                    target_index: e.target_index,
                    available,
                });
            }
            match e.kind {
                CitationKind::External => totals.external += 1,
                CitationKind::SelfCitation => totals.self_citations += 1,
            }
        }
        Ok(EventStream {
            career,
            events,
            totals,
            exclusions: ExclusionCounts::default(),
        })
    }

    fn with_exclusions(mut self, exclusions: ExclusionCounts) -> EventStream {
        self.exclusions = exclusions;
        self
    }

    pub fn career(&self) -> &Career {
        &self.career
    }

    pub fn author_id(&self) -> AuthorId {
        self.career.author_id
    }

    pub fn events(&self) -> &[CitationEvent] {
        &self.events
    }

    pub fn totals(&self) -> KindTotals {
        self.totals
    }

    pub fn exclusions(&self) -> ExclusionCounts {
        self.exclusions
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Replay the corpus for one author: every resolved citation to one of their
/// papers becomes an event, classified self/external by authorship of the
/// citing paper. Time-travel citations and self-loops are excluded and
/// counted.
pub fn extract_events(corpus: &Corpus, author: AuthorId) -> Result<EventStream, EventsError> {
    let career = Career::from_corpus(corpus, author).ok_or(EventsError::UnknownAuthor(author))?;
    let mut events = Vec::new();
    let mut exclusions = ExclusionCounts::default();

    for (idx, &paper) in career.paper_ids().iter().enumerate() {
        let cited_year = career.pub_years()[idx];
        let target_index = (idx + 1) as u32;
        for &citer in corpus.citers_of(paper) {
            if citer == paper {
                exclusions.self_loops += 1;
                continue;
            }
            let citing = corpus.get(citer).expect("reverse index is consistent");
            if citing.year < cited_year {
                exclusions.time_travel += 1;
                continue;
            }
            let kind = if citing.author_ids.contains(&author) {
                CitationKind::SelfCitation
            } else {
                CitationKind::External
            };
            events.push(CitationEvent {
                year: citing.year,
                target_index,
                kind,
                citing_paper_id: citer,
            });
        }
    }

    Ok(EventStream::from_parts(career, events)?.with_exclusions(exclusions))
}

/// Fraction of events that are self-citations; `None` for an empty stream.
pub fn self_fraction(stream: &EventStream) -> Option<f64> {
    let totals = stream.totals();
    let total = totals.total();
    if total == 0 {
        None
    } else {
        Some(totals.self_citations as f64 / total as f64)
    }
}

/// Citations received per career paper, in career order. Entry `i` counts
/// events with `target_index == i + 1`.
pub fn citations_per_paper(stream: &EventStream) -> Vec<u64> {
    let mut counts = vec![0u64; stream.career().len()];
    for e in stream.events() {
        counts[(e.target_index - 1) as usize] += 1;
    }
    counts
}

/// Select authors with at least `min_papers` publications and, when
/// `min_citations > 0`, strictly more than `min_citations` received
/// citations (both kinds, after exclusions). `min_citations == 0` applies
/// no citation threshold. Returned streams are sorted by author id.
pub fn filter_authors(
    corpus: &Corpus,
    min_papers: usize,
    min_citations: u64,
) -> Vec<EventStream> {
    let mut kept = Vec::new();
    for author in corpus.authors() {
        let n_papers = corpus.papers_of(author).map_or(0, <[PaperId]>::len);
        if n_papers < min_papers {
            continue;
        }
        let stream = extract_events(corpus, author).expect("author came from the corpus");
        if min_citations > 0 && stream.totals().total() <= min_citations {
            continue;
        }
        kept.push(stream);
    }
    kept
}

/// Group streams by the career's first publication year.
pub fn career_start_cohorts(streams: &[EventStream]) -> BTreeMap<i32, Vec<&EventStream>> {
    let mut cohorts: BTreeMap<i32, Vec<&EventStream>> = BTreeMap::new();
    for s in streams {
        if let Some(start) = s.career().start_year() {
            cohorts.entry(start).or_default().push(s);
        }
    }
    cohorts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Corpus, PaperRecord};

    fn rec(id: u64, year: i32, authors: &[u64], refs: &[u64]) -> PaperRecord {
        PaperRecord {
            paper_id: PaperId(id),
            year,
            author_ids: authors.iter().copied().map(AuthorId).collect(),
            reference_ids: refs.iter().copied().map(PaperId).collect(),
        }
    }

    /// Author 7: papers 1 (2000) and 2 (2001). Paper 3 (2001, author 8)
    /// cites both; paper 2 cites paper 1 (a self-citation).
    fn small_corpus() -> Corpus {
        let (corpus, _) = Corpus::build([
            rec(1, 2000, &[7], &[]),
            rec(2, 2001, &[7], &[1]),
            rec(3, 2001, &[8], &[1, 2]),
        ]);
        corpus
    }

    #[test]
    fn career_ordering_and_counts() {
        let career = Career::new(
            AuthorId(7),
            vec![(PaperId(5), 2002), (PaperId(2), 2000), (PaperId(9), 2000)],
        );
        assert_eq!(career.paper_ids(), &[PaperId(2), PaperId(9), PaperId(5)]);
        assert_eq!(career.n_of(1999), 0);
        assert_eq!(career.n_of(2000), 2);
        assert_eq!(career.n_of(2002), 3);
        assert_eq!(career.n_before(2000), 0);
        assert_eq!(career.n_before(2002), 2);
        assert_eq!(career.position_of(PaperId(9)), Some(2));
        assert_eq!(career.start_year(), Some(2000));
    }

    #[test]
    fn extraction_classifies_kinds() {
        let corpus = small_corpus();
        let stream = extract_events(&corpus, AuthorId(7)).unwrap();
        assert_eq!(stream.events().len(), 3);
        assert_eq!(stream.totals().self_citations, 1);
        assert_eq!(stream.totals().external, 2);
        // Self-citation: paper 2 cites paper 1.
        let selfs: Vec<_> = stream
            .events()
            .iter()
            .filter(|e| e.kind == CitationKind::SelfCitation)
            .collect();
        assert_eq!(selfs.len(), 1);
        assert_eq!(selfs[0].citing_paper_id, PaperId(2));
        assert_eq!(selfs[0].target_index, 1);
        assert_eq!(self_fraction(&stream), Some(1.0 / 3.0));
    }

    #[test]
    fn unknown_author_is_an_error() {
        let corpus = small_corpus();
        assert_eq!(
            extract_events(&corpus, AuthorId(99)),
            Err(EventsError::UnknownAuthor(AuthorId(99)))
        );
    }

    #[test]
    fn time_travel_excluded_and_counted() {
        // Paper 2 (1999) cites paper 1 (2000): impossible, excluded.
        let (corpus, _) = Corpus::build([
            rec(1, 2000, &[7], &[]),
            rec(2, 1999, &[8], &[1]),
        ]);
        let stream = extract_events(&corpus, AuthorId(7)).unwrap();
        assert!(stream.is_empty());
        assert_eq!(stream.exclusions().time_travel, 1);
    }

    #[test]
    fn same_year_citations_kept() {
        let (corpus, _) = Corpus::build([
            rec(1, 2000, &[7], &[]),
            rec(2, 2000, &[8], &[1]),
        ]);
        let stream = extract_events(&corpus, AuthorId(7)).unwrap();
        assert_eq!(stream.events().len(), 1);
        assert_eq!(stream.events()[0].year, 2000);
        assert_eq!(stream.events()[0].kind, CitationKind::External);
    }

    #[test]
    fn self_loop_dropped() {
        let (corpus, _) = Corpus::build([rec(1, 2000, &[7], &[1])]);
        let stream = extract_events(&corpus, AuthorId(7)).unwrap();
        assert!(stream.is_empty());
        assert_eq!(stream.exclusions().self_loops, 1);
    }

    #[test]
    fn events_sorted_chronologically() {
        let (corpus, _) = Corpus::build([
            rec(10, 2000, &[7], &[]),
            rec(11, 2001, &[7], &[]),
            rec(20, 2003, &[8], &[10, 11]),
            rec(21, 2001, &[9], &[10]),
        ]);
        let stream = extract_events(&corpus, AuthorId(7)).unwrap();
        let years: Vec<i32> = stream.events().iter().map(|e| e.year).collect();
        assert_eq!(years, vec![2001, 2003, 2003]);
        for e in stream.events() {
            assert!(e.target_index as usize <= stream.career().n_of(e.year));
        }
    }

    #[test]
    fn from_parts_rejects_premature_target() {
        let career = Career::new(AuthorId(7), vec![(PaperId(1), 2000), (PaperId(2), 2005)]);
        let bad = CitationEvent {
            year: 2001,
            target_index: 2, // paper 2 appears in 2005
            kind: CitationKind::External,
            citing_paper_id: PaperId(50),
        };
        assert_eq!(
            EventStream::from_parts(career, vec![bad]),
            Err(EventsError::TargetNotYetPublished {
                year: 2001,
                target_index: 2,
                available: 1
            })
        );
    }

    #[test]
    fn from_parts_rejects_out_of_range_target() {
        let career = Career::new(AuthorId(7), vec![(PaperId(1), 2000)]);
        let bad = CitationEvent {
            year: 2001,
            target_index: 5,
            kind: CitationKind::External,
            citing_paper_id: PaperId(50),
        };
        assert!(matches!(
            EventStream::from_parts(career, vec![bad]),
            Err(EventsError::TargetOutOfRange(5, 1))
        ));
    }

    #[test]
    fn citations_per_paper_matches_events() {
        let corpus = small_corpus();
        let stream = extract_events(&corpus, AuthorId(7)).unwrap();
        assert_eq!(citations_per_paper(&stream), vec![2, 1]);
    }

    #[test]
    fn empty_stream_self_fraction_none() {
        let career = Career::new(AuthorId(7), vec![(PaperId(1), 2000)]);
        let stream = EventStream::from_parts(career, vec![]).unwrap();
        assert_eq!(self_fraction(&stream), None);
    }

    #[test]
    fn filter_thresholds() {
        // Author 7 has 2 papers / 3 citations; author 8 has 1 paper / 0.
        let corpus = small_corpus();
        assert_eq!(filter_authors(&corpus, 1, 0).len(), 2);
        assert_eq!(filter_authors(&corpus, 2, 0).len(), 1);
        assert_eq!(filter_authors(&corpus, 3, 0).len(), 0);
        // Strict citation threshold: > 2 keeps author 7, > 3 drops them.
        let kept = filter_authors(&corpus, 1, 2);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].author_id(), AuthorId(7));
        assert!(filter_authors(&corpus, 1, 3).is_empty());
        // min_citations == 0 keeps the never-cited author 8.
        let all = filter_authors(&corpus, 1, 0);
        assert!(all.iter().any(|s| s.author_id() == AuthorId(8)));
    }

    #[test]
    fn cohorts_group_by_start_year() {
        let (corpus, _) = Corpus::build([
            rec(1, 2000, &[7], &[]),
            rec(2, 2000, &[8], &[]),
            rec(3, 2005, &[9], &[]),
        ]);
        let streams = filter_authors(&corpus, 1, 0);
        let cohorts = career_start_cohorts(&streams);
        assert_eq!(cohorts[&2000].len(), 2);
        assert_eq!(cohorts[&2005].len(), 1);
    }
}
