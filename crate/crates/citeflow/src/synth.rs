//! Synthetic citation streams with a known preferential-attachment fraction.
//!
//! The generator is the estimator's ground truth: citations are allocated by
//! the same frozen year-start rule the likelihood assumes (papers published
//! in year `t` join with zero accumulated citations; every event of a year
//! sees the state as of the year's start). With probability `rho` a citation
//! follows accumulated counts, otherwise it picks uniformly among the papers
//! published so far; when nothing has been cited yet the draw is uniform
//! outright.
//!
//! Besides the event stream itself, each synthetic author can be
//! materialized as paper records — career papers plus citing papers — such
//! that ingesting those records and re-extracting events reproduces the
//! stream exactly, self/external classification included.

use std::collections::HashSet;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{AuthorId, PaperId, PaperRecord};
use crate::events::{Career, CitationEvent, CitationKind, EventStream};

/// Per-year counts; indexing past the end repeats the last entry, so a
/// one-element schedule is a constant rate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule(Vec<u32>);

impl Schedule {
    pub fn constant(v: u32) -> Schedule {
        Schedule(vec![v])
    }

    pub fn from_vec(v: Vec<u32>) -> Schedule {
        Schedule(v)
    }

    pub fn value_at(&self, year_index: usize) -> u32 {
        match self.0.get(year_index) {
            Some(&v) => v,
            None => self.0.last().copied().unwrap_or(0),
        }
    }
}

impl FromStr for Schedule {
    type Err = String;

    /// Comma-separated counts, e.g. `"3,2,1"`.
    fn from_str(s: &str) -> Result<Schedule, String> {
        let vals: Result<Vec<u32>, _> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u32>().map_err(|e| format!("{t:?}: {e}")))
            .collect();
        let vals = vals?;
        if vals.is_empty() {
            return Err("schedule needs at least one count".into());
        }
        Ok(Schedule(vals))
    }
}

/// Recipe for one synthetic career.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthProfile {
    /// Career length in years; year index 0 maps to `start_year`.
    pub years: u32,
    pub start_year: i32,
    pub papers_per_year: Schedule,
    pub external_per_year: Schedule,
    pub self_per_year: Schedule,
    /// Preferential fraction driving external citations.
    pub rho_external: f64,
    /// Preferential fraction driving self-citations.
    pub rho_self: f64,
    pub seed: u64,
}

impl Default for SynthProfile {
    fn default() -> SynthProfile {
        SynthProfile {
            years: 5,
            start_year: 2000,
            papers_per_year: Schedule::constant(1),
            external_per_year: Schedule::constant(10),
            self_per_year: Schedule::constant(0),
            rho_external: 0.5,
            rho_self: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("rho must lie in [0, 1], got {0}")]
    InvalidRho(f64),
    #[error("career must span at least one year")]
    NoYears,
    #[error("first career year must publish at least one paper")]
    EmptyFirstYear,
    #[error("synthetic author ids must fit in 31 bits, got {0}")]
    AuthorIdTooLarge(u64),
    #[error(
        "year {year}: cannot place {needed} self-citations; only {capacity} distinct (citing, cited) pairs exist among that year's papers"
    )]
    SelfCapacityExhausted {
        year: i32,
        needed: u64,
        capacity: u64,
    },
}

impl SynthProfile {
    pub fn validate(&self) -> Result<(), SynthError> {
        for rho in [self.rho_external, self.rho_self] {
            if !(0.0..=1.0).contains(&rho) {
                return Err(SynthError::InvalidRho(rho));
            }
        }
        if self.years == 0 {
            return Err(SynthError::NoYears);
        }
        if self.papers_per_year.value_at(0) == 0 {
            return Err(SynthError::EmptyFirstYear);
        }
        Ok(())
    }
}

/// A generated author: the event stream and the paper records that encode it.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthAuthor {
    pub author_id: AuthorId,
    pub stream: EventStream,
    /// Career papers plus one citing paper per external event; building a
    /// corpus from these records and extracting the author's events yields
    /// `stream` again.
    pub records: Vec<PaperRecord>,
}

/// SplitMix64-style mixing of a base seed and a salt. The constants are the
/// standard SplitMix64 increments; the function is fixed for reproducibility
/// across releases.
pub(crate) fn mix_seed(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One mixture draw: weighted by `counts` with probability `rho`, uniform
/// over the `n` published papers otherwise, uniform outright while nothing
/// has been cited.
fn sample_mixture(rng: &mut ChaCha8Rng, counts: &[u64], total: u64, n: usize, rho: f64) -> usize {
    if total > 0 && rng.random::<f64>() < rho {
        let mut v = rng.random_range(0..total);
        for (k, &c) in counts[..n].iter().enumerate() {
            if v < c {
                return k;
            }
            v -= c;
        }
        unreachable!("total is the sum of counts over published papers");
    }
    rng.random_range(0..n)
}

const EXTERNAL_BIT: u64 = 1 << 63;

/// Generate one author. The stream and records are fully determined by the
/// profile (including its seed) and the author id.
pub fn generate_author(profile: &SynthProfile, author_id: AuthorId) -> Result<SynthAuthor, SynthError> {
    profile.validate()?;
    if author_id.0 >= 1 << 31 {
        return Err(SynthError::AuthorIdTooLarge(author_id.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(profile.seed, author_id.0));

    // Career papers, ids ascending in publication order.
    let mut career_papers: Vec<(PaperId, i32)> = Vec::new();
    let mut seq: u64 = 0;
    let base = author_id.0 << 32;
    for y in 0..profile.years {
        let year = profile.start_year + y as i32;
        for _ in 0..profile.papers_per_year.value_at(y as usize) {
            career_papers.push((PaperId(base | seq), year));
            seq += 1;
        }
    }
    let career = Career::new(author_id, career_papers.clone());

    let mut career_refs: Vec<Vec<PaperId>> = vec![Vec::new(); career_papers.len()];
    let mut external_records: Vec<PaperRecord> = Vec::new();
    let mut ext_seq: u64 = 0;

    let mut counts = vec![0u64; career_papers.len()];
    let mut total: u64 = 0;
    let mut events: Vec<CitationEvent> = Vec::new();

    for y in 0..profile.years {
        let year = profile.start_year + y as i32;
        let n = career.n_of(year);
        let year_start_total = total;
        let mut year_events: Vec<(usize, CitationKind)> = Vec::new();

        for _ in 0..profile.external_per_year.value_at(y as usize) {
            let k = sample_mixture(&mut rng, &counts, year_start_total, n, profile.rho_external);
            year_events.push((k, CitationKind::External));
        }
        for _ in 0..profile.self_per_year.value_at(y as usize) {
            let k = sample_mixture(&mut rng, &counts, year_start_total, n, profile.rho_self);
            year_events.push((k, CitationKind::SelfCitation));
        }

        // Materialize citing papers. Self events must be carried by the
        // author's own papers of this year (same-year, so never
        // time-travel), each (citing, cited) pair at most once. When a
        // sampled target has no free citing paper left, the target is
        // redrawn from the same mixture; only a fully used pair space is an
        // error.
        let same_year: Vec<usize> = (0..career_papers.len())
            .filter(|&i| career_papers[i].1 == year)
            .collect();
        let max_pairs = (same_year.len() * n).saturating_sub(same_year.len()) as u64;
        let mut used_pairs: HashSet<(usize, usize)> = HashSet::new();
        let mut cursor = 0usize;
        let self_needed = year_events
            .iter()
            .filter(|(_, kind)| *kind == CitationKind::SelfCitation)
            .count() as u64;
        let has_free_citer = |k: usize, used: &HashSet<(usize, usize)>| {
            same_year.iter().any(|&c| c != k && !used.contains(&(c, k)))
        };

        for event_slot in 0..year_events.len() {
            let (mut k, kind) = year_events[event_slot];
            if kind == CitationKind::SelfCitation && !has_free_citer(k, &used_pairs) {
                if used_pairs.len() as u64 >= max_pairs {
                    return Err(SynthError::SelfCapacityExhausted {
                        year,
                        needed: self_needed,
                        capacity: max_pairs,
                    });
                }
                const MAX_REDRAWS: u32 = 100;
                let mut redrawn = None;
                for _ in 0..MAX_REDRAWS {
                    let cand =
                        sample_mixture(&mut rng, &counts, year_start_total, n, profile.rho_self);
                    if has_free_citer(cand, &used_pairs) {
                        redrawn = Some(cand);
                        break;
                    }
                }
                // Pair space is not full, so some target has capacity.
                k = redrawn.unwrap_or_else(|| {
                    (0..n)
                        .find(|&cand| has_free_citer(cand, &used_pairs))
                        .expect("capacity checked above")
                });
                year_events[event_slot].0 = k;
            }
            match kind {
                CitationKind::External => {
                    let citing_id = PaperId(EXTERNAL_BIT | base | ext_seq);
                    let citing_author = AuthorId(EXTERNAL_BIT | base | ext_seq);
                    ext_seq += 1;
                    external_records.push(PaperRecord {
                        paper_id: citing_id,
                        year,
                        author_ids: vec![citing_author],
                        reference_ids: vec![career_papers[k].0],
                    });
                    events.push(CitationEvent {
                        year,
                        target_index: (k + 1) as u32,
                        kind,
                        citing_paper_id: citing_id,
                    });
                }
                CitationKind::SelfCitation => {
                    let mut chosen = None;
                    for step in 0..same_year.len() {
                        let cand = same_year[(cursor + step) % same_year.len()];
                        if cand != k && !used_pairs.contains(&(cand, k)) {
                            chosen = Some(cand);
                            cursor = (cursor + step + 1) % same_year.len();
                            break;
                        }
                    }
                    let citing = chosen.expect("target was checked or redrawn to have a free citer");
                    used_pairs.insert((citing, k));
                    career_refs[citing].push(career_papers[k].0);
                    events.push(CitationEvent {
                        year,
                        target_index: (k + 1) as u32,
                        kind,
                        citing_paper_id: career_papers[citing].0,
                    });
                }
            }
        }

        for &(k, _) in &year_events {
            counts[k] += 1;
            total += 1;
        }
    }

    let mut records: Vec<PaperRecord> = career_papers
        .iter()
        .zip(career_refs)
        .map(|(&(paper_id, year), reference_ids)| PaperRecord {
            paper_id,
            year,
            author_ids: vec![author_id],
            reference_ids,
        })
        .collect();
    records.extend(external_records);

    let stream = EventStream::from_parts(career, events)
        .expect("generated targets are always published");
    Ok(SynthAuthor {
        author_id,
        stream,
        records,
    })
}

/// Generate just the stream for a single author (id 1).
pub fn generate_stream(profile: &SynthProfile) -> Result<EventStream, SynthError> {
    Ok(generate_author(profile, AuthorId(1))?.stream)
}

/// Generate a cohort of `n_authors` authors with ids `1..=n`. Each author's
/// profile comes from `profile_of(index)` (0-based) and gets an independent
/// per-author seed derived from `base_seed`, overriding the profile's own.
pub fn generate_cohort(
    n_authors: usize,
    mut profile_of: impl FnMut(usize) -> SynthProfile,
    base_seed: u64,
) -> Result<Vec<SynthAuthor>, SynthError> {
    let mut authors = Vec::with_capacity(n_authors);
    for i in 0..n_authors {
        let mut profile = profile_of(i);
        profile.seed = mix_seed(base_seed, 0x5eed_0000_0000_0000 | i as u64);
        authors.push(generate_author(&profile, AuthorId(i as u64 + 1))?);
    }
    Ok(authors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Corpus;
    use crate::estimator::estimate_author;
    use crate::events::{extract_events, self_fraction};
    use crate::likelihood::KindFilter;

    fn profile(rho_ext: f64, rho_self: f64, seed: u64) -> SynthProfile {
        SynthProfile {
            years: 6,
            start_year: 2000,
            papers_per_year: Schedule::constant(3),
            external_per_year: Schedule::from_vec(vec![5, 20, 40, 60, 60, 60]),
            self_per_year: Schedule::constant(2),
            rho_external: rho_ext,
            rho_self,
            seed,
        }
    }

    #[test]
    fn schedule_repeats_last() {
        let s = Schedule::from_vec(vec![3, 1]);
        assert_eq!(s.value_at(0), 3);
        assert_eq!(s.value_at(1), 1);
        assert_eq!(s.value_at(99), 1);
        assert_eq!(Schedule::constant(7).value_at(42), 7);
    }

    #[test]
    fn schedule_parsing() {
        let s: Schedule = "3, 2,1".parse().unwrap();
        assert_eq!(s, Schedule::from_vec(vec![3, 2, 1]));
        assert!("".parse::<Schedule>().is_err());
        assert!("1,x".parse::<Schedule>().is_err());
    }

    #[test]
    fn validation_errors() {
        let mut p = profile(0.5, 0.0, 1);
        p.rho_external = 1.5;
        assert_eq!(p.validate(), Err(SynthError::InvalidRho(1.5)));
        let mut p = profile(0.5, 0.0, 1);
        p.years = 0;
        assert_eq!(p.validate(), Err(SynthError::NoYears));
        let mut p = profile(0.5, 0.0, 1);
        p.papers_per_year = Schedule::from_vec(vec![0, 3]);
        assert_eq!(p.validate(), Err(SynthError::EmptyFirstYear));
        assert!(generate_author(&profile(0.5, 0.0, 1), AuthorId(1 << 40)).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let a = generate_author(&profile(0.6, 0.2, 42), AuthorId(1)).unwrap();
        let b = generate_author(&profile(0.6, 0.2, 42), AuthorId(1)).unwrap();
        assert_eq!(a, b);
        let c = generate_author(&profile(0.6, 0.2, 43), AuthorId(1)).unwrap();
        assert_ne!(a.stream, c.stream);
    }

    #[test]
    fn totals_match_schedules() {
        let author = generate_author(&profile(0.5, 0.1, 7), AuthorId(1)).unwrap();
        let totals = author.stream.totals();
        assert_eq!(totals.external, 5 + 20 + 40 + 60 + 60 + 60);
        assert_eq!(totals.self_citations, 12);
        let expected = 12.0 / (245.0 + 12.0);
        assert!((self_fraction(&author.stream).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn round_trip_through_corpus() {
        // Ingesting the materialized records reproduces the stream exactly:
        // same career, same events, same kinds.
        let author = generate_author(&profile(0.7, 0.3, 99), AuthorId(5)).unwrap();
        let (corpus, report) = Corpus::build(author.records.clone());
        assert_eq!(report.references_resolved, report.references_total);
        let extracted = extract_events(&corpus, AuthorId(5)).unwrap();
        assert_eq!(extracted.career(), author.stream.career());
        assert_eq!(extracted.events(), author.stream.events());
        assert_eq!(extracted.totals(), author.stream.totals());
        assert_eq!(extracted.exclusions().time_travel, 0);
        assert_eq!(extracted.exclusions().self_loops, 0);
    }

    #[test]
    fn rho_one_never_leaves_cited_set() {
        // Pure preferential attachment: once the first year fixes which
        // papers have citations, later external events can only hit those.
        let p = SynthProfile {
            years: 5,
            start_year: 2000,
            papers_per_year: Schedule::constant(4),
            external_per_year: Schedule::from_vec(vec![2, 30, 30, 30, 30]),
            self_per_year: Schedule::constant(0),
            rho_external: 1.0,
            rho_self: 0.0,
            seed: 11,
        };
        let stream = generate_stream(&p).unwrap();
        let first_year_targets: HashSet<u32> = stream
            .events()
            .iter()
            .filter(|e| e.year == 2000)
            .map(|e| e.target_index)
            .collect();
        for e in stream.events().iter().filter(|e| e.year > 2000) {
            assert!(
                first_year_targets.contains(&e.target_index),
                "year {} hit uncited paper {}",
                e.year,
                e.target_index
            );
        }
    }

    #[test]
    fn rho_zero_targets_are_uniform() {
        // Chi-square goodness of fit against the uniform allocation. Five
        // papers in year one, all citations arrive in year two; df = 4 and
        // the 1% critical value is 13.2767.
        let p = SynthProfile {
            years: 2,
            start_year: 2000,
            papers_per_year: Schedule::from_vec(vec![5, 0]),
            external_per_year: Schedule::from_vec(vec![40, 10_000]),
            self_per_year: Schedule::constant(0),
            rho_external: 0.0,
            rho_self: 0.0,
            seed: 123,
        };
        let stream = generate_stream(&p).unwrap();
        let mut observed = [0f64; 5];
        let mut n = 0f64;
        for e in stream.events().iter().filter(|e| e.year == 2001) {
            observed[(e.target_index - 1) as usize] += 1.0;
            n += 1.0;
        }
        let expected = n / 5.0;
        let chi2: f64 = observed.iter().map(|o| (o - expected).powi(2) / expected).sum();
        assert!(chi2 < 13.2767, "chi2 = {chi2}, observed {observed:?}");
    }

    #[test]
    fn estimator_recovers_rho_smoke() {
        let p = SynthProfile {
            years: 8,
            start_year: 2000,
            papers_per_year: Schedule::constant(3),
            external_per_year: Schedule::from_vec(vec![10, 50, 120, 200, 200, 200, 200, 200]),
            self_per_year: Schedule::constant(0),
            rho_external: 0.5,
            rho_self: 0.0,
            seed: 2024,
        };
        let stream = generate_stream(&p).unwrap();
        let est = estimate_author(&stream, KindFilter::All, 1e-7).unwrap();
        assert!(
            (est.rho_hat - 0.5).abs() < 0.1,
            "recovered {} from {} identifiable events",
            est.rho_hat,
            est.events_identifiable
        );
    }

    #[test]
    fn self_capacity_error() {
        // One paper per year cannot self-cite itself: any self-citation in
        // year one is impossible to materialize.
        let p = SynthProfile {
            years: 1,
            start_year: 2000,
            papers_per_year: Schedule::constant(1),
            external_per_year: Schedule::constant(0),
            self_per_year: Schedule::constant(1),
            rho_external: 0.0,
            rho_self: 0.0,
            seed: 1,
        };
        assert!(matches!(
            generate_stream(&p),
            Err(SynthError::SelfCapacityExhausted { year: 2000, .. })
        ));
    }

    #[test]
    fn cohort_ids_and_seeds() {
        let cohort = generate_cohort(4, |_| profile(0.5, 0.1, 0), 77).unwrap();
        assert_eq!(cohort.len(), 4);
        for (i, a) in cohort.iter().enumerate() {
            assert_eq!(a.author_id, AuthorId(i as u64 + 1));
        }
        // Authors are independent draws, not copies.
        assert_ne!(cohort[0].stream.events(), cohort[1].stream.events());
        // Cohorts are reproducible.
        let again = generate_cohort(4, |_| profile(0.5, 0.1, 0), 77).unwrap();
        assert_eq!(cohort, again);
        // Records across authors never collide.
        let all: Vec<_> = cohort.iter().flat_map(|a| a.records.clone()).collect();
        let (corpus, report) = Corpus::build(all.clone());
        assert_eq!(corpus.len(), all.len());
        assert_eq!(report.papers_dropped_duplicate_id, 0);
    }
}
