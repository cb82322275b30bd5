//! Log-likelihood of a citation stream under the mixture allocation model.
//!
//! Within one career, a citation arriving in year `t` picks paper `k` with
//! probability
//!
//! ```text
//! p(k) = rho * X_k / sum_i X_i  +  (1 - rho) / N(t)
//! ```
//!
//! where `X` is the vector of citations accumulated by each career paper
//! *before* year `t` (papers first published in year `t` enter with zero)
//! and `N(t)` counts career papers published by year `t`. When no paper has
//! any prior citation the preferential term is undefined and the allocation
//! is uniform: `p(k) = 1 / N(t)`, independent of `rho`.
//!
//! The per-author log-likelihood is the sum of `ln p` over that author's
//! events; the population value sums over authors. Sums use Neumaier
//! compensation in a canonical order so results do not depend on thread
//! scheduling.

use rayon::prelude::*;
use thiserror::Error;

use crate::events::{CitationKind, EventStream};

/// Which events enter the likelihood sum. State replay always feeds on all
/// events regardless of the filter: self-citations still accumulate on the
/// papers external citations then prefer, and vice versa.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum KindFilter {
    #[default]
    All,
    ExternalOnly,
    SelfOnly,
}

impl KindFilter {
    pub fn admits(&self, kind: CitationKind) -> bool {
        match self {
            KindFilter::All => true,
            KindFilter::ExternalOnly => kind == CitationKind::External,
            KindFilter::SelfOnly => kind == CitationKind::SelfCitation,
        }
    }
}

impl std::fmt::Display for KindFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KindFilter::All => write!(f, "all"),
            KindFilter::ExternalOnly => write!(f, "external"),
            KindFilter::SelfOnly => write!(f, "self"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LikelihoodError {
    #[error("rho must lie in [0, 1], got {0}")]
    RhoOutOfRange(f64),
    #[error("paper index {index} out of range for a state of {len} papers")]
    IndexOutOfRange { index: u32, len: usize },
    #[error("state is empty: no paper can receive a citation")]
    EmptyState,
}

/// Citation counts per career paper at the start of a year. `total` is the
/// sum of `counts`; entries for papers published in the state's year are
/// zero.
#[derive(Debug, Clone, PartialEq)]
pub struct YearState {
    pub counts: Vec<u64>,
    pub total: u64,
}

impl YearState {
    pub fn new(counts: Vec<u64>) -> YearState {
        let total = counts.iter().sum();
        YearState { counts, total }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Probability that a citation lands on career paper `target_index`
/// (1-based) given the year-start state. Exact mixture when any prior
/// citation exists, otherwise the degenerate uniform `1/N`.
pub fn event_probability(
    state: &YearState,
    target_index: u32,
    rho: f64,
) -> Result<f64, LikelihoodError> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(LikelihoodError::RhoOutOfRange(rho));
    }
    if state.is_empty() {
        return Err(LikelihoodError::EmptyState);
    }
    let n = state.len();
    if target_index == 0 || target_index as usize > n {
        return Err(LikelihoodError::IndexOutOfRange {
            index: target_index,
            len: n,
        });
    }
    let inv_n = 1.0 / n as f64;
    if state.total == 0 {
        return Ok(inv_n);
    }
    let pref = state.counts[(target_index - 1) as usize] as f64 / state.total as f64;
    Ok(rho * pref + (1.0 - rho) * inv_n)
}

/// Neumaier-compensated accumulator: like Kahan summation but robust when
/// the addend exceeds the running sum in magnitude.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// One event, compiled to the two mixture coefficients so the likelihood can
/// be re-evaluated at many `rho` values without replaying state.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EventTerm {
    /// `X_k / sum X` at the event's year start (0 when degenerate).
    pref: f64,
    /// `1 / N(t)` at the event's year.
    inv_n: f64,
    /// Year-start total was zero: probability is `inv_n` for every rho.
    degenerate: bool,
    kind: CitationKind,
}

impl EventTerm {
    fn probability(&self, rho: f64) -> f64 {
        if self.degenerate {
            self.inv_n
        } else {
            rho * self.pref + (1.0 - rho) * self.inv_n
        }
    }

    /// An event pins down `rho` only if its probability actually varies
    /// with it.
    fn identifiable(&self) -> bool {
        !self.degenerate && self.pref != self.inv_n
    }
}

/// Replay a stream once, producing one term per event. Terms appear in
/// event order. State updates apply all events; the kind only tags the term
/// for later filtering.
pub(crate) fn compile_terms(stream: &EventStream) -> Vec<EventTerm> {
    let career = stream.career();
    let mut counts = vec![0u64; career.len()];
    let mut total = 0u64;
    let mut terms = Vec::with_capacity(stream.events().len());

    let events = stream.events();
    let mut i = 0;
    while i < events.len() {
        let year = events[i].year;
        let n = career.n_of(year);
        // Freeze the year-start view: all events of this year see the same
        // state, accumulated strictly before it.
        let year_total = total;
        let mut j = i;
        while j < events.len() && events[j].year == year {
            let e = &events[j];
            let idx = (e.target_index - 1) as usize;
            let inv_n = 1.0 / n as f64;
            let term = if year_total == 0 {
                EventTerm {
                    pref: 0.0,
                    inv_n,
                    degenerate: true,
                    kind: e.kind,
                }
            } else {
                EventTerm {
                    pref: counts[idx] as f64 / year_total as f64,
                    inv_n,
                    degenerate: false,
                    kind: e.kind,
                }
            };
            terms.push(term);
            j += 1;
        }
        // Commit the whole year.
        for e in &events[i..j] {
            counts[(e.target_index - 1) as usize] += 1;
            total += 1;
        }
        i = j;
    }
    terms
}

/// A log-likelihood value with the event counts behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLik {
    pub value: f64,
    /// Events admitted by the filter.
    pub events_used: u64,
    /// Admitted events whose probability varies with rho.
    pub events_identifiable: u64,
}

pub(crate) fn eval_terms(terms: &[EventTerm], rho: f64, filter: KindFilter) -> LogLik {
    let mut acc = CompensatedSum::default();
    let mut events_used = 0u64;
    let mut events_identifiable = 0u64;
    let mut hit_zero = false;
    for term in terms {
        if !filter.admits(term.kind) {
            continue;
        }
        events_used += 1;
        if term.identifiable() {
            events_identifiable += 1;
        }
        let p = term.probability(rho);
        if p <= 0.0 {
            // ln 0: the whole product is zero. Skip the addend so the
            // compensation never sees an infinity, and report -inf.
            hit_zero = true;
        } else {
            acc.add(p.ln());
        }
    }
    LogLik {
        value: if hit_zero { f64::NEG_INFINITY } else { acc.value() },
        events_used,
        events_identifiable,
    }
}

/// Log-likelihood of one author's stream at `rho`, over events admitted by
/// `filter`.
pub fn author_loglik(
    stream: &EventStream,
    rho: f64,
    filter: KindFilter,
) -> Result<LogLik, LikelihoodError> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(LikelihoodError::RhoOutOfRange(rho));
    }
    Ok(eval_terms(&compile_terms(stream), rho, filter))
}

/// Population log-likelihood: the sum of per-author values, accumulated in
/// author-id order. Per-author terms are compiled in parallel; the final
/// reduction is sequential and deterministic.
pub fn aggregate_loglik(
    streams: &[EventStream],
    rho: f64,
    filter: KindFilter,
) -> Result<LogLik, LikelihoodError> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(LikelihoodError::RhoOutOfRange(rho));
    }
    let mut order: Vec<usize> = (0..streams.len()).collect();
    order.sort_by_key(|&i| (streams[i].author_id(), i));

    let per_author: Vec<LogLik> = order
        .par_iter()
        .map(|&i| eval_terms(&compile_terms(&streams[i]), rho, filter))
        .collect();

    let mut acc = CompensatedSum::default();
    let mut events_used = 0;
    let mut events_identifiable = 0;
    let mut hit_zero = false;
    for ll in &per_author {
        events_used += ll.events_used;
        events_identifiable += ll.events_identifiable;
        if ll.value == f64::NEG_INFINITY {
            hit_zero = true;
        } else {
            acc.add(ll.value);
        }
    }
    Ok(LogLik {
        value: if hit_zero { f64::NEG_INFINITY } else { acc.value() },
        events_used,
        events_identifiable,
    })
}

/// Evaluate the aggregate log-likelihood on a grid of `rho` values. Streams
/// are compiled once; points outside `[0, 1]` are rejected up front.
pub fn loglik_curve(
    streams: &[EventStream],
    filter: KindFilter,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>, LikelihoodError> {
    for &rho in grid {
        if !(0.0..=1.0).contains(&rho) {
            return Err(LikelihoodError::RhoOutOfRange(rho));
        }
    }
    let mut order: Vec<usize> = (0..streams.len()).collect();
    order.sort_by_key(|&i| (streams[i].author_id(), i));
    let compiled: Vec<Vec<EventTerm>> = order
        .par_iter()
        .map(|&i| compile_terms(&streams[i]))
        .collect();

    Ok(grid
        .iter()
        .map(|&rho| {
            let mut acc = CompensatedSum::default();
            let mut hit_zero = false;
            for terms in &compiled {
                let ll = eval_terms(terms, rho, filter);
                if ll.value == f64::NEG_INFINITY {
                    hit_zero = true;
                } else {
                    acc.add(ll.value);
                }
            }
            let v = if hit_zero { f64::NEG_INFINITY } else { acc.value() };
            (rho, v)
        })
        .collect())
}

/// Parse a `start:end:step` grid specification into explicit points,
/// inclusive of the endpoint when the step lands on it.
pub fn parse_grid(spec: &str) -> Option<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return None;
    }
    let start: f64 = parts[0].trim().parse().ok()?;
    let end: f64 = parts[1].trim().parse().ok()?;
    let step: f64 = parts[2].trim().parse().ok()?;
    if !(step > 0.0) || end < start {
        return None;
    }
    let n = ((end - start) / step).round() as usize;
    let mut grid: Vec<f64> = (0..=n)
        .map(|i| start + i as f64 * step)
        .filter(|&x| x <= end + step * 1e-9)
        .collect();
    if let Some(last) = grid.last_mut() {
        if (*last - end).abs() < step * 1e-9 {
            *last = end;
        }
    }
    Some(grid)
}
