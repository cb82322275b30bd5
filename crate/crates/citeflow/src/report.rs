//! Aggregation of per-author results into the tables behind the figures:
//! rho histograms, rho versus citability, self-citation fractions, and
//! career-cohort estimates.
//!
//! Every aggregation accounts for its inputs exactly: whatever does not land
//! in a bin is itemized in an `excluded` map, so bin counts plus exclusions
//! always reproduce the input size.

use std::collections::BTreeMap;
use std::io::Write;

use thiserror::Error;

use crate::corpus::AuthorId;
use crate::estimator::{estimate_aggregate, EstimationResult};
use crate::events::{self_fraction, career_start_cohorts, EventStream};
use crate::likelihood::KindFilter;

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("bin edges must be strictly ascending and at least two, got {0:?}")]
    BadBins(Vec<f64>),
    #[error("log bins need 0 < lo < hi, got [{0}, {1}]")]
    BadLogRange(f64, f64),
    #[error("no event stream for estimated author(s) {0:?}")]
    MissingStreams(Vec<AuthorId>),
    #[error("csv error: {0}")]
    Csv(String),
}

impl From<csv::Error> for ReportError {
    fn from(e: csv::Error) -> ReportError {
        ReportError::Csv(e.to_string())
    }
}

/// Bin edges over a numeric axis. Bin `i` covers `[edges[i], edges[i+1])`;
/// the last bin also includes its upper edge so the hi endpoint is binnable.
#[derive(Debug, Clone, PartialEq)]
pub struct Bins {
    edges: Vec<f64>,
}

impl Bins {
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Bins, ReportError> {
        if n == 0 || !(lo < hi) {
            return Err(ReportError::BadBins(vec![lo, hi]));
        }
        let edges = (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .collect();
        Ok(Bins { edges })
    }

    /// Geometric edges, for heavy-tailed axes like citation counts.
    pub fn logarithmic(lo: f64, hi: f64, n: usize) -> Result<Bins, ReportError> {
        if n == 0 || !(lo > 0.0) || !(lo < hi) {
            return Err(ReportError::BadLogRange(lo, hi));
        }
        let ratio = hi / lo;
        let edges = (0..=n)
            .map(|i| lo * ratio.powf(i as f64 / n as f64))
            .collect();
        Ok(Bins { edges })
    }

    pub fn from_edges(edges: Vec<f64>) -> Result<Bins, ReportError> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(ReportError::BadBins(edges));
        }
        Ok(Bins { edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn bounds(&self, i: usize) -> (f64, f64) {
        (self.edges[i], self.edges[i + 1])
    }

    pub fn index_of(&self, x: f64) -> Option<usize> {
        if !x.is_finite() {
            return None;
        }
        let n = self.len();
        if x < self.edges[0] || x > self.edges[n] {
            return None;
        }
        if x == self.edges[n] {
            return Some(n - 1);
        }
        Some(self.edges.partition_point(|&e| e <= x) - 1)
    }
}

/// Counts per bin plus itemized exclusions.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram1D {
    pub bins: Bins,
    pub counts: Vec<u64>,
    pub excluded: BTreeMap<String, u64>,
}

impl Histogram1D {
    fn new(bins: Bins) -> Histogram1D {
        let counts = vec![0; bins.len()];
        Histogram1D {
            bins,
            counts,
            excluded: BTreeMap::new(),
        }
    }

    fn add(&mut self, x: f64) {
        match self.bins.index_of(x) {
            Some(i) => self.counts[i] += 1,
            None => self.exclude("out_of_range"),
        }
    }

    fn exclude(&mut self, reason: &str) {
        *self.excluded.entry(reason.to_string()).or_insert(0) += 1;
    }

    pub fn total_binned(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn total_excluded(&self) -> u64 {
        self.excluded.values().sum()
    }
}

/// Per-bin running means of a y-value over an x-axis.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedMeans {
    pub bins: Bins,
    pub counts: Vec<u64>,
    pub sums: Vec<f64>,
    pub excluded: BTreeMap<String, u64>,
}

impl BinnedMeans {
    fn new(bins: Bins) -> BinnedMeans {
        let n = bins.len();
        BinnedMeans {
            bins,
            counts: vec![0; n],
            sums: vec![0.0; n],
            excluded: BTreeMap::new(),
        }
    }

    fn add(&mut self, x: f64, y: f64) {
        match self.bins.index_of(x) {
            Some(i) => {
                self.counts[i] += 1;
                self.sums[i] += y;
            }
            None => self.exclude("out_of_range"),
        }
    }

    fn exclude(&mut self, reason: &str) {
        *self.excluded.entry(reason.to_string()).or_insert(0) += 1;
    }

    pub fn mean(&self, i: usize) -> Option<f64> {
        if self.counts[i] == 0 {
            None
        } else {
            Some(self.sums[i] / self.counts[i] as f64)
        }
    }

    pub fn total_binned(&self) -> u64 {
        self.counts.iter().sum()
    }
}

fn usable(result: &EstimationResult) -> Result<(), &'static str> {
    if result.unidentifiable {
        Err("unidentifiable")
    } else if !result.converged {
        Err("not_converged")
    } else {
        Ok(())
    }
}

/// Distribution of fitted rho values. Authors whose fit carries no
/// information (or failed to converge) are excluded and itemized.
pub fn rho_histogram(results: &[(AuthorId, EstimationResult)], bins: &Bins) -> Histogram1D {
    let mut hist = Histogram1D::new(bins.clone());
    for (_, r) in results {
        match usable(r) {
            Ok(()) => hist.add(r.rho_hat),
            Err(reason) => hist.exclude(reason),
        }
    }
    hist
}

/// Mean fitted rho as a function of citability (total citations received).
/// Every estimated author must have a stream; ids without one are an error.
pub fn rho_vs_citability(
    results: &[(AuthorId, EstimationResult)],
    streams: &[EventStream],
    bins: &Bins,
) -> Result<BinnedMeans, ReportError> {
    let by_author: BTreeMap<AuthorId, &EventStream> =
        streams.iter().map(|s| (s.author_id(), s)).collect();
    let missing: Vec<AuthorId> = results
        .iter()
        .map(|(a, _)| *a)
        .filter(|a| !by_author.contains_key(a))
        .collect();
    if !missing.is_empty() {
        return Err(ReportError::MissingStreams(missing));
    }

    let mut means = BinnedMeans::new(bins.clone());
    for (author, r) in results {
        match usable(r) {
            Ok(()) => {
                let citations = by_author[author].totals().total();
                means.add(citations as f64, r.rho_hat);
            }
            Err(reason) => means.exclude(reason),
        }
    }
    Ok(means)
}

/// Self-citation prevalence: per-author fraction histogram plus the pooled
/// fraction (all self events over all events).
#[derive(Debug, Clone, PartialEq)]
pub struct SelfFractionStats {
    pub histogram: Histogram1D,
    /// Total self-citations over total citations, pooled across authors.
    pub pooled_fraction: Option<f64>,
    /// Unweighted mean of per-author fractions.
    pub mean_author_fraction: Option<f64>,
}

pub fn self_fraction_stats(streams: &[EventStream], bins: &Bins) -> SelfFractionStats {
    let mut histogram = Histogram1D::new(bins.clone());
    let mut pooled_self = 0u64;
    let mut pooled_total = 0u64;
    let mut frac_sum = 0.0;
    let mut frac_count = 0u64;
    for s in streams {
        let totals = s.totals();
        pooled_self += totals.self_citations;
        pooled_total += totals.total();
        match self_fraction(s) {
            Some(f) => {
                histogram.add(f);
                frac_sum += f;
                frac_count += 1;
            }
            None => histogram.exclude("no_events"),
        }
    }
    SelfFractionStats {
        histogram,
        pooled_fraction: (pooled_total > 0).then(|| pooled_self as f64 / pooled_total as f64),
        mean_author_fraction: (frac_count > 0).then(|| frac_sum / frac_count as f64),
    }
}

/// Aggregate estimate per career-start cohort.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortRow {
    pub start_year: i32,
    pub authors: u64,
    pub result: EstimationResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohortTable {
    pub rows: Vec<CohortRow>,
    pub skipped: BTreeMap<String, u64>,
}

/// Fit one rho per cohort of authors sharing a first-publication year.
/// Cohorts smaller than `min_authors` or without identifiable events are
/// skipped and counted.
pub fn cohort_rho(
    streams: &[EventStream],
    filter: KindFilter,
    tol: f64,
    min_authors: usize,
) -> CohortTable {
    let mut rows = Vec::new();
    let mut skipped = BTreeMap::new();
    for (start_year, members) in career_start_cohorts(streams) {
        if members.len() < min_authors {
            *skipped.entry("too_few_authors".to_string()).or_insert(0) += 1;
            continue;
        }
        let owned: Vec<EventStream> = members.iter().map(|&s| s.clone()).collect();
        let result = estimate_aggregate(&owned, filter, tol)
            .expect("tolerance and rho bounds are fixed here");
        if result.unidentifiable {
            *skipped.entry("unidentifiable".to_string()).or_insert(0) += 1;
            continue;
        }
        rows.push(CohortRow {
            start_year,
            authors: members.len() as u64,
            result,
        });
    }
    CohortTable { rows, skipped }
}

// ---------------------------------------------------------------------------
// Delimited writers for the tables above
// ---------------------------------------------------------------------------

pub fn write_histogram_csv<W: Write>(hist: &Histogram1D, writer: W) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["bin_lo", "bin_hi", "count"])?;
    for i in 0..hist.bins.len() {
        let (lo, hi) = hist.bins.bounds(i);
        w.write_record([format!("{lo}"), format!("{hi}"), hist.counts[i].to_string()])?;
    }
    w.flush().map_err(|e| ReportError::Csv(e.to_string()))?;
    Ok(())
}

pub fn write_binned_means_csv<W: Write>(
    means: &BinnedMeans,
    y_name: &str,
    writer: W,
) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["bin_lo", "bin_hi", "count", &format!("mean_{y_name}")])?;
    for i in 0..means.bins.len() {
        let (lo, hi) = means.bins.bounds(i);
        let mean = means
            .mean(i)
            .map(|m| format!("{m}"))
            .unwrap_or_default();
        w.write_record([
            format!("{lo}"),
            format!("{hi}"),
            means.counts[i].to_string(),
            mean,
        ])?;
    }
    w.flush().map_err(|e| ReportError::Csv(e.to_string()))?;
    Ok(())
}

pub fn write_cohort_csv<W: Write>(table: &CohortTable, writer: W) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["start_year", "authors", "rho_hat", "events_used", "loglik"])?;
    for row in &table.rows {
        w.write_record([
            row.start_year.to_string(),
            row.authors.to_string(),
            format!("{}", row.result.rho_hat),
            row.result.events_used.to_string(),
            format!("{}", row.result.loglik_at_max),
        ])?;
    }
    w.flush().map_err(|e| ReportError::Csv(e.to_string()))?;
    Ok(())
}
