//! Counterfactual h-index simulation: what do self-citations do to h?
//!
//! Both variants replay an author's observed citation volumes (how many
//! external and self citations arrived each year) but re-allocate them
//! synthetically over the career:
//!
//! - **Variant A** drops self-citations entirely and allocates each external
//!   citation preferentially over the accumulated counts (uniform while
//!   nothing has been cited).
//! - **Variant B** keeps self-citations: each self-citation lands uniformly
//!   on a paper published in an earlier year (or any existing paper when
//!   there is no earlier one), and external citations attach preferentially
//!   to the *combined* external-plus-self counts. The final h-index still
//!   counts external citations only — self-citations act purely through the
//!   attachment feedback.
//!
//! External draws consume a dedicated RNG stream, identical in both
//! variants, so for an author with no self-citations the two variants make
//! literally the same draws and their h-indices agree exactly.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::AuthorId;
use crate::events::{CitationKind, EventStream};
use crate::synth::mix_seed;

const SALT_EXTERNAL: u64 = 0x4558_5445_524e_414c;
const SALT_SELF: u64 = 0x5345_4c46_4349_5445;
const SALT_REPLICATE: u64 = 0x5245_504c_4943_4154;

/// Observed citation volume for one career year.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct YearLoad {
    year: i32,
    external: u64,
    selfs: u64,
}

fn year_loads(stream: &EventStream) -> Vec<YearLoad> {
    let mut loads: Vec<YearLoad> = Vec::new();
    for e in stream.events() {
        if loads.last().map(|l| l.year) != Some(e.year) {
            loads.push(YearLoad {
                year: e.year,
                external: 0,
                selfs: 0,
            });
        }
        let last = loads.last_mut().expect("just pushed");
        match e.kind {
            CitationKind::External => last.external += 1,
            CitationKind::SelfCitation => last.selfs += 1,
        }
    }
    loads
}

fn weighted_pick(rng: &mut ChaCha8Rng, counts: &[u64], total: u64) -> usize {
    let mut v = rng.random_range(0..total);
    for (k, &c) in counts.iter().enumerate() {
        if v < c {
            return k;
        }
        v -= c;
    }
    unreachable!("total is the sum of counts");
}

/// Variant A: self-citations removed, externals attach preferentially.
/// Returns external citations per career paper.
pub fn simulate_without_self(stream: &EventStream, seed: u64) -> Vec<u64> {
    let career = stream.career();
    let mut counts = vec![0u64; career.len()];
    let mut total = 0u64;
    let mut ext_rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, SALT_EXTERNAL));

    for load in year_loads(stream) {
        let n = career.n_of(load.year);
        let mut pending = Vec::with_capacity(load.external as usize);
        for _ in 0..load.external {
            let k = if total > 0 {
                weighted_pick(&mut ext_rng, &counts[..n], total)
            } else {
                ext_rng.random_range(0..n)
            };
            pending.push(k);
        }
        for k in pending {
            counts[k] += 1;
            total += 1;
        }
    }
    counts
}

/// Variant B: self-citations land uniformly on earlier papers and feed the
/// attachment that external citations follow. Returns *external* citations
/// per career paper; the self counts only shape the process.
pub fn simulate_with_self(stream: &EventStream, seed: u64) -> Vec<u64> {
    let career = stream.career();
    let len = career.len();
    let mut external = vec![0u64; len];
    let mut combined = vec![0u64; len];
    let mut combined_total = 0u64;
    let mut ext_rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, SALT_EXTERNAL));
    let mut self_rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, SALT_SELF));

    for load in year_loads(stream) {
        let n = career.n_of(load.year);
        let n_prev = career.n_before(load.year);
        let mut pending_ext = Vec::with_capacity(load.external as usize);
        let mut pending_self = Vec::with_capacity(load.selfs as usize);
        for _ in 0..load.external {
            let k = if combined_total > 0 {
                weighted_pick(&mut ext_rng, &combined[..n], combined_total)
            } else {
                ext_rng.random_range(0..n)
            };
            pending_ext.push(k);
        }
        for _ in 0..load.selfs {
            let k = if n_prev > 0 {
                self_rng.random_range(0..n_prev)
            } else {
                self_rng.random_range(0..n)
            };
            pending_self.push(k);
        }
        for k in pending_ext {
            external[k] += 1;
            combined[k] += 1;
            combined_total += 1;
        }
        for k in pending_self {
            combined[k] += 1;
            combined_total += 1;
        }
    }
    external
}

/// Largest `h` such that at least `h` entries are `>= h`.
pub fn h_index(counts: &[u64]) -> usize {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted
        .iter()
        .enumerate()
        .take_while(|&(i, &c)| c >= i as u64 + 1)
        .count()
}

/// One simulated (author, replicate) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOutcome {
    pub author_id: AuthorId,
    pub replicate: u32,
    pub seed: u64,
    /// Variant A: h-index with self-citations removed.
    pub h_without_self: u32,
    /// Variant B: external h-index with self-citation feedback.
    pub h_with_self: u32,
}

/// Joint distribution of `(h_without, h_with)` across outcomes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HIndexHistogram {
    pub cells: BTreeMap<(u32, u32), u64>,
}

impl HIndexHistogram {
    pub fn add(&mut self, h_without: u32, h_with: u32) {
        *self.cells.entry((h_without, h_with)).or_insert(0) += 1;
    }

    pub fn total(&self) -> u64 {
        self.cells.values().sum()
    }

    /// Mean of `h_with - h_without`; `None` when empty.
    pub fn mean_delta(&self) -> Option<f64> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        let sum: f64 = self
            .cells
            .iter()
            .map(|(&(a, b), &cnt)| (b as f64 - a as f64) * cnt as f64)
            .sum();
        Some(sum / total as f64)
    }

    /// Mean `h_with` for each observed `h_without` value.
    pub fn mean_with_by_without(&self) -> BTreeMap<u32, f64> {
        let mut sums: BTreeMap<u32, (f64, u64)> = BTreeMap::new();
        for (&(a, b), &cnt) in &self.cells {
            let entry = sums.entry(a).or_insert((0.0, 0));
            entry.0 += b as f64 * cnt as f64;
            entry.1 += cnt;
        }
        sums.into_iter()
            .map(|(a, (sum, cnt))| (a, sum / cnt as f64))
            .collect()
    }

    /// True when every outcome lies on the diagonal `h_with == h_without`.
    pub fn is_diagonal(&self) -> bool {
        self.cells.keys().all(|&(a, b)| a == b)
    }
}

/// Run both variants for every stream, `replicates` times each with
/// independent derived seeds. Outcomes are ordered by `(author position,
/// replicate)` and are reproducible for a given `base_seed`.
pub fn run_hindex_experiment(
    streams: &[EventStream],
    replicates: u32,
    base_seed: u64,
) -> (Vec<SimOutcome>, HIndexHistogram) {
    let jobs: Vec<(usize, u32)> = (0..streams.len())
        .flat_map(|i| (0..replicates).map(move |r| (i, r)))
        .collect();

    let outcomes: Vec<SimOutcome> = jobs
        .par_iter()
        .map(|&(i, replicate)| {
            let stream = &streams[i];
            let seed = mix_seed(
                mix_seed(base_seed, stream.author_id().0),
                SALT_REPLICATE ^ replicate as u64,
            );
            let h_without = h_index(&simulate_without_self(stream, seed)) as u32;
            let h_with = h_index(&simulate_with_self(stream, seed)) as u32;
            SimOutcome {
                author_id: stream.author_id(),
                replicate,
                seed,
                h_without_self: h_without,
                h_with_self: h_with,
            }
        })
        .collect();

    let mut histogram = HIndexHistogram::default();
    for o in &outcomes {
        histogram.add(o.h_without_self, o.h_with_self);
    }
    (outcomes, histogram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_cohort, generate_stream, Schedule, SynthProfile};
    use proptest::prelude::*;

    fn zero_self_profile(seed: u64) -> SynthProfile {
        SynthProfile {
            years: 8,
            start_year: 2000,
            papers_per_year: Schedule::constant(3),
            external_per_year: Schedule::from_vec(vec![5, 15, 30, 40, 40, 40, 40, 40]),
            self_per_year: Schedule::constant(0),
            rho_external: 0.6,
            rho_self: 0.0,
            seed,
        }
    }

    fn selfy_profile(seed: u64) -> SynthProfile {
        SynthProfile {
            self_per_year: Schedule::from_vec(vec![2, 6, 8, 8, 8, 8, 8, 8]),
            rho_self: 0.0,
            ..zero_self_profile(seed)
        }
    }

    #[test]
    fn h_index_basics() {
        assert_eq!(h_index(&[]), 0);
        assert_eq!(h_index(&[0, 0]), 0);
        assert_eq!(h_index(&[1]), 1);
        assert_eq!(h_index(&[5, 4, 3, 2, 1]), 3);
        assert_eq!(h_index(&[3, 3, 3]), 3);
        assert_eq!(h_index(&[10, 10]), 2);
        assert_eq!(h_index(&[2, 9, 4, 0, 1]), 2);
    }

    proptest! {
        /// Agreement with the definition applied by brute force.
        #[test]
        fn h_index_matches_definition(counts in proptest::collection::vec(0u64..30, 0..25)) {
            let h = h_index(&counts);
            let brute = (0..=counts.len())
                .filter(|&k| counts.iter().filter(|&&c| c >= k as u64).count() >= k)
                .max()
                .unwrap_or(0);
            prop_assert_eq!(h, brute);
        }
    }

    #[test]
    fn variants_conserve_external_volume() {
        let stream = generate_stream(&selfy_profile(3)).unwrap();
        let a = simulate_without_self(&stream, 99);
        let b = simulate_with_self(&stream, 99);
        let ext_total = stream.totals().external;
        assert_eq!(a.iter().sum::<u64>(), ext_total);
        assert_eq!(b.iter().sum::<u64>(), ext_total);
    }

    #[test]
    fn zero_self_streams_make_identical_draws() {
        let stream = generate_stream(&zero_self_profile(5)).unwrap();
        for seed in [0u64, 1, 42, 0xdead_beef] {
            let a = simulate_without_self(&stream, seed);
            let b = simulate_with_self(&stream, seed);
            assert_eq!(a, b, "seed {seed}");
        }
    }

    #[test]
    fn simulation_deterministic_in_seed() {
        let stream = generate_stream(&selfy_profile(8)).unwrap();
        assert_eq!(
            simulate_with_self(&stream, 7),
            simulate_with_self(&stream, 7)
        );
        assert_ne!(
            simulate_with_self(&stream, 7),
            simulate_with_self(&stream, 8)
        );
    }

    #[test]
    fn experiment_histogram_accounts_everything() {
        let cohort = generate_cohort(6, |_| selfy_profile(0), 31).unwrap();
        let streams: Vec<_> = cohort.into_iter().map(|a| a.stream).collect();
        let (outcomes, hist) = run_hindex_experiment(&streams, 4, 123);
        assert_eq!(outcomes.len(), 24);
        assert_eq!(hist.total(), 24);
        let (again, hist2) = run_hindex_experiment(&streams, 4, 123);
        assert_eq!(outcomes, again);
        assert_eq!(hist, hist2);
    }

    #[test]
    fn zero_self_cohort_sits_on_diagonal() {
        let cohort = generate_cohort(5, |_| zero_self_profile(0), 64).unwrap();
        let streams: Vec<_> = cohort.into_iter().map(|a| a.stream).collect();
        let (_, hist) = run_hindex_experiment(&streams, 3, 9);
        assert!(hist.is_diagonal());
        assert_eq!(hist.mean_delta(), Some(0.0));
    }

    #[test]
    fn self_citations_inflate_h_on_average() {
        let cohort = generate_cohort(30, |_| selfy_profile(0), 2718).unwrap();
        let streams: Vec<_> = cohort.into_iter().map(|a| a.stream).collect();
        let (_, hist) = run_hindex_experiment(&streams, 5, 202);
        let delta = hist.mean_delta().unwrap();
        assert!(delta > 0.0, "mean delta = {delta}");
    }

    #[test]
    fn empty_histogram_mean_none() {
        assert_eq!(HIndexHistogram::default().mean_delta(), None);
    }
}
