//! # citeflow
//!
//! How much of citation flow is rich-get-richer? `citeflow` fits, per
//! author, the fraction `rho` of citations allocated by preferential
//! attachment over the author's own papers — the rest land uniformly — by
//! maximizing the likelihood of the observed year-by-year citation events.
//! Self-citations and external citations can be fitted separately, and a
//! counterfactual simulation measures how self-citations feed back into the
//! h-index.
//!
//! The model: a citation arriving in year `t` picks career paper `k` with
//! probability `rho * X_k / sum(X) + (1 - rho) / N(t)`, where `X` counts
//! citations accumulated before year `t` and `N(t)` is the number of papers
//! published so far. The log-likelihood is concave in `rho`, so a
//! golden-section search finds the maximum to any tolerance.
//!
//! ## Quick start
//!
//! ```
//! use citeflow::synth::{SynthProfile, Schedule, generate_stream};
//! use citeflow::estimator::estimate_author;
//! use citeflow::likelihood::KindFilter;
//!
//! // A synthetic career with a known preferential fraction...
//! let profile = SynthProfile {
//!     years: 8,
//!     papers_per_year: Schedule::constant(3),
//!     external_per_year: Schedule::from_vec(vec![10, 50, 120, 200, 200, 200, 200, 200]),
//!     rho_external: 0.5,
//!     seed: 7,
//!     ..SynthProfile::default()
//! };
//! let stream = generate_stream(&profile).unwrap();
//!
//! // ...is recovered by the estimator.
//! let fit = estimate_author(&stream, KindFilter::All, 1e-7).unwrap();
//! assert!((fit.rho_hat - 0.5).abs() < 0.1);
//! ```
//!
//! ## Tour by example
//!
//! The `examples/` directory is the front door; each one exercises a major
//! capability end to end (`cargo run --example <name>`):
//!
//! - `ingest_and_stats` — build a corpus from a JSON dump or table, summarize it
//! - `career_events` — extract one author's classified citation events
//! - `likelihood_curve` — trace the concave log-likelihood over a rho grid
//! - `estimate_rho` — per-author and pooled fits for all/external/self citations
//! - `synthetic_recovery` — generate cohorts with known rho and recover it
//! - `hindex_simulation` — the self-citation h-index experiment
//! - `figure_tables` — histograms, citability profiles, and cohort tables
//!
//! The same capabilities are scriptable through the thin `citeflow` binary
//! (`ingest`, `events`, `curve`, `estimate`, `synth`, `simulate`,
//! `report`), which adds file formats, caching, and run manifests on top.
//!
//! ## Layout
//!
//! - [`corpus`] — paper records, ingestion, the binary cache
//! - [`events`] — careers and per-author citation event streams
//! - [`likelihood`] — the mixture model and its log-likelihood
//! - [`estimator`] — concave maximization and estimation results
//! - [`synth`] — seeded generators with known ground truth
//! - [`simulator`] — the h-index counterfactual
//! - [`report`] — binning and figure tables

pub mod corpus;
pub mod estimator;
pub mod events;
pub mod likelihood;
pub mod report;
pub mod simulator;
pub mod synth;

pub mod cli;

pub use corpus::{AuthorId, Corpus, CorpusStats, IngestReport, PaperId, PaperRecord};
pub use estimator::{estimate_aggregate, estimate_author, EstimationResult};
pub use events::{extract_events, filter_authors, Career, CitationEvent, CitationKind, EventStream};
pub use likelihood::{aggregate_loglik, author_loglik, loglik_curve, KindFilter, LogLik, YearState};
pub use report::Bins;
pub use simulator::{h_index, run_hindex_experiment, SimOutcome};
pub use synth::{generate_author, generate_cohort, generate_stream, Schedule, SynthProfile};
