//! Command-line surface: a thin layer of file formats and plumbing over the
//! library. One subcommand per capability: `ingest`, `events`, `curve`,
//! `estimate`, `synth`, `simulate`, `report`.
//!
//! All outputs are deterministic: the same inputs, flags, and seeds produce
//! byte-identical files. Machine-readable data goes to `--output` (stdout
//! when omitted); human summaries go to stderr. `--manifest` records the
//! run — arguments, seed, and sha256 digests of file inputs and outputs —
//! as JSON.
//!
//! Exit codes: 0 on success, 1 on data errors, 2 on usage errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::{
    self, corpus_stats, ingest_dump, ingest_event_table, read_cache, write_cache,
    write_event_table_file, AuthorId, Corpus, IngestLimits, IngestReport, PaperRecord,
};
use crate::estimator::{estimate_aggregate, estimate_author, EstimationResult};
use crate::events::{extract_events, filter_authors, EventStream};
use crate::likelihood::{loglik_curve, parse_grid, KindFilter};
use crate::report::{
    cohort_rho, rho_histogram, rho_vs_citability, self_fraction_stats, write_binned_means_csv,
    write_cohort_csv, write_histogram_csv, Bins,
};
use crate::simulator::run_hindex_experiment;
use crate::synth::{generate_cohort, Schedule, SynthProfile};

#[derive(Parser)]
#[command(
    name = "citeflow",
    version,
    about = "Preferential-attachment fraction estimation from citation streams"
)]
struct Cli {
    /// Size of the worker thread pool (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write a JSON manifest of this run (arguments, input/output digests).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    /// Newline-delimited JSON records (`id`, `year`, `authors`, `references`).
    Dump,
    /// Normalized table (`paper_id`, `year`, `author_ids`, `reference_ids`).
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    /// Every citation event.
    All,
    /// Citations from papers not sharing the author.
    External,
    /// Citations from the author's own papers.
    #[value(name = "self")]
    SelfOnly,
}

impl From<FilterArg> for KindFilter {
    fn from(f: FilterArg) -> KindFilter {
        match f {
            FilterArg::All => KindFilter::All,
            FilterArg::External => KindFilter::ExternalOnly,
            FilterArg::SelfOnly => KindFilter::SelfOnly,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    /// One estimate per author.
    Author,
    /// A single pooled estimate across all selected authors.
    Aggregate,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportKind {
    /// Histogram of per-author rho estimates.
    RhoHist,
    /// Mean rho by citability (total citations received, log bins).
    RhoCitability,
    /// Distribution of per-author self-citation fractions.
    SelfFraction,
    /// Pooled rho per career-start cohort.
    Cohort,
}

/// Author-selection thresholds shared by the analysis subcommands.
#[derive(Args, Clone, Copy)]
struct SelectArgs {
    /// Keep authors with at least this many papers.
    #[arg(long, default_value_t = 10)]
    min_papers: usize,
    /// Keep authors with strictly more than this many citations (0 = no
    /// citation threshold).
    #[arg(long, default_value_t = 0)]
    min_citations: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Build a corpus cache from a raw dump or a normalized table.
    Ingest {
        /// Input file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = InputFormat::Dump)]
        format: InputFormat,
        /// Where to write the binary corpus cache.
        #[arg(long)]
        cache: PathBuf,
        /// Stop after this many records (smoke-testing large dumps).
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Extract one author's classified citation events.
    Events {
        #[arg(long)]
        cache: PathBuf,
        /// Author id (decimal, or any token which is then hashed like
        /// during ingestion).
        #[arg(long)]
        author: String,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the log-likelihood over a grid of rho values.
    Curve {
        #[arg(long)]
        cache: PathBuf,
        #[arg(long, value_enum, default_value_t = FilterArg::All)]
        filter: FilterArg,
        /// Grid as start:end:step within [0, 1].
        #[arg(long, default_value = "0:1:0.01")]
        grid: String,
        /// Restrict to a single author instead of pooling.
        #[arg(long)]
        author: Option<String>,
        #[command(flatten)]
        select: SelectArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fit the preferential-attachment fraction by maximum likelihood.
    Estimate {
        #[arg(long)]
        cache: PathBuf,
        #[arg(long, value_enum, default_value_t = ScopeArg::Author)]
        scope: ScopeArg,
        #[arg(long, value_enum, default_value_t = FilterArg::All)]
        filter: FilterArg,
        /// Search bracket tolerance.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        select: SelectArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a synthetic cohort with known rho as a normalized table.
    Synth {
        #[arg(long, default_value_t = 100)]
        authors: usize,
        #[arg(long, default_value_t = 10)]
        years: u32,
        #[arg(long, default_value_t = 2000)]
        start_year: i32,
        /// Papers per career year, comma-separated (last value repeats).
        #[arg(long, default_value = "3")]
        papers_per_year: String,
        /// External citations per year, comma-separated (last repeats).
        #[arg(long, default_value = "20")]
        external_per_year: String,
        /// Self-citations per year, comma-separated (last repeats).
        #[arg(long, default_value = "0")]
        self_per_year: String,
        #[arg(long, default_value_t = 0.5)]
        rho_ext: f64,
        #[arg(long, default_value_t = 0.0)]
        rho_self: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output table (stdout when omitted); feed it back through
        /// `ingest --format table`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Re-allocate observed citation volumes to measure how self-citations
    /// move the h-index.
    Simulate {
        #[arg(long)]
        cache: PathBuf,
        #[arg(long, default_value_t = 10)]
        replicates: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        select: SelectArgs,
        /// Per-outcome CSV (stdout when omitted).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write the joint (h_without, h_with) histogram.
        #[arg(long)]
        histogram: Option<PathBuf>,
    },
    /// Aggregate fitted estimates into figure tables.
    Report {
        #[arg(long)]
        cache: PathBuf,
        #[arg(long, value_enum)]
        kind: ReportKind,
        #[arg(long, value_enum, default_value_t = FilterArg::All)]
        filter: FilterArg,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Number of bins for histogram-shaped reports.
        #[arg(long, default_value_t = 20)]
        bins: usize,
        /// Smallest cohort fitted by `--kind cohort`.
        #[arg(long, default_value_t = 5)]
        min_cohort: usize,
        #[command(flatten)]
        select: SelectArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct FileDigest {
    path: String,
    bytes: u64,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    command: Vec<String>,
    seed: Option<u64>,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    elapsed_ms: u128,
}

#[derive(Default)]
struct Artifacts {
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    seed: Option<u64>,
}

impl Artifacts {
    fn input(&mut self, p: &Path) {
        self.inputs.push(p.to_path_buf());
    }
    fn output(&mut self, p: &Option<PathBuf>) {
        if let Some(p) = p {
            self.outputs.push(p.clone());
        }
    }
}

/// Parse and execute a command line. The first argument is the program
/// name, as in `std::env::args_os`.
pub fn run<I, T>(args: I) -> anyhow::Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(argv.iter()) {
        Ok(cli) => cli,
        // Usage problems (exit 2) and --help/--version (exit 0).
        Err(e) => e.exit(),
    };

    if let Some(n) = cli.threads {
        // Ignore failure: the global pool can only be configured once per
        // process, which is fine for repeated in-process invocations.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    let started = Instant::now();
    let mut artifacts = Artifacts::default();
    execute(&cli.command, &mut artifacts)?;

    if let Some(manifest_path) = &cli.manifest {
        let manifest = RunManifest {
            tool: "citeflow",
            version: env!("CARGO_PKG_VERSION"),
            command: argv
                .iter()
                .skip(1)
                .map(|a| a.to_string_lossy().into_owned())
                .collect(),
            seed: artifacts.seed,
            inputs: digest_files(&artifacts.inputs)?,
            outputs: digest_files(&artifacts.outputs)?,
            elapsed_ms: started.elapsed().as_millis(),
        };
        let file = File::create(manifest_path)
            .with_context(|| format!("cannot write manifest {}", manifest_path.display()))?;
        serde_json::to_writer_pretty(BufWriter::new(file), &manifest)?;
    }
    Ok(())
}

fn digest_files(paths: &[PathBuf]) -> anyhow::Result<Vec<FileDigest>> {
    paths
        .iter()
        .map(|p| {
            let mut file = File::open(p)
                .with_context(|| format!("cannot digest {}", p.display()))?;
            let mut hasher = Sha256::new();
            let mut bytes = 0u64;
            let mut buf = [0u8; 64 * 1024];
            loop {
                let n = file.read(&mut buf)?;
                if n == 0 {
                    break;
                }
                bytes += n as u64;
                hasher.update(&buf[..n]);
            }
            Ok(FileDigest {
                path: p.display().to_string(),
                bytes,
                sha256: format!("{:x}", hasher.finalize()),
            })
        })
        .collect()
}

fn load_corpus(cache: &Path) -> anyhow::Result<(Corpus, IngestReport)> {
    read_cache(cache).with_context(|| {
        format!(
            "cannot load corpus cache {}; run `citeflow ingest` to create it",
            cache.display()
        )
    })
}

fn parse_author(token: &str) -> anyhow::Result<AuthorId> {
    corpus::parse_id_token(token)
        .map(AuthorId)
        .ok_or_else(|| anyhow::anyhow!("empty author id"))
}

fn selected_streams(corpus: &Corpus, select: &SelectArgs) -> anyhow::Result<Vec<EventStream>> {
    let streams = filter_authors(corpus, select.min_papers, select.min_citations);
    if streams.is_empty() {
        bail!(
            "no author passes the selection (min-papers {}, min-citations {})",
            select.min_papers,
            select.min_citations
        );
    }
    Ok(streams)
}

fn output_writer(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let file = File::create(p)
                .with_context(|| format!("cannot write output {}", p.display()))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(std::io::stdout())),
    }
}

fn per_author_estimates(
    streams: &[EventStream],
    filter: KindFilter,
    tol: f64,
) -> Vec<(AuthorId, EstimationResult)> {
    streams
        .par_iter()
        .map(|s| {
            let est = estimate_author(s, filter, tol)
                .expect("tolerance and bounds are validated here");
            (s.author_id(), est)
        })
        .collect()
}

fn write_estimate_rows<W: Write>(
    rows: &[(String, EstimationResult)],
    mut w: W,
) -> anyhow::Result<()> {
    writeln!(
        w,
        "author_id,filter,rho_hat,loglik,events_used,events_identifiable,iterations,converged,unidentifiable"
    )?;
    for (who, r) in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            who,
            r.filter,
            r.rho_hat,
            r.loglik_at_max,
            r.events_used,
            r.events_identifiable,
            r.iterations,
            r.converged,
            r.unidentifiable
        )?;
    }
    Ok(())
}

fn execute(command: &Command, artifacts: &mut Artifacts) -> anyhow::Result<()> {
    match command {
        Command::Ingest {
            input,
            format,
            cache,
            limit,
        } => {
            artifacts.input(input);
            let (corpus, report) = match format {
                InputFormat::Dump => ingest_dump(
                    input,
                    &IngestLimits {
                        max_records: *limit,
                    },
                )?,
                InputFormat::Table => {
                    if limit.is_some() {
                        bail!("--limit only applies to --format dump");
                    }
                    ingest_event_table(input)?
                }
            };
            write_cache(&corpus, &report, cache)?;
            artifacts.outputs.push(cache.clone());
            let stats = corpus_stats(&corpus);
            eprintln!(
                "ingested {} papers / {} authors ({} dropped: {} no-year, {} no-authors, {} duplicate; {} parse errors)",
                report.papers_kept,
                stats.authors,
                report.records_seen() - report.papers_kept,
                report.papers_dropped_no_year,
                report.papers_dropped_no_authors,
                report.papers_dropped_duplicate_id,
                report.parse_errors,
            );
            eprintln!(
                "references: {} of {} resolved; cache written to {}",
                report.references_resolved,
                report.references_total,
                cache.display()
            );
        }

        Command::Events {
            cache,
            author,
            output,
        } => {
            artifacts.input(cache);
            let (corpus, _) = load_corpus(cache)?;
            let author = parse_author(author)?;
            let stream = extract_events(&corpus, author)?;
            let mut w = output_writer(output)?;
            writeln!(w, "year,target_index,kind,citing_paper_id")?;
            for e in stream.events() {
                writeln!(
                    w,
                    "{},{},{},{}",
                    e.year, e.target_index, e.kind, e.citing_paper_id
                )?;
            }
            drop(w);
            artifacts.output(output);
            let t = stream.totals();
            let x = stream.exclusions();
            eprintln!(
                "author {}: {} papers, {} events ({} external, {} self); excluded {} time-travel, {} self-loops",
                author,
                stream.career().len(),
                t.total(),
                t.external,
                t.self_citations,
                x.time_travel,
                x.self_loops
            );
        }

        Command::Curve {
            cache,
            filter,
            grid,
            author,
            select,
            output,
        } => {
            artifacts.input(cache);
            let (corpus, _) = load_corpus(cache)?;
            let grid_points = parse_grid(grid)
                .ok_or_else(|| anyhow::anyhow!("bad grid {grid:?}; expected start:end:step within [0, 1]"))?;
            let streams = match author {
                Some(token) => vec![extract_events(&corpus, parse_author(token)?)?],
                None => selected_streams(&corpus, select)?,
            };
            let curve = loglik_curve(&streams, (*filter).into(), &grid_points)?;
            let mut w = output_writer(output)?;
            writeln!(w, "rho,loglik")?;
            for (rho, ll) in &curve {
                writeln!(w, "{rho},{ll}")?;
            }
            drop(w);
            artifacts.output(output);
            eprintln!(
                "curve over {} points, {} streams, filter {}",
                curve.len(),
                streams.len(),
                KindFilter::from(*filter)
            );
        }

        Command::Estimate {
            cache,
            scope,
            filter,
            tol,
            select,
            output,
        } => {
            artifacts.input(cache);
            let (corpus, _) = load_corpus(cache)?;
            let streams = selected_streams(&corpus, select)?;
            let filter: KindFilter = (*filter).into();
            let rows: Vec<(String, EstimationResult)> = match scope {
                ScopeArg::Author => per_author_estimates(&streams, filter, *tol)
                    .into_iter()
                    .map(|(a, r)| (a.to_string(), r))
                    .collect(),
                ScopeArg::Aggregate => {
                    let est = estimate_aggregate(&streams, filter, *tol)?;
                    vec![("aggregate".to_string(), est)]
                }
            };
            let w = output_writer(output)?;
            write_estimate_rows(&rows, w)?;
            artifacts.output(output);
            let identifiable = rows.iter().filter(|(_, r)| !r.unidentifiable).count();
            eprintln!(
                "estimated {} of {} rows identifiable (filter {}, {} authors)",
                identifiable,
                rows.len(),
                filter,
                streams.len()
            );
        }

        Command::Synth {
            authors,
            years,
            start_year,
            papers_per_year,
            external_per_year,
            self_per_year,
            rho_ext,
            rho_self,
            seed,
            output,
        } => {
            artifacts.seed = Some(*seed);
            let parse_schedule = |name: &str, s: &str| -> anyhow::Result<Schedule> {
                s.parse::<Schedule>()
                    .map_err(|e| anyhow::anyhow!("bad {name} schedule: {e}"))
            };
            let profile = SynthProfile {
                years: *years,
                start_year: *start_year,
                papers_per_year: parse_schedule("papers-per-year", papers_per_year)?,
                external_per_year: parse_schedule("external-per-year", external_per_year)?,
                self_per_year: parse_schedule("self-per-year", self_per_year)?,
                rho_external: *rho_ext,
                rho_self: *rho_self,
                seed: *seed,
            };
            let cohort = generate_cohort(*authors, |_| profile.clone(), *seed)?;
            let mut records: Vec<PaperRecord> = Vec::new();
            let mut external = 0u64;
            let mut selfs = 0u64;
            for a in &cohort {
                records.extend(a.records.iter().cloned());
                external += a.stream.totals().external;
                selfs += a.stream.totals().self_citations;
            }
            match output {
                Some(p) => write_event_table_file(&records, p)?,
                None => corpus::write_event_table(records.iter(), std::io::stdout())?,
            }
            artifacts.output(output);
            eprintln!(
                "generated {} authors, {} records, {} external + {} self events (rho_ext {}, rho_self {}, seed {})",
                cohort.len(),
                records.len(),
                external,
                selfs,
                rho_ext,
                rho_self,
                seed
            );
        }

        Command::Simulate {
            cache,
            replicates,
            seed,
            select,
            output,
            histogram,
        } => {
            artifacts.input(cache);
            artifacts.seed = Some(*seed);
            let (corpus, _) = load_corpus(cache)?;
            let streams = selected_streams(&corpus, select)?;
            let (outcomes, hist) = run_hindex_experiment(&streams, *replicates, *seed);
            let mut w = output_writer(output)?;
            writeln!(w, "author_id,replicate,h_without_self,h_with_self")?;
            for o in &outcomes {
                writeln!(
                    w,
                    "{},{},{},{}",
                    o.author_id, o.replicate, o.h_without_self, o.h_with_self
                )?;
            }
            drop(w);
            artifacts.output(output);
            if let Some(hist_path) = histogram {
                let mut hw = BufWriter::new(
                    File::create(hist_path)
                        .with_context(|| format!("cannot write {}", hist_path.display()))?,
                );
                writeln!(hw, "h_without_self,h_with_self,count")?;
                for (&(a, b), &count) in &hist.cells {
                    writeln!(hw, "{a},{b},{count}")?;
                }
                drop(hw);
                artifacts.outputs.push(hist_path.clone());
            }
            eprintln!(
                "simulated {} authors x {} replicates; mean h shift {}",
                streams.len(),
                replicates,
                hist.mean_delta()
                    .map(|d| format!("{d:.4}"))
                    .unwrap_or_else(|| "n/a".into())
            );
        }

        Command::Report {
            cache,
            kind,
            filter,
            tol,
            bins,
            min_cohort,
            select,
            output,
        } => {
            artifacts.input(cache);
            let (corpus, _) = load_corpus(cache)?;
            let streams = selected_streams(&corpus, select)?;
            let filter: KindFilter = (*filter).into();
            let w = output_writer(output)?;
            match kind {
                ReportKind::RhoHist => {
                    let results = per_author_estimates(&streams, filter, *tol);
                    let bins = Bins::uniform(0.0, 1.0, *bins)?;
                    let hist = rho_histogram(&results, &bins);
                    write_histogram_csv(&hist, w)?;
                    eprintln!(
                        "rho histogram: {} binned, {} excluded ({:?})",
                        hist.total_binned(),
                        hist.total_excluded(),
                        hist.excluded
                    );
                }
                ReportKind::RhoCitability => {
                    let results = per_author_estimates(&streams, filter, *tol);
                    let max_citations = streams
                        .iter()
                        .map(|s| s.totals().total())
                        .max()
                        .unwrap_or(0);
                    if max_citations == 0 {
                        bail!("no citations among selected authors");
                    }
                    // Log axis up to the next power of ten, so bin edges do
                    // not depend on fine details of the data.
                    let hi = 10f64.powf(((max_citations + 1) as f64).log10().ceil());
                    let bins = Bins::logarithmic(1.0, hi, *bins)?;
                    let means = rho_vs_citability(&results, &streams, &bins)?;
                    write_binned_means_csv(&means, "rho", w)?;
                    eprintln!(
                        "rho vs citability: {} binned, excluded {:?}",
                        means.total_binned(),
                        means.excluded
                    );
                }
                ReportKind::SelfFraction => {
                    let bins = Bins::uniform(0.0, 1.0, *bins)?;
                    let stats = self_fraction_stats(&streams, &bins);
                    write_histogram_csv(&stats.histogram, w)?;
                    eprintln!(
                        "self-citation fraction: pooled {}, author mean {}",
                        stats
                            .pooled_fraction
                            .map(|f| format!("{f:.4}"))
                            .unwrap_or_else(|| "n/a".into()),
                        stats
                            .mean_author_fraction
                            .map(|f| format!("{f:.4}"))
                            .unwrap_or_else(|| "n/a".into()),
                    );
                }
                ReportKind::Cohort => {
                    let table = cohort_rho(&streams, filter, *tol, *min_cohort);
                    write_cohort_csv(&table, w)?;
                    eprintln!(
                        "cohorts: {} fitted, skipped {:?}",
                        table.rows.len(),
                        table.skipped
                    );
                }
            }
            artifacts.output(output);
        }
    }
    Ok(())
}
