//! Produce the aggregate tables a paper figure would be drawn from: the
//! distribution of per-author rho, rho as a function of citability,
//! self-citation prevalence, and per-cohort pooled fits.
//!
//!     cargo run --example figure_tables

use citeflow::corpus::AuthorId;
use citeflow::estimator::{estimate_author, EstimationResult};
use citeflow::likelihood::KindFilter;
use citeflow::report::{
    cohort_rho, rho_histogram, rho_vs_citability, self_fraction_stats, Bins,
};
use citeflow::synth::{generate_cohort, Schedule, SynthProfile};

fn main() -> anyhow::Result<()> {
    // Two generations of authors: an older cohort with stronger
    // preferential attachment and heavier output than the younger one.
    let profile = |start: i32, rho: f64, scale: u32| SynthProfile {
        years: 9,
        start_year: start,
        papers_per_year: Schedule::constant(2),
        external_per_year: Schedule::from_vec(vec![
            scale, 3 * scale, 6 * scale, 8 * scale, 8 * scale, 8 * scale, 8 * scale, 8 * scale,
            8 * scale,
        ]),
        self_per_year: Schedule::from_vec(vec![1, 3, 3, 3, 3, 3, 3, 3, 3]),
        rho_external: rho,
        rho_self: 0.1,
        seed: 0,
    };
    let mut streams = Vec::new();
    for (i, author_block) in [(1995, 0.75, 14u32), (2008, 0.45, 7u32)].into_iter().enumerate() {
        let (start, rho, scale) = author_block;
        let cohort = generate_cohort(40, move |j| profile(start, rho, 3 + (j as u32 + scale) % 12), 500 + i as u64)?;
        for (j, a) in cohort.into_iter().enumerate() {
            // Re-key authors so the two cohorts don't collide.
            let career = citeflow::events::Career::new(
                AuthorId((i as u64 + 1) * 1000 + j as u64),
                a.stream
                    .career()
                    .paper_ids()
                    .iter()
                    .zip(a.stream.career().pub_years())
                    .map(|(&p, &y)| (p, y))
                    .collect(),
            );
            streams.push(citeflow::events::EventStream::from_parts(
                career,
                a.stream.events().to_vec(),
            )?);
        }
    }

    let results: Vec<(AuthorId, EstimationResult)> = streams
        .iter()
        .map(|s| Ok((s.author_id(), estimate_author(s, KindFilter::All, 1e-6)?)))
        .collect::<anyhow::Result<_>>()?;

    println!("== rho histogram (80 authors) ==");
    let bins = Bins::uniform(0.0, 1.0, 10)?;
    let hist = rho_histogram(&results, &bins);
    for i in 0..hist.bins.len() {
        let (lo, hi) = hist.bins.bounds(i);
        println!("  [{lo:.1}, {hi:.1})  {}", "*".repeat(hist.counts[i] as usize));
    }
    if hist.total_excluded() > 0 {
        println!("  excluded: {:?}", hist.excluded);
    }

    println!("\n== mean rho by citability (log bins) ==");
    let cit_bins = Bins::logarithmic(10.0, 10_000.0, 6)?;
    let means = rho_vs_citability(&results, &streams, &cit_bins)?;
    for i in 0..means.bins.len() {
        let (lo, hi) = means.bins.bounds(i);
        match means.mean(i) {
            Some(m) => println!("  {:>7.0} .. {:>7.0} citations  mean rho {m:.3}  ({} authors)", lo, hi, means.counts[i]),
            None => println!("  {:>7.0} .. {:>7.0} citations  -", lo, hi),
        }
    }

    println!("\n== self-citation fractions ==");
    let sf = self_fraction_stats(&streams, &Bins::uniform(0.0, 1.0, 10)?);
    println!(
        "  pooled {:.3}, per-author mean {:.3}",
        sf.pooled_fraction.unwrap(),
        sf.mean_author_fraction.unwrap()
    );

    println!("\n== pooled rho by career-start cohort ==");
    let table = cohort_rho(&streams, KindFilter::All, 1e-6, 5);
    println!("{:>8} {:>8} {:>10} {:>10}", "start", "authors", "rho_hat", "events");
    for row in &table.rows {
        println!(
            "{:>8} {:>8} {:>10.3} {:>10}",
            row.start_year, row.authors, row.result.rho_hat, row.result.events_used
        );
    }
    println!("\n(generating values: 0.75 for the 1995 cohort, 0.45 for the 2008 one)");
    Ok(())
}
