//! Build a corpus from a newline-delimited JSON dump, inspect what ingestion
//! kept and dropped, and round-trip it through the binary cache.
//!
//!     cargo run --example ingest_and_stats

use citeflow::corpus::{
    corpus_stats, ingest_dump, read_cache, write_cache, IngestLimits, PaperId,
};

fn main() -> anyhow::Result<()> {
    // A miniature dump in the shape real ones have: one JSON record per
    // line, a few records with problems (missing year, no authors, broken
    // line), references that point outside the snapshot.
    let dump = r#"{"id":1,"year":1999,"authors":[{"id":70,"name":"A. Ichi"}],"references":[]}
{"id":2,"year":2000,"authors":[{"id":70},{"id":71}],"references":[1]}
{"id":3,"year":2001,"authors":[{"id":71}],"references":[1,2,999]}
{"id":4,"authors":[{"id":72}],"references":[2]}
{"id":5,"year":2002,"authors":[],"references":[1]}
{"id":6,"year":2002,"authors":[{"id":72}],"references":[1,2,3]}
oops, not a record
{"id":7,"year":2003,"authors":[{"id":70}],"references":[3,6]}
"#;
    let dir = tempfile::tempdir()?;
    let dump_path = dir.path().join("mini.jsonl");
    std::fs::write(&dump_path, dump)?;

    let (corpus, report) = ingest_dump(&dump_path, &IngestLimits::default())?;

    println!("kept {} papers, saw {} records", report.papers_kept, report.records_seen());
    println!(
        "dropped: {} missing year, {} no authors, {} duplicate ids; {} unparseable lines",
        report.papers_dropped_no_year,
        report.papers_dropped_no_authors,
        report.papers_dropped_duplicate_id,
        report.parse_errors
    );
    println!(
        "references: {}/{} resolved inside the snapshot",
        report.references_resolved, report.references_total
    );

    let stats = corpus_stats(&corpus);
    println!("\npublications by year ({} authors):", stats.authors);
    for (year, count) in &stats.publications_by_year {
        println!("  {year}  {}", "#".repeat(*count as usize));
    }

    // Who cites paper 2? The reverse index is built at construction.
    let citers = corpus.citers_of(PaperId(2));
    println!("\npaper 2 is cited by {:?}", citers.iter().map(|p| p.0).collect::<Vec<_>>());

    // The cache preserves everything, including the ingest counters.
    let cache_path = dir.path().join("mini.cache");
    write_cache(&corpus, &report, &cache_path)?;
    let (reloaded, reloaded_report) = read_cache(&cache_path)?;
    assert_eq!(corpus, reloaded);
    assert_eq!(report, reloaded_report);
    println!(
        "\ncache round-trip ok ({} bytes)",
        std::fs::metadata(&cache_path)?.len()
    );
    Ok(())
}
