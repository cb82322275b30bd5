//! Turn a corpus into one author's citation event stream: which career
//! paper got cited, when, by whom, and whether it was a self-citation.
//!
//!     cargo run --example career_events

use citeflow::corpus::{AuthorId, Corpus, PaperId, PaperRecord};
use citeflow::events::{citations_per_paper, extract_events, self_fraction};

fn paper(id: u64, year: i32, authors: &[u64], refs: &[u64]) -> PaperRecord {
    PaperRecord {
        paper_id: PaperId(id),
        year,
        author_ids: authors.iter().copied().map(AuthorId).collect(),
        reference_ids: refs.iter().copied().map(PaperId).collect(),
    }
}

fn main() {
    // Author 7 publishes three papers; the third cites the first two
    // (self-citations). Outsiders cite them over the following years. One
    // reference runs backwards in time and gets excluded.
    let (corpus, _) = Corpus::build([
        paper(1, 2000, &[7], &[]),
        paper(2, 2001, &[7, 8], &[]),
        paper(3, 2003, &[7], &[1, 2]),
        paper(10, 2001, &[20], &[1]),
        paper(11, 2002, &[21], &[1, 2]),
        paper(12, 2003, &[22], &[2]),
        paper(13, 1999, &[23], &[1]), // cites a paper that does not exist yet
        paper(14, 2004, &[20], &[3, 1]),
    ]);

    let stream = extract_events(&corpus, AuthorId(7)).expect("author 7 exists");
    let career = stream.career();

    println!("career of author 7:");
    for (i, (&paper, &year)) in career.paper_ids().iter().zip(career.pub_years()).enumerate() {
        println!("  #{} paper {} ({year})", i + 1, paper);
    }

    println!("\nevents, in replay order:");
    for e in stream.events() {
        println!(
            "  {}  paper #{}  {:>8}  from {}",
            e.year, e.target_index, e.kind.to_string(), e.citing_paper_id
        );
    }

    let totals = stream.totals();
    let excl = stream.exclusions();
    println!(
        "\n{} events: {} external, {} self (self fraction {:.2})",
        totals.total(),
        totals.external,
        totals.self_citations,
        self_fraction(&stream).unwrap()
    );
    println!(
        "excluded: {} time-travel citations, {} self-loops",
        excl.time_travel, excl.self_loops
    );
    println!("citations per career paper: {:?}", citations_per_paper(&stream));
}
