//! Trace the log-likelihood of a synthetic stream over a rho grid and
//! sketch it in the terminal. The curve is concave with a single maximum
//! near the generating value.
//!
//!     cargo run --example likelihood_curve

use citeflow::likelihood::{loglik_curve, KindFilter};
use citeflow::synth::{generate_stream, Schedule, SynthProfile};

fn main() {
    let rho_true = 0.65;
    let profile = SynthProfile {
        years: 10,
        start_year: 2000,
        papers_per_year: Schedule::constant(3),
        external_per_year: Schedule::from_vec(vec![10, 40, 90, 150, 150, 150, 150, 150, 150, 150]),
        self_per_year: Schedule::constant(0),
        rho_external: rho_true,
        rho_self: 0.0,
        seed: 20,
    };
    let stream = generate_stream(&profile).expect("profile is valid");
    println!(
        "stream: {} papers, {} events, generated at rho = {rho_true}\n",
        stream.career().len(),
        stream.totals().total()
    );

    let grid: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
    let curve = loglik_curve(std::slice::from_ref(&stream), KindFilter::All, &grid)
        .expect("grid within [0, 1]");

    // Scale finite values into a fixed-width bar chart. rho = 1 is -inf
    // here: some event hit a paper with no prior citations.
    let finite: Vec<f64> = curve.iter().map(|&(_, v)| v).filter(|v| v.is_finite()).collect();
    let (lo, hi) = (
        finite.iter().cloned().fold(f64::INFINITY, f64::min),
        finite.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let mut best = (0.0, f64::NEG_INFINITY);
    for &(rho, value) in &curve {
        if value > best.1 {
            best = (rho, value);
        }
        let bar = if value.is_finite() {
            let w = ((value - lo) / (hi - lo) * 60.0).round() as usize;
            "=".repeat(w)
        } else {
            String::from("-inf")
        };
        let marker = if value == hi { " <- max" } else { "" };
        println!("rho {rho:>5.3}  {value:>12.3}  {bar}{marker}");
    }
    println!("\ngrid maximum at rho = {:.3} (true value {rho_true})", best.0);
}
