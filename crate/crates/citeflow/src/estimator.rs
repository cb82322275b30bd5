//! Maximum-likelihood estimation of the preferential-attachment fraction.
//!
//! The log-likelihood in `rho` is concave on `[0, 1]` (each admitted event
//! contributes `ln` of an affine function of `rho`), so a golden-section
//! search finds the global maximum without derivatives. Flat objectives are
//! detected up front; ties during the search resolve toward smaller `rho`,
//! so a plateau reports its left edge.

use crate::events::EventStream;
use crate::likelihood::{self, KindFilter, LikelihoodError};

const INV_PHI: f64 = 0.618_033_988_749_895;
const MAX_ITERATIONS: u32 = 200;

/// Default width tolerance for the search bracket.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Result of a 1-D concave maximization over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub rho_hat: f64,
    pub value: f64,
    pub iterations: u32,
    /// Bracket shrank below tolerance (as opposed to hitting the iteration
    /// cap).
    pub converged: bool,
    /// The objective was constant: no admitted event varies with rho. The
    /// reported `rho_hat` is 0 by convention.
    pub unidentifiable: bool,
}

/// Golden-section search for the maximizer of a concave `f` on `[0, 1]`.
///
/// `f(rho)` may return `-inf` (e.g. at `rho = 1` when a never-cited paper
/// received a citation); infinities only ever lose comparisons, and the
/// probe points never touch the endpoints, so the search is unaffected.
pub fn maximize(f: impl Fn(f64) -> f64, tol: f64) -> Maximum {
    let tol = if tol > 0.0 { tol } else { DEFAULT_TOL };

    // A constant objective means nothing identifies rho; probing three
    // points is enough because the objective is concave.
    let f0 = f(0.0);
    let fh = f(0.5);
    let f1 = f(1.0);
    if f0 == fh && fh == f1 {
        return Maximum {
            rho_hat: 0.0,
            value: f0,
            iterations: 0,
            converged: true,
            unidentifiable: true,
        };
    }

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1v = f(x1);
    let mut f2v = f(x2);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        if f1v >= f2v {
            // Ties move left: a flat maximum reports its smallest rho.
            hi = x2;
            x2 = x1;
            f2v = f1v;
            x1 = hi - INV_PHI * (hi - lo);
            f1v = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1v = f2v;
            x2 = lo + INV_PHI * (hi - lo);
            f2v = f(x2);
        }
        if hi - lo < tol {
            converged = true;
            break;
        }
    }

    let rho_hat = 0.5 * (lo + hi);
    Maximum {
        rho_hat,
        value: f(rho_hat),
        iterations,
        converged,
        unidentifiable: false,
    }
}

/// A fitted preferential-attachment fraction with its search diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationResult {
    pub rho_hat: f64,
    pub loglik_at_max: f64,
    pub filter: KindFilter,
    pub events_used: u64,
    pub events_identifiable: u64,
    pub iterations: u32,
    pub converged: bool,
    /// No admitted event constrains rho; `rho_hat` is 0 by convention and
    /// `converged` is false so downstream consumers can skip the author.
    pub unidentifiable: bool,
}

fn estimate_compiled(
    eval: impl Fn(f64) -> likelihood::LogLik,
    filter: KindFilter,
    tol: f64,
) -> EstimationResult {
    let probe = eval(0.0);
    if probe.events_identifiable == 0 {
        return EstimationResult {
            rho_hat: 0.0,
            loglik_at_max: probe.value,
            filter,
            events_used: probe.events_used,
            events_identifiable: 0,
            iterations: 0,
            converged: false,
            unidentifiable: true,
        };
    }
    let max = maximize(|rho| eval(rho).value, tol);
    EstimationResult {
        rho_hat: if max.unidentifiable { 0.0 } else { max.rho_hat },
        loglik_at_max: max.value,
        filter,
        events_used: probe.events_used,
        events_identifiable: probe.events_identifiable,
        iterations: max.iterations,
        converged: max.converged && !max.unidentifiable,
        unidentifiable: max.unidentifiable,
    }
}

/// Fit `rho` for a single author.
pub fn estimate_author(
    stream: &EventStream,
    filter: KindFilter,
    tol: f64,
) -> Result<EstimationResult, LikelihoodError> {
    let terms = likelihood::compile_terms(stream);
    Ok(estimate_compiled(
        |rho| likelihood::eval_terms(&terms, rho, filter),
        filter,
        tol,
    ))
}

/// Fit a single population-level `rho` over all streams. Streams are
/// compiled once; each search step re-evaluates only the compiled terms.
pub fn estimate_aggregate(
    streams: &[EventStream],
    filter: KindFilter,
    tol: f64,
) -> Result<EstimationResult, LikelihoodError> {
    let mut order: Vec<usize> = (0..streams.len()).collect();
    order.sort_by_key(|&i| (streams[i].author_id(), i));
    let compiled: Vec<_> = order
        .iter()
        .map(|&i| likelihood::compile_terms(&streams[i]))
        .collect();

    let eval = |rho: f64| {
        let mut value = crate::likelihood::LogLik {
            value: 0.0,
            events_used: 0,
            events_identifiable: 0,
        };
        let mut acc = 0.0f64;
        let mut comp = 0.0f64;
        let mut hit_zero = false;
        for terms in &compiled {
            let ll = likelihood::eval_terms(terms, rho, filter);
            value.events_used += ll.events_used;
            value.events_identifiable += ll.events_identifiable;
            if ll.value == f64::NEG_INFINITY {
                hit_zero = true;
            } else {
                // Neumaier step, inlined to keep the closure allocation-free.
                let t = acc + ll.value;
                comp += if acc.abs() >= ll.value.abs() {
                    (acc - t) + ll.value
                } else {
                    (ll.value - t) + acc
                };
                acc = t;
            }
        }
        value.value = if hit_zero { f64::NEG_INFINITY } else { acc + comp };
        value
    };
    Ok(estimate_compiled(eval, filter, tol))
}
