//! Data-parallel helpers.
//!
//! Reductions are evaluated over fixed-size chunks whose partial sums are
//! combined in index order, so results do not depend on the thread count.

use std::ops::Range;
use std::sync::Once;

use rayon::prelude::*;

const CHUNK: usize = 4096;

static INIT: Once = Once::new();

/// Caps the global pool at `THERMOTOMO_THREADS` when that variable is set.
pub fn init_from_env() {
    INIT.call_once(|| {
        if let Some(n) = std::env::var("THERMOTOMO_THREADS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
        {
            // A pool may already exist if the host application built one.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    });
}

/// Deterministic sum of `f` over `0..n`, split into fixed chunks.
pub fn sum_chunks<F>(n: usize, f: F) -> f64
where
    F: Fn(Range<usize>) -> f64 + Sync,
{
    if n <= CHUNK {
        return f(0..n);
    }
    let n_chunks = n.div_ceil(CHUNK);
    let partial: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(n)))
        .collect();
    partial.iter().sum()
}

/// Deterministic maximum of `f` over `0..n`.
pub fn max_chunks<F>(n: usize, f: F) -> f64
where
    F: Fn(Range<usize>) -> f64 + Sync,
{
    if n <= CHUNK {
        return f(0..n);
    }
    let n_chunks = n.div_ceil(CHUNK);
    (0..n_chunks)
        .into_par_iter()
        .map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(n)))
        .reduce(|| 0.0, f64::max)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    sum_chunks(a.len(), |r| a[r.clone()].iter().zip(&b[r]).map(|(x, y)| x * y).sum())
}
