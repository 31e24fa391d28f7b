//! Deterministic reductions.
//!
//! Every series in the crate is summed in fixed-size blocks. Each block is
//! accumulated sequentially in ascending index order and the block partials
//! are then combined by a pairwise tree whose shape depends only on the number
//! of blocks. The result is therefore bit-identical whether the blocks are
//! evaluated on one thread or many.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Number of consecutive indices accumulated sequentially before a partial
/// sum is emitted.
pub const BLOCK_SIZE: u64 = 4096;

/// How block partials are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Execution {
    Sequential,
    /// Data-parallel over blocks. Falls back to sequential evaluation when the
    /// crate is built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Pairwise (cascade) sum with a split point that depends only on the length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Ordered map over `items`; the output order always matches the input order.
pub fn map_ordered<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Ordered map over the integer range `0..n`.
pub fn map_range<R, F>(exec: Execution, n: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// Sum of `term(i)` over `start..=end` with blocked, order-fixed reduction.
pub fn sum_range<F>(exec: Execution, start: u64, end: u64, term: F) -> f64
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    if end < start {
        return 0.0;
    }
    let len = end - start + 1;
    let blocks = len.div_ceil(BLOCK_SIZE);
    let partials = map_range(exec, blocks, |b| {
        let lo = start + b * BLOCK_SIZE;
        let hi = (lo + BLOCK_SIZE - 1).min(end);
        let mut acc = 0.0;
        for i in lo..=hi {
            acc += term(i);
        }
        acc
    });
    pairwise_sum(&partials)
}

/// Like [`sum_range`] but each term also reports how many series terms it
/// stands for (used by orbit-compressed lattice sums).
pub fn sum_range_counted<F>(exec: Execution, start: u64, end: u64, term: F) -> (f64, u64)
where
    F: Fn(u64) -> (f64, u64) + Sync + Send,
{
    if end < start {
        return (0.0, 0);
    }
    let len = end - start + 1;
    let blocks = len.div_ceil(BLOCK_SIZE);
    let partials = map_range(exec, blocks, |b| {
        let lo = start + b * BLOCK_SIZE;
        let hi = (lo + BLOCK_SIZE - 1).min(end);
        let mut acc = 0.0;
        let mut count = 0u64;
        for i in lo..=hi {
            let (v, c) = term(i);
            acc += v;
            count += c;
        }
        (acc, count)
    });
    let sums: Vec<f64> = partials.iter().map(|p| p.0).collect();
    (pairwise_sum(&sums), partials.iter().map(|p| p.1).sum())
}
