//! Grid evaluation strategy: data-parallel by default, sequential when the
//! `parallel` feature is disabled.
//!
//! Residual scans and per-bracket bisections are embarrassingly parallel —
//! every grid point is independent — so the whole solver funnels through
//! [`map_grid`], and the feature flag swaps the implementation in one place.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f` to every item, returning results in input order.
#[cfg(feature = "parallel")]
pub fn map_grid<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Apply `f` to every item, returning results in input order.
#[cfg(not(feature = "parallel"))]
pub fn map_grid<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_grid_seq(items, f)
}

/// Single-threaded reference implementation; also the benchmark baseline.
pub fn map_grid_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
