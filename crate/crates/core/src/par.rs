//! Order-preserving data-parallel helpers. With the `parallel` feature these
//! run on the rayon pool; without it they fall back to sequential iterators.
//!
//! The `*_with` variants take an explicit [`Mode`] so both paths can be
//! measured in one build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Rayon when compiled in, otherwise sequential.
    Parallel,
    Sequential,
}

impl Default for Mode {
    fn default() -> Self {
        if is_parallel() {
            Mode::Parallel
        } else {
            Mode::Sequential
        }
    }
}

/// Maps `f` over `items`, returning results in input order.
#[cfg(feature = "parallel")]
pub fn map_with<T, R, F>(mode: Mode, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    match mode {
        Mode::Parallel => items.into_par_iter().map(f).collect(),
        Mode::Sequential => items.into_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_with<T, R, F>(_mode: Mode, items: Vec<T>, f: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    items.into_iter().map(f).collect()
}

/// Sums `f(i)` over `0..n`.
#[cfg(feature = "parallel")]
pub fn sum_range_with<F>(mode: Mode, n: u64, f: F) -> u64
where
    F: Fn(u64) -> u64 + Sync + Send,
{
    match mode {
        Mode::Parallel => (0..n).into_par_iter().map(f).sum(),
        Mode::Sequential => (0..n).map(f).sum(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn sum_range_with<F>(_mode: Mode, n: u64, f: F) -> u64
where
    F: Fn(u64) -> u64,
{
    (0..n).map(f).sum()
}

#[cfg(feature = "parallel")]
pub fn map<T: Send, R: Send, F: Fn(T) -> R + Sync + Send>(items: Vec<T>, f: F) -> Vec<R> {
    map_with(Mode::default(), items, f)
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F: Fn(T) -> R>(items: Vec<T>, f: F) -> Vec<R> {
    map_with(Mode::default(), items, f)
}

#[cfg(feature = "parallel")]
pub fn sum_range<F: Fn(u64) -> u64 + Sync + Send>(n: u64, f: F) -> u64 {
    sum_range_with(Mode::default(), n, f)
}

#[cfg(not(feature = "parallel"))]
pub fn sum_range<F: Fn(u64) -> u64>(n: u64, f: F) -> u64 {
    sum_range_with(Mode::default(), n, f)
}

/// Whether this build evaluates suites on the rayon pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
