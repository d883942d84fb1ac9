//! Serial or data-parallel evaluation of independent per-index work.
//!
//! Results are collected in index order either way, so the choice never
//! changes the numbers a solver produces.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many items the parallel path runs serially.
pub const PARALLEL_MIN_LEN: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// Uses the rayon pool when the `parallel` feature is enabled, and
    /// falls back to serial evaluation otherwise.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Serial
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel && n >= PARALLEL_MIN_LEN {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Maximum of `f` over `0..n`, or `None` when `n == 0`. Max is exact,
    /// so the reduction order does not matter.
    pub fn max_by<F>(self, n: usize, f: F) -> Option<f64>
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel && n >= PARALLEL_MIN_LEN {
            return (0..n).into_par_iter().map(f).reduce_with(f64::max);
        }
        (0..n).map(f).reduce(f64::max)
    }

    /// Runs two closures, concurrently when parallel.
    pub fn join<A, B, RA, RB>(self, a: A, b: B) -> (RA, RB)
    where
        A: FnOnce() -> RA + Send,
        B: FnOnce() -> RB + Send,
        RA: Send,
        RB: Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return rayon::join(a, b);
        }
        (a(), b())
    }
}
