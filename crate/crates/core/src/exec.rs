//! Trial scheduling: rayon when the `parallel` feature is on, a plain loop
//! otherwise. Results always come back in trial order, so anything reduced
//! from them is independent of the worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

impl Exec {
    /// Evaluates `f(0..n)` and returns the results indexed by trial.
    pub fn map_trials<T, F>(self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
        }
    }
}

/// Runs `f` on a pool capped at `threads` workers (0 = rayon's default).
#[cfg(feature = "parallel")]
pub fn with_thread_cap<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_thread_cap<R: Send>(_threads: usize, f: impl FnOnce() -> R + Send) -> R {
    f()
}
