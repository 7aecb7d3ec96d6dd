//! Data-parallel helpers for independent runs (table cells, randomized
//! batches, threshold sweeps).
//!
//! With the `parallel` feature (default) work is spread over the rayon
//! global pool, or a dedicated pool when [`with_jobs`] is used. Without the
//! feature every call runs sequentially on the calling thread. Result order
//! always matches input order.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
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

pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Execution::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel => items.iter().map(f).collect(),
    }
}

/// Run `op` with at most `jobs` worker threads. `None` or `Some(0)` uses the
/// global pool.
pub fn with_jobs<R: Send>(jobs: Option<usize>, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs.filter(|&n| n > 0) {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            return pool.install(op);
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
    op()
}
