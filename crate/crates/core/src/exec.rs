//! One indirection point for data parallelism. Every sweeping operation maps
//! an index range to per-task results and merges them in task order, so the
//! merged output never depends on scheduling. With the `parallel` feature
//! disabled the same driver runs a plain loop.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f` to `0..tasks` and return results in index order.
pub(crate) fn run_indexed<T, F>(tasks: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..tasks).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..tasks).map(f).collect()
}
