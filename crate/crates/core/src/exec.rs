//! Data-parallel helpers.
//!
//! Everything that fans out (blocks, passes, reducer instances, verifier
//! seeds) goes through [`map_indexed`], which preserves input order so that
//! results are identical in both modes. Without the `parallel` feature the
//! `Parallel` mode silently runs sequentially.

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

impl Parallelism {
    /// True when work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

/// Order-preserving map over a slice.
pub fn map_indexed<T, R, F>(mode: Parallelism, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let _ = mode;
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

/// Like [`map_indexed`] but short-circuits on the first error in input order.
pub fn try_map_indexed<T, R, E, F>(mode: Parallelism, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(usize, &T) -> Result<R, E> + Sync + Send,
{
    map_indexed(mode, items, f).into_iter().collect()
}

/// Runs `op` on a pool restricted to `threads` workers when parallel.
pub fn with_workers<R: Send>(mode: Parallelism, threads: usize, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
            return pool.install(op);
        }
    }
    let _ = (mode, threads);
    op()
}
