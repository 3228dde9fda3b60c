//! Optional data parallelism for per-element work.
//!
//! `MORPHOSIM_THREADS=n` (n > 1) runs element kernels on a rayon pool. Results
//! are collected in index order, so output does not depend on the thread count.

use std::sync::OnceLock;

use rayon::prelude::*;

fn pool() -> Option<&'static rayon::ThreadPool> {
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let n = thread_count();
        (n > 1)
            .then(|| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok())
            .flatten()
    })
    .as_ref()
}

pub fn thread_count() -> usize {
    std::env::var("MORPHOSIM_THREADS")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(1)
}

pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match pool() {
        Some(p) => p.install(|| (0..n).into_par_iter().map(&f).collect()),
        None => (0..n).map(f).collect(),
    }
}
