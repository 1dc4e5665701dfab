//! Data-parallel helpers with a sequential fallback.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many items the parallel path is not worth its overhead.
const MIN_PARALLEL: usize = 64;

/// `(0..n).map(f).collect()`, spread over the rayon pool when `parallel`.
#[cfg(feature = "parallel")]
pub fn map_range<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if parallel && n >= MIN_PARALLEL {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<T, F>(n: usize, _parallel: bool, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    let _ = MIN_PARALLEL;
    (0..n).map(f).collect()
}

/// Like [`map_range`] for coarse tasks (whole solver runs), with no size
/// threshold.
#[cfg(feature = "parallel")]
pub fn map_tasks<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_tasks<T, F>(n: usize, _parallel: bool, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// True when the crate was built with the rayon backend.
pub fn available() -> bool {
    cfg!(feature = "parallel")
}
