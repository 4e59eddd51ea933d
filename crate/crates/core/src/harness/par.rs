//! Replicate fan-out.
//!
//! Replicate `i` always draws from stream `(seed, experiment, i)` and results
//! come back in replicate order, so any reduction done afterwards is
//! independent of how many workers ran.

use super::rng::RngStream;

/// Runs `task(stream_i, i)` for `i in 0..n` and returns results in index order.
pub fn replicate_map<T, F>(n: usize, seed: u64, experiment: u64, task: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RngStream, usize) -> T + Sync + Send,
{
    let run = |i: usize| {
        let mut rng = RngStream::new(seed, experiment, i as u64);
        task(&mut rng, i)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(run).collect()
    }
}

/// Like [`replicate_map`] for fallible tasks; returns the first error in
/// replicate order.
pub fn try_replicate_map<T, E, F>(n: usize, seed: u64, experiment: u64, task: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(&mut RngStream, usize) -> Result<T, E> + Sync + Send,
{
    replicate_map(n, seed, experiment, task).into_iter().collect()
}

/// Runs `f` on a pool of `threads` workers (or inline without the
/// `parallel` feature).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}
