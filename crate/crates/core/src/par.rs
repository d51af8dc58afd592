//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over rayon's pool;
//! without it every helper degrades to a plain iterator. Results always come
//! back in input order, so output is identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
thread_local! {
    // Set while a `with_workers(Some(1), ..)` call is running on this thread.
    static SEQUENTIAL: std::cell::Cell<bool> = const { std::cell::Cell::new(false) };
}

#[cfg(feature = "parallel")]
fn sequential() -> bool {
    SEQUENTIAL.with(|s| s.get())
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if sequential() {
            return items.iter().map(f).collect();
        }
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if sequential() {
            return (0..n).map(f).collect();
        }
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Runs `op` with at most `workers` threads. `None` uses the global pool;
/// `Some(1)` (or `Some(0)`) runs every helper inline on the calling thread.
pub fn with_workers<R, F>(workers: Option<usize>, op: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match workers {
            None => op(),
            Some(0 | 1) => {
                let previous = SEQUENTIAL.with(|s| s.replace(true));
                let result = op();
                SEQUENTIAL.with(|s| s.set(previous));
                result
            }
            Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(op),
                Err(_) => op(),
            },
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        op()
    }
}
