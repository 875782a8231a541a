use rayon::prelude::*;

use crate::error::{Error, Result};

/// Maps `f` over `items` in parallel, returning results in input order.
/// `jobs` sizes a dedicated pool; `None` uses the global one.
pub(crate) fn map_ordered<T, R, F>(items: &[T], jobs: Option<usize>, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match jobs {
        Some(threads) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::InvalidSpec(format!("thread pool: {e}")))?
            .install(|| items.par_iter().map(&f).collect())),
        None => Ok(items.par_iter().map(f).collect()),
    }
}
