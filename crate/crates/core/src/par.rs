//! Data-parallel map with a sequential fallback when the `parallel` feature is off.
//!
//! Results always come back in input order, so downstream reductions are
//! identical whichever backend ran.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

pub(crate) fn map_slice_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// True when this build evaluates videos on the rayon pool.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
