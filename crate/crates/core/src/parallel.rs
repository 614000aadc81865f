//! Deterministic fan-out helpers.
//!
//! Work items map by index and reductions use total orders, so results are
//! identical for any worker count. On wasm targets everything runs on the
//! calling thread.

#[cfg(not(target_arch = "wasm32"))]
pub(crate) fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(target_arch = "wasm32")]
pub(crate) fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Maps every index in 0..total through `eval` and collects the values.
#[cfg(not(target_arch = "wasm32"))]
pub(crate) fn par_values<F>(total: u64, eval: F) -> Vec<f64>
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    use rayon::prelude::*;
    (0..total).into_par_iter().map(eval).collect()
}

#[cfg(target_arch = "wasm32")]
pub(crate) fn par_values<F>(total: u64, eval: F) -> Vec<f64>
where
    F: Fn(u64) -> f64,
{
    (0..total).map(eval).collect()
}
