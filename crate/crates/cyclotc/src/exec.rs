//! Execution strategy shim. With the `parallel` feature (default), batch
//! helpers fan work out over rayon; without it they run sequentially with the
//! same API, so callers never mention rayon directly.

/// Maps `f` over `items`, preserving order.
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

/// Sequential reference version of [`par_map`], kept available so benchmarks
/// can compare the two execution strategies inside one build.
pub fn seq_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Searches `items` for the first (in index order) element on which `f`
/// returns `Some`. Deterministic: the result does not depend on scheduling.
pub fn par_find_map<T, U, F>(items: Vec<T>, f: F) -> Option<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> Option<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items
            .into_par_iter()
            .enumerate()
            .filter_map(|(i, x)| f(x).map(|u| (i, u)))
            .min_by_key(|(i, _)| *i)
            .map(|(_, u)| u)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().find_map(f)
    }
}

/// Sequential reference version of [`par_find_map`].
pub fn seq_find_map<T, U, F>(items: Vec<T>, f: F) -> Option<U>
where
    F: Fn(T) -> Option<U>,
{
    items.into_iter().find_map(f)
}
