//! Scoped-thread map with index-stable output.

use std::num::NonZeroUsize;

/// Worker count used when the caller does not cap it.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1)
}

/// Applies `f` to every index in `0..len` using up to `threads` workers.
///
/// Output slot `i` always holds `f(i)`, so the result does not depend on the
/// thread count or on scheduling.
pub fn map_indexed<T, F>(len: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = threads.clamp(1, len.max(1));
    if threads == 1 {
        return (0..len).map(f).collect();
    }
    let chunk = len.div_ceil(threads);
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let start = t * chunk;
                let end = (start + chunk).min(len);
                scope.spawn(move || (start..end).map(f).collect::<Vec<T>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_independent_of_threads() {
        let one = map_indexed(37, 1, |i| i * i);
        for t in [2, 3, 8, 64] {
            assert_eq!(map_indexed(37, t, |i| i * i), one);
        }
    }

    #[test]
    fn empty() {
        assert!(map_indexed(0, 4, |i| i).is_empty());
    }
}
