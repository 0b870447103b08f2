//! Data-parallel helpers. With the `parallel` feature (default) these run on
//! the rayon pool; without it every call runs sequentially. Results never
//! depend on the choice.

/// How batch work is scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `items.iter().map(f).collect()`, order preserved.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Splits `0..len` into chunks, maps each, and returns the per-chunk results
/// in chunk order.
pub fn map_chunks<R, F>(exec: Execution, len: u64, chunk: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(std::ops::Range<u64>) -> R + Sync + Send,
{
    let chunk = chunk.max(1);
    let ranges: Vec<std::ops::Range<u64>> = (0..len.div_ceil(chunk))
        .map(|i| i * chunk..((i + 1) * chunk).min(len))
        .collect();
    map(exec, &ranges, |r| f(r.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let xs: Vec<u32> = (0..1000).collect();
        let seq = map(Execution::Sequential, &xs, |x| x * 3);
        let par = map(Execution::Parallel, &xs, |x| x * 3);
        assert_eq!(seq, par);
        assert_eq!(seq[999], 2997);
    }

    #[test]
    fn chunks_cover_range() {
        let parts = map_chunks(Execution::Parallel, 103, 10, |r| (r.start, r.end));
        assert_eq!(parts.len(), 11);
        assert_eq!(parts[0], (0, 10));
        assert_eq!(parts[10], (100, 103));
        assert!(map_chunks(Execution::Sequential, 0, 10, |r| r.start).is_empty());
    }
}
