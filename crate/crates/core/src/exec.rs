//! Execution mode for the data-parallel loops (per-target weights, outcome
//! enumeration, Monte Carlo sampling).
//!
//! Work is always split into the same fixed chunks and partial results are
//! combined in chunk order, so both modes produce bit-identical output.
//! Without the `parallel` feature, [`Execution::Parallel`] runs
//! sequentially.

use std::ops::Range;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Applies `f` to consecutive chunks of `0..len` (each `chunk` long,
    /// the last one possibly shorter) and returns the results in chunk
    /// order.
    pub fn map_chunks<T, F>(self, len: usize, chunk: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<usize>) -> T + Sync + Send,
    {
        let chunk = chunk.max(1);
        let count = len.div_ceil(chunk);
        let range = move |c: usize| c * chunk..((c + 1) * chunk).min(len);
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return (0..count).into_par_iter().map(|c| f(range(c))).collect();
        }
        (0..count).map(|c| f(range(c))).collect()
    }

    /// Applies `f` to every index in `0..len`, preserving order.
    pub fn map_indices<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range_in_order() {
        for mode in [Execution::Sequential, Execution::Parallel] {
            let parts = mode.map_chunks(10, 4, |r| r);
            assert_eq!(parts, vec![0..4, 4..8, 8..10]);
            assert!(mode.map_chunks(0, 4, |r| r).is_empty());
        }
    }

    #[test]
    fn indices_preserve_order() {
        let seq = Execution::Sequential.map_indices(100, |i| i * i);
        let par = Execution::Parallel.map_indices(100, |i| i * i);
        assert_eq!(seq, par);
    }
}
