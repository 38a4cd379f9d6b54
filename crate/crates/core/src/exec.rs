//! Execution mode for the data-parallel loops.
//!
//! With the `parallel` feature the row-internal loops of the dynamic programs,
//! Monte Carlo trials and ratio sweeps run on the rayon pool. Without it, or
//! with [`Exec::Sequential`], everything runs on the calling thread. Results are
//! identical either way: every parallel map writes into its own slot and all
//! reductions happen afterwards in index order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this mode will actually use more than the calling thread.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Evaluates `f` over `range`, returning results in index order.
    pub fn map_range<T, F>(self, range: std::ops::Range<usize>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }
}
