//! Data-parallel execution with a sequential fallback.
//!
//! Law validation and corpus runs are embarrassingly parallel. With the
//! `parallel` feature they fan out over rayon; without it, or when
//! [`Exec::Sequential`] is requested, they run on the calling thread.
//! Both strategies return results in input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for bulk checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Maps `f` over `0..n`, keeping the `Some` results in index order.
    pub fn filter_map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> Option<R> + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().filter_map(f).collect(),
            _ => (0..n).filter_map(f).collect(),
        }
    }

    /// Maps `f` over a slice, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_on_order() {
        let f = |i: usize| (i % 3 == 0).then_some(i * i);
        let a = Exec::Sequential.filter_map_range(100, f);
        let b = Exec::Parallel.filter_map_range(100, f);
        assert_eq!(a, b);
        let xs: Vec<u32> = (0..50).collect();
        assert_eq!(
            Exec::Sequential.map(&xs, |x| x + 1),
            Exec::Parallel.map(&xs, |x| x + 1)
        );
    }
}
