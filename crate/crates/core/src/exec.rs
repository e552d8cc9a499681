//! Batch execution strategy.
//!
//! Every batch loop in the crate (bump transforms, grid points, periods) goes
//! through [`Execution::map`]. With the `parallel` feature the work is spread
//! over the rayon pool; without it, or with [`Execution::Sequential`], it runs
//! on the calling thread. Output order always matches input order, so results
//! and downstream sums are bit-identical across strategies.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Parallel when the crate was built with rayon, sequential otherwise.
    pub fn auto() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }

    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_and_keep_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = Execution::Sequential.map(&xs, |x| x * x);
        let b = Execution::Parallel.map(&xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(a[999], 999 * 999);
    }
}
