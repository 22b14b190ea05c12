//! Host-side execution strategy for data-parallel loops (work-groups, batches
//! of images). Without the `parallel` feature every strategy runs sequentially.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Executor {
    Sequential,
    /// Rayon thread pool. Falls back to sequential when built without `parallel`.
    Parallel,
}

impl Executor {
    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Evaluates `f(0..n)` and returns the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Executor::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Like [`Executor::map`] but returns the lowest-index error, if any.
    pub fn try_map<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Executor::Parallel => self.map(n, f).into_iter().collect(),
            _ => (0..n).map(f).collect(),
        }
    }
}

impl Default for Executor {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Executor::Parallel
        } else {
            Executor::Sequential
        }
    }
}

impl fmt::Display for Executor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Executor::Sequential => "sequential",
            Executor::Parallel => "parallel",
        })
    }
}

impl FromStr for Executor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequential" | "seq" => Ok(Executor::Sequential),
            "parallel" | "par" => Ok(Executor::Parallel),
            other => Err(format!("unknown executor `{other}`")),
        }
    }
}
