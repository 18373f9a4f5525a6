use coopcast_core::Executor;
use rayon::prelude::*;
use rayon::ThreadPool;

/// Thread count override read by [`RayonExecutor::from_env`].
pub const THREADS_ENV: &str = "COOPCAST_THREADS";

/// Executor backed by rayon. Results come back in index order, so output
/// does not depend on the thread count.
pub struct RayonExecutor {
    pool: Option<ThreadPool>,
}

impl RayonExecutor {
    /// Uses the global pool.
    pub fn global() -> Self {
        RayonExecutor { pool: None }
    }

    pub fn with_threads(n: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().ok();
        RayonExecutor { pool }
    }

    /// Caps the pool at `COOPCAST_THREADS` when set to a positive integer.
    pub fn from_env() -> Self {
        match std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
            Some(n) if n > 0 => Self::with_threads(n),
            _ => Self::global(),
        }
    }
}

impl Executor for RayonExecutor {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        let go = || (0..n).into_par_iter().map(&f).collect();
        match &self.pool {
            Some(p) => p.install(go),
            None => go(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_index_order() {
        let v = RayonExecutor::with_threads(3).map(100, |i| i * i);
        assert_eq!(v, (0..100).map(|i| i * i).collect::<Vec<_>>());
    }
}
