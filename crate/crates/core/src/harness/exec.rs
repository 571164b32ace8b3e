use rayon::prelude::*;

/// Environment variable capping trial parallelism; `0` means serial.
pub const THREADS_ENV: &str = "OKS_THREADS";

/// How trial loops are executed. Results never depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exec {
    threads: usize,
}

impl Exec {
    pub fn serial() -> Self {
        Exec { threads: 0 }
    }

    pub fn threads(threads: usize) -> Self {
        Exec { threads }
    }

    /// Reads [`THREADS_ENV`]; unset means all available cores.
    pub fn from_env() -> Self {
        match std::env::var(THREADS_ENV) {
            Ok(v) => Exec { threads: v.trim().parse().unwrap_or(0) },
            Err(_) => Exec { threads: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1) },
        }
    }

    pub fn thread_count(&self) -> usize {
        self.threads
    }

    /// `f(0), …, f(trials − 1)` in index order.
    pub fn map_trials<T, F>(&self, trials: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        if self.threads == 0 {
            return (0..trials).map(f).collect();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(self.threads).build() {
            Ok(pool) => pool.install(|| (0..trials).into_par_iter().map(&f).collect()),
            Err(_) => (0..trials).map(f).collect(),
        }
    }
}
