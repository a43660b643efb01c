//! Worker-count control. `RIESZ_THREADS` caps the pool size; numerical
//! results never depend on it because every reduction runs in index order.

use rayon::ThreadPoolBuilder;

pub const THREADS_ENV: &str = "RIESZ_THREADS";

/// Worker count requested through `RIESZ_THREADS`, if set and valid.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs `f` inside a dedicated pool of `threads` workers.
pub fn with_threads<T: Send, F: FnOnce() -> T + Send>(threads: usize, f: F) -> T {
    let pool = ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("failed to build thread pool");
    pool.install(f)
}

/// Installs the global pool from `RIESZ_THREADS`. Later calls are no-ops.
pub fn init_global_from_env() {
    if let Some(n) = threads_from_env() {
        // an already-initialized global pool is fine
        let _ = ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
