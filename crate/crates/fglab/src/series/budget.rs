//! Process-wide memory budget for series storage.
//!
//! The limit comes from `FGLAB_MAX_MEMORY_MB` on first use and can be
//! overridden programmatically. Breaching it is a cap-insufficiency failure.

use std::cell::Cell;
use std::sync::atomic::{AtomicU64, Ordering};

use super::SeriesError;

const UNSET: u64 = u64::MAX;
const UNLIMITED: u64 = u64::MAX - 1;

static LIMIT_MB: AtomicU64 = AtomicU64::new(UNSET);

thread_local! {
    static SCOPED_MB: Cell<Option<u64>> = const { Cell::new(None) };
}

fn limit_mb() -> u64 {
    if let Some(mb) = SCOPED_MB.with(Cell::get) {
        return mb;
    }
    let cur = LIMIT_MB.load(Ordering::Relaxed);
    if cur != UNSET {
        return cur;
    }
    let from_env = std::env::var("FGLAB_MAX_MEMORY_MB").ok().and_then(|s| s.trim().parse::<u64>().ok()).unwrap_or(UNLIMITED);
    let _ = LIMIT_MB.compare_exchange(UNSET, from_env, Ordering::Relaxed, Ordering::Relaxed);
    LIMIT_MB.load(Ordering::Relaxed)
}

/// Overrides the budget; `None` removes the limit.
pub fn set_memory_limit_mb(limit: Option<u64>) {
    LIMIT_MB.store(limit.unwrap_or(UNLIMITED), Ordering::Relaxed);
}

/// Runs `f` with a budget that applies to the current thread only.
pub fn with_memory_limit_mb<T>(limit: Option<u64>, f: impl FnOnce() -> T) -> T {
    let prev = SCOPED_MB.with(|c| c.replace(Some(limit.unwrap_or(UNLIMITED))));
    let out = f();
    SCOPED_MB.with(|c| c.set(prev));
    out
}

/// The active budget in megabytes, if any.
pub fn memory_limit_mb() -> Option<u64> {
    match limit_mb() {
        UNLIMITED => None,
        mb => Some(mb),
    }
}

/// Estimated bytes for `terms` stored terms over `vars` variables.
pub fn estimate_bytes(terms: usize, vars: usize, coef_bytes: usize) -> u64 {
    (terms as u64) * (48 + 2 * vars as u64 + coef_bytes as u64)
}

/// Fails when the estimate exceeds the budget.
pub fn check(terms: usize, vars: usize, coef_bytes: usize) -> Result<(), SeriesError> {
    let Some(mb) = memory_limit_mb() else {
        return Ok(());
    };
    let bytes = estimate_bytes(terms, vars, coef_bytes);
    let limit = mb.saturating_mul(1 << 20);
    if bytes > limit {
        Err(SeriesError::MemoryCap { estimated_bytes: bytes, limit_bytes: limit })
    } else {
        Ok(())
    }
}
