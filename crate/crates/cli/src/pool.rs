//! A small indexed worker pool. `DDSAM2_THREADS` caps the worker
//! count; results always come back in index order, so parallel runs
//! produce the same output as sequential ones.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Worker count for `jobs` independent jobs: min(DDSAM2_THREADS or
/// available parallelism, jobs), at least 1.
pub fn thread_limit(jobs: usize) -> usize {
    let hw = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let cap = std::env::var("DDSAM2_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(hw);
    cap.min(jobs.max(1)).max(1)
}

/// Run `f(0..n)` on up to `threads` workers and collect results in
/// index order. Panics in workers propagate.
pub fn run_indexed<T, F>(n: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if n == 0 {
        return Vec::new();
    }
    let threads = threads.clamp(1, n);
    if threads == 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let out = f(i);
                slots.lock().expect("pool poisoned")[i] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .expect("pool poisoned")
        .into_iter()
        .map(|slot| slot.expect("worker filled every slot"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_in_index_order() {
        let out = run_indexed(20, 4, |i| i * i);
        assert_eq!(out, (0..20).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn single_thread_matches_parallel() {
        let a = run_indexed(13, 1, |i| i as u64 * 31);
        let b = run_indexed(13, 8, |i| i as u64 * 31);
        assert_eq!(a, b);
    }

    #[test]
    fn zero_jobs() {
        let out: Vec<usize> = run_indexed(0, 4, |i| i);
        assert!(out.is_empty());
    }
}
