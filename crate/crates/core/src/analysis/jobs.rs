use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use crate::error::{Error, Result};

/// Evaluates `job(0..count)` on `workers` threads pulling indices from a
/// shared counter. Results come back in index order, so the output does not
/// depend on the worker count. The error of the lowest failing index wins.
pub fn run_jobs<T, F>(count: usize, workers: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    if workers == 0 {
        return Err(Error::InvalidArgument(
            "worker count must be at least 1".into(),
        ));
    }
    if workers == 1 || count <= 1 {
        return (0..count).map(&job).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<T>>>> = Mutex::new((0..count).map(|_| None).collect());
    thread::scope(|scope| {
        for _ in 0..workers.min(count) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= count {
                    break;
                }
                let r = job(k);
                slots.lock().expect("job slot lock poisoned")[k] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("job slot lock poisoned")
        .into_iter()
        .map(|r| r.expect("every job index is visited"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_independent_of_workers() {
        let one = run_jobs(37, 1, |k| Ok(k * k)).unwrap();
        let four = run_jobs(37, 4, |k| Ok(k * k)).unwrap();
        assert_eq!(one, four);
        assert_eq!(one[6], 36);
    }

    #[test]
    fn first_error_wins() {
        let r = run_jobs(10, 3, |k| {
            if k == 4 || k == 7 {
                Err(Error::InvalidArgument(format!("job {k}")))
            } else {
                Ok(k)
            }
        });
        match r {
            Err(Error::InvalidArgument(m)) => assert_eq!(m, "job 4"),
            other => panic!("{other:?}"),
        }
        assert!(run_jobs(3, 0, Ok::<usize, Error>).is_err());
    }
}
