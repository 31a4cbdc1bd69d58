use alloc::vec::Vec;
use core::ops::Range;

/// Runs chunked work. Implementations may spread chunks over threads; every
/// chunk is processed by one call of `f`, so results never depend on the
/// schedule.
pub trait Executor: Sync {
    /// Calls `f(index of first element, chunk)` on consecutive chunks of
    /// `data` of length `chunk_len` (the last one may be shorter).
    fn for_chunks<T, F>(&self, data: &mut [T], chunk_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync;

    fn threads(&self) -> usize {
        1
    }

    /// Evaluates `f` on the ranges `0..n` cut every `chunk_len` and returns
    /// the results in range order.
    fn map_ranges<R, F>(&self, n: usize, chunk_len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(Range<usize>) -> R + Sync,
    {
        let chunk_len = chunk_len.max(1);
        let n_chunks = n.div_ceil(chunk_len);
        let mut out: Vec<Option<R>> = (0..n_chunks).map(|_| None).collect();
        self.for_chunks(&mut out, 1, |i, slot| {
            let start = i * chunk_len;
            slot[0] = Some(f(start..(start + chunk_len).min(n)));
        });
        out.into_iter()
            .map(|r| r.expect("every chunk runs"))
            .collect()
    }
}

/// Runs everything on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn for_chunks<T, F>(&self, data: &mut [T], chunk_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync,
    {
        let chunk_len = chunk_len.max(1);
        for (i, chunk) in data.chunks_mut(chunk_len).enumerate() {
            f(i * chunk_len, chunk);
        }
    }
}
