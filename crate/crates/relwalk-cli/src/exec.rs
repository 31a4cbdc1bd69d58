//! Scoped-thread executor.

use relwalk::Executor;

/// Splits the chunk list into `threads` contiguous groups, one scoped thread
/// each. Every chunk is handled by exactly one call, so results do not
/// depend on the thread count.
#[derive(Debug, Clone, Copy)]
pub struct Threaded {
    threads: usize,
}

impl Threaded {
    pub fn new(threads: usize) -> Self {
        Threaded {
            threads: threads.max(1),
        }
    }
}

impl Executor for Threaded {
    fn for_chunks<T, F>(&self, data: &mut [T], chunk_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync,
    {
        let chunk_len = chunk_len.max(1);
        let mut chunks: Vec<(usize, &mut [T])> = data
            .chunks_mut(chunk_len)
            .enumerate()
            .map(|(i, c)| (i * chunk_len, c))
            .collect();
        if self.threads == 1 || chunks.len() < 2 {
            for (start, c) in chunks {
                f(start, c);
            }
            return;
        }
        let per = chunks.len().div_ceil(self.threads);
        let f = &f;
        std::thread::scope(|scope| {
            while !chunks.is_empty() {
                let rest = chunks.split_off(per.min(chunks.len()));
                let group = std::mem::replace(&mut chunks, rest);
                scope.spawn(move || {
                    for (start, c) in group {
                        f(start, c);
                    }
                });
            }
        });
    }

    fn threads(&self) -> usize {
        self.threads
    }
}
