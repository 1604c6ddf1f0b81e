//! Chunked Monte Carlo: chunk `c` of grid cell `i` draws from stream
//! `(i << 32) | c`, and results are concatenated in chunk order, so the
//! output never depends on how many threads did the work.

use crate::error::{Error, Result};

pub(crate) fn stream_id(cell: usize, chunk: usize) -> u64 {
    ((cell as u64) << 32) | chunk as u64
}

/// Runs `f(stream, start, len)` for every chunk of `samples` and returns the
/// concatenated per-chunk outputs.
pub(crate) fn run_chunks<T, F>(cell: usize, samples: usize, chunk_size: usize, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, usize, usize) -> Result<Vec<T>> + Sync,
{
    let n_chunks = samples.div_ceil(chunk_size);
    if n_chunks > u32::MAX as usize {
        return Err(Error::Config(format!("{samples} samples need too many chunks of {chunk_size}")));
    }
    let job = |c: usize| {
        let start = c * chunk_size;
        f(stream_id(cell, c), start, chunk_size.min(samples - start))
    };
    let parts: Vec<Result<Vec<T>>> = map_indexed(n_chunks, workers, job);
    let mut out = Vec::with_capacity(samples);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// `(0..count).map(job)` in index order, spread over `workers` threads.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T: Send>(count: usize, workers: usize, job: impl Fn(usize) -> T + Sync) -> Vec<T> {
    use rayon::prelude::*;
    if workers <= 1 || count <= 1 {
        return (0..count).map(job).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| (0..count).into_par_iter().map(&job).collect()),
        Err(_) => (0..count).map(job).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T: Send>(count: usize, _workers: usize, job: impl Fn(usize) -> T + Sync) -> Vec<T> {
    (0..count).map(job).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamRng;

    fn draws(workers: usize, chunk: usize) -> Vec<(u64, usize, f64)> {
        run_chunks(3, 2500, chunk, workers, |stream, start, len| {
            let mut r = StreamRng::new(11, stream);
            Ok((0..len).map(|i| (stream, start + i, r.uniform())).collect())
        })
        .unwrap()
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let a = draws(1, 1000);
        assert_eq!(a.len(), 2500);
        assert_eq!(a, draws(4, 1000));
        assert_eq!(a, draws(7, 1000));
        assert_eq!(a[1000].0, (3u64 << 32) | 1);
        assert!(a.iter().enumerate().all(|(i, d)| d.1 == i));
    }

    #[test]
    fn errors_propagate() {
        let r: Result<Vec<()>> = run_chunks(0, 10, 3, 2, |s, _, _| {
            if s == 2 {
                Err(Error::Numeric("boom".into()))
            } else {
                Ok(vec![])
            }
        });
        assert!(matches!(r, Err(Error::Numeric(_))));
    }
}
