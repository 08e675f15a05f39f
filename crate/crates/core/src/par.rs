//! Deterministic data-parallel primitives.
//!
//! Reductions are defined as the in-order sum of fixed-size chunk partials.
//! The parallel path (feature `parallel`, on by default) evaluates chunk
//! partials concurrently and then combines them in chunk order, so it is
//! bit-identical to the sequential fallback and independent of thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length for all cell reductions. Fixed so that regrouping never
/// depends on thread count.
pub const CHUNK: usize = 4096;

/// Sum of `f(i)` over `0..n`, chunked deterministically.
pub fn sum_indexed<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunk_sums = map_chunks(n, |lo, hi| (lo..hi).map(&f).sum::<f64>());
    chunk_sums.into_iter().fold(0.0, |a, b| a + b)
}

/// Sequential reference for [`sum_indexed`]; same chunking, no rayon.
pub fn sum_indexed_seq<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64,
{
    let nchunks = n.div_ceil(CHUNK);
    let mut total = 0.0;
    for c in 0..nchunks {
        let (lo, hi) = (c * CHUNK, ((c + 1) * CHUNK).min(n));
        total += (lo..hi).map(&f).sum::<f64>();
    }
    total
}

/// Evaluate `f(lo, hi)` on each fixed chunk of `0..n`, in parallel when the
/// feature is enabled, returning partials in chunk order.
pub fn map_chunks<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, usize) -> T + Sync,
{
    let nchunks = n.div_ceil(CHUNK);
    #[cfg(feature = "parallel")]
    {
        (0..nchunks)
            .into_par_iter()
            .map(|c| f(c * CHUNK, ((c + 1) * CHUNK).min(n)))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..nchunks)
            .map(|c| f(c * CHUNK, ((c + 1) * CHUNK).min(n)))
            .collect()
    }
}

/// Fill row `i` of a flattened `n × row` matrix from `f(i, row_slice)`,
/// accumulating the returned per-cell values into chunk partials summed in
/// chunk order. Rows are grouped `CHUNK` at a time so the mutable splits
/// align with the reduction chunks.
pub fn fill_rows_sum<F>(out: &mut [f64], row: usize, f: F) -> f64
where
    F: Fn(usize, &mut [f64]) -> f64 + Sync,
{
    assert_eq!(out.len() % row.max(1), 0);
    let per_chunk = CHUNK * row;
    let body = |(c, chunk): (usize, &mut [f64])| -> f64 {
        let base = c * CHUNK;
        let mut local = 0.0;
        for (k, cell_row) in chunk.chunks_exact_mut(row).enumerate() {
            local += f(base + k, cell_row);
        }
        local
    };
    #[cfg(feature = "parallel")]
    let partials: Vec<f64> = out
        .par_chunks_mut(per_chunk)
        .enumerate()
        .map(body)
        .collect();
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<f64> = out.chunks_mut(per_chunk).enumerate().map(body).collect();
    partials.into_iter().fold(0.0, |a, b| a + b)
}

/// Fill `out[i] = f(i)`, chunked over the output slice.
pub fn fill_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    {
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let base = c * CHUNK;
            for (k, slot) in chunk.iter_mut().enumerate() {
                *slot = f(base + k);
            }
        });
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (c, chunk) in out.chunks_mut(CHUNK).enumerate() {
            let base = c * CHUNK;
            for (k, slot) in chunk.iter_mut().enumerate() {
                *slot = f(base + k);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_sum_is_bit_identical_to_sequential() {
        let f = |i: usize| ((i as f64) * 0.731).sin() / (1.0 + i as f64);
        for n in [0, 1, CHUNK - 1, CHUNK, CHUNK + 1, 3 * CHUNK + 17] {
            let a = sum_indexed(n, f);
            let b = sum_indexed_seq(n, f);
            assert_eq!(a.to_bits(), b.to_bits(), "n = {n}");
        }
    }

    #[test]
    fn fill_matches_serial() {
        let mut out = vec![0.0f64; 2 * CHUNK + 5];
        fill_indexed(&mut out, |i| i as f64 * 1.5);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, i as f64 * 1.5);
        }
    }
}
