//! Reductions whose result does not depend on the worker count.

use std::ops::Range;

use rayon::prelude::*;

/// Maps fixed-size chunks of 0..len in parallel and returns the results in
/// chunk order; chunk boundaries never depend on the thread pool.
pub fn chunk_map<T: Send>(len: usize, chunk: usize, f: impl Fn(Range<usize>) -> T + Sync) -> Vec<T> {
    let chunks = len.div_ceil(chunk.max(1));
    (0..chunks).into_par_iter().map(|c| f(c * chunk..((c + 1) * chunk).min(len))).collect()
}

/// Sum with a fixed binary tree over the slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        len if len <= 8 => xs.iter().sum(),
        len => {
            let (a, b) = xs.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
