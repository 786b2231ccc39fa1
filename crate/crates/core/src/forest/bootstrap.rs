//! Per-tree random streams, bootstrap bags and feature subsets.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random stream owned by one tree.
pub type TreeRng = ChaCha8Rng;

/// Stream for tree `tree_index` of a forest seeded with `seed`.
///
/// Each tree gets its own ChaCha stream under the master seed, so trees can
/// be grown in any order or in parallel with identical results.
pub fn tree_rng(seed: u64, tree_index: usize) -> TreeRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree_index as u64);
    rng
}

/// `n` independent uniform draws from `0..n`.
pub fn bootstrap<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    (0..n)
        .map(|_| rng.random_range(0..n as u64) as usize)
        .collect()
}

/// A uniformly random `m`-subset of `0..total`, sorted ascending.
pub fn random_subset<R: Rng + ?Sized>(m: usize, total: usize, rng: &mut R) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..total).collect();
    let m = m.min(total);
    for i in 0..m {
        let j = rng.random_range(i as u64..total as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(m);
    pool.sort_unstable();
    pool
}
