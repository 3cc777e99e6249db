//! Seeded fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rankagg::gossip::gap_and_spread;
use rankagg::perm::random_permutation;
use rankagg::{AdjacentWeights, Permutation, Profile};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pairs(n: usize, count: usize, seed: u64) -> Vec<(Permutation, Permutation)> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| (random_permutation(n, &mut rng).unwrap(), random_permutation(n, &mut rng).unwrap()))
        .collect()
}

pub fn decreasing_weights(n: usize, seed: u64) -> AdjacentWeights {
    let mut rng = rng(seed);
    let mut w: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.0..10.0)).collect();
    w.sort_by(|a, b| b.total_cmp(a));
    AdjacentWeights::new(w).unwrap()
}

pub fn profile(n: usize, m: usize, seed: u64) -> Profile {
    let mut rng = rng(seed);
    Profile::new((0..m).map(|_| random_permutation(n, &mut rng).unwrap()).collect()).unwrap()
}

/// A profile whose Borda means are pairwise distinct, so the tail bound applies.
pub fn strict_profile(n: usize, m: usize, seed: u64) -> Profile {
    (seed..).map(|s| profile(n, m, s)).find(|p| !gap_and_spread(p).is_degenerate()).unwrap()
}
