//! Seeded fixtures shared by the benchmarks.

use quasicut_core::gen::{random_cut_instance, random_tree, random_treewidth2};
use quasicut_core::{CutInstance, TreeDecomposition, WeightedDigraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed;

pub fn tree(n: usize) -> WeightedDigraph {
    random_tree(&mut ChaCha8Rng::seed_from_u64(SEED ^ n as u64), n)
}

pub fn treewidth2(n: usize) -> (WeightedDigraph, TreeDecomposition) {
    random_treewidth2(&mut ChaCha8Rng::seed_from_u64(SEED ^ n as u64), n, 0.9)
}

/// A cut instance with exactly `n` vertices and at least one connected pair.
pub fn cut_instance(n: usize) -> (CutInstance, TreeDecomposition) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ n as u64);
    loop {
        let (inst, td) = random_cut_instance(&mut rng, n, 2 * n, 3);
        if inst.graph().vertex_count() == n {
            return (inst, td);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_requested_sizes() {
        assert_eq!(tree(9).vertex_count(), 9);
        assert_eq!(treewidth2(7).0.vertex_count(), 7);
        assert_eq!(cut_instance(6).0.graph().vertex_count(), 6);
    }
}
