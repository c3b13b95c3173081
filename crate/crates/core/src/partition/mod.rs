//! Quasipartitions, their random samplers and exact distributions.

mod relation;
mod separator;
mod support;
mod tree;
mod treewidth;

use rand::RngCore;
use thiserror::Error;

use crate::graph::{GraphError, WeightedDigraph};

pub use relation::{is_r_bounded, transitive_closure, Quasipartition, Relation};
pub use separator::{
    balanced_separator, balanced_separator_within, separator_from_decomposition, SeparatorNode, SeparatorProvider,
    SeparatorTree, TreeDecomposition, MAX_SEPARATOR_CANDIDATES,
};
pub use support::{lipschitz_constant, SupportItem, WeightedSupport};
pub use tree::{sample_tree_quasipartition, tree_quasipartition_support, TreeSampler};
pub use treewidth::{sample_treewidth_quasipartition, treewidth_quasipartition_support, TreewidthSampler};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("graph is not a bidirected tree")]
    NotATree,
    #[error("root {root} out of range for {n} vertices")]
    InvalidRoot { root: usize, n: usize },
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("shift {z} outside [0, {max}]")]
    ShiftOutOfRange { z: f64, max: f64 },
    #[error("no balanced separator with at most {max_size} vertices")]
    SeparatorNotFound { max_size: usize },
    #[error("separator search over {vertices} vertices with size up to {max_size} exceeds the search budget")]
    SearchTooLarge { vertices: usize, max_size: usize },
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub(crate) fn check_radius(r: f64) -> Result<(), PartitionError> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(PartitionError::InvalidRadius(r))
    }
}

pub(crate) fn check_shift(z: f64, half: f64) -> Result<(), PartitionError> {
    if (0.0..=half).contains(&z) {
        Ok(())
    } else {
        Err(PartitionError::ShiftOutOfRange { z, max: half })
    }
}

/// Uniform shift in `[0, r/2]` from the top 53 bits of one 64-bit draw.
pub fn draw_z<R: RngCore + ?Sized>(rng: &mut R, r: f64) -> f64 {
    let unit = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    unit * (r / 2.0)
}

/// Zero every edge weight at most `r / (2n)`.
pub fn epsilon_force_weights(g: &WeightedDigraph, r: f64) -> WeightedDigraph {
    let threshold = r / (2.0 * g.vertex_count() as f64);
    g.map_weights(|e| if e.weight <= threshold { 0.0 } else { e.weight }).expect("zeroing weights keeps them valid")
}

/// A family of quasipartition distributions indexed by radius.
pub trait SupportBuilder {
    /// Exact distribution at radius `radius` on the shortest-path quasimetric of `g`.
    fn build(&self, g: &WeightedDigraph, radius: f64) -> Result<WeightedSupport, PartitionError>;

    /// Proven Lipschitz constant of the family on `n` vertices.
    fn lipschitz_bound(&self, n: usize) -> f64;

    /// Forced variant: small weights zeroed, built at `r/2`, tagged as `r`-bounded.
    fn build_forced(&self, g: &WeightedDigraph, radius: f64) -> Result<WeightedSupport, PartitionError> {
        check_radius(radius)?;
        let forced = epsilon_force_weights(g, radius);
        Ok(self.build(&forced, radius / 2.0)?.with_bound(radius))
    }
}

/// Layered tree distributions rooted at a fixed vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeBuilder {
    pub root: usize,
}

impl SupportBuilder for TreeBuilder {
    fn build(&self, g: &WeightedDigraph, radius: f64) -> Result<WeightedSupport, PartitionError> {
        tree_quasipartition_support(g, radius, self.root)
    }

    fn lipschitz_bound(&self, _n: usize) -> f64 {
        2.0
    }
}

/// Separator-recursion distributions over a precomputed hierarchy.
#[derive(Debug, Clone)]
pub struct TreewidthBuilder {
    pub hierarchy: SeparatorTree,
}

impl TreewidthBuilder {
    pub fn new(g: &WeightedDigraph, provider: &SeparatorProvider) -> Result<Self, PartitionError> {
        Ok(Self { hierarchy: SeparatorTree::build(g, provider)? })
    }

    /// Largest separator used anywhere in the hierarchy.
    pub fn width(&self) -> usize {
        self.hierarchy.max_separator_size()
    }
}

impl SupportBuilder for TreewidthBuilder {
    fn build(&self, g: &WeightedDigraph, radius: f64) -> Result<WeightedSupport, PartitionError> {
        Ok(TreewidthSampler::new(g, radius, self.hierarchy.clone())?.support())
    }

    fn lipschitz_bound(&self, n: usize) -> f64 {
        let levels = crate::metric::floor_log2(n.max(1) as f64) + 1;
        4.0 * self.width().max(1) as f64 * levels as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn forcing_threshold_is_inclusive() {
        let g = WeightedDigraph::bidirected(2, &[(0, 1, 0.5)]).unwrap();
        let forced = epsilon_force_weights(&g, 4.0);
        assert!(forced.edges().iter().all(|e| e.weight == 0.0));
        let g = WeightedDigraph::bidirected(2, &[(0, 1, 1.5)]).unwrap();
        assert_eq!(epsilon_force_weights(&g, 4.0), g);
    }

    #[test]
    fn drawn_shifts_stay_in_range() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let z = draw_z(&mut rng, 3.0);
            assert!((0.0..=1.5).contains(&z));
        }
    }

    #[test]
    fn forced_support_relates_zeroed_pairs() {
        let g = WeightedDigraph::bidirected(3, &[(0, 1, 0.1), (1, 2, 5.0)]).unwrap();
        let support = TreeBuilder { root: 2 }.build_forced(&g, 2.0).unwrap();
        assert_eq!(support.bound(), 2.0);
        assert_eq!(support.removal_probability(0, 1), 0.0);
        assert_eq!(support.removal_probability(1, 0), 0.0);
    }
}
