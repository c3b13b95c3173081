//! Random quasipartitions of graphs with small balanced separators.
//!
//! One shift `z` is shared by the whole recursion. At every node of the
//! separator hierarchy, each edge `(u, v)` of the current subgraph is dropped
//! if for some separator vertex `x` the ball of radius `z` around `x` (in
//! either direction, measured in the original graph) contains the head but
//! not the tail of the step. Surviving edges are then closed transitively.

use super::relation::{transitive_closure, Quasipartition, Relation};
use super::separator::{SeparatorProvider, SeparatorTree};
use super::support::WeightedSupport;
use super::{check_radius, check_shift, PartitionError};
use crate::graph::{shortest_path_quasimetric, WeightedDigraph};
use crate::metric::Quasimetric;

#[derive(Debug, Clone)]
pub struct TreewidthSampler {
    radius: f64,
    metric: Quasimetric,
    edges: Vec<(usize, usize)>,
    /// For each edge, the separator vertices it is tested against, one entry
    /// per recursion level that still contains the edge.
    checks: Vec<Vec<usize>>,
    hierarchy: SeparatorTree,
}

impl TreewidthSampler {
    pub fn new(g: &WeightedDigraph, radius: f64, hierarchy: SeparatorTree) -> Result<Self, PartitionError> {
        check_radius(radius)?;
        assert_eq!(hierarchy.vertex_count(), g.vertex_count(), "hierarchy built for another graph");
        let n = g.vertex_count();
        let edges: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.tail, e.head)).collect();
        let mut checks = vec![Vec::new(); edges.len()];
        let mut inside = vec![false; n];
        for node in hierarchy.nodes() {
            for &v in &node.vertices {
                inside[v] = true;
            }
            for (id, &(u, v)) in edges.iter().enumerate() {
                if inside[u] && inside[v] {
                    checks[id].extend_from_slice(&node.separator);
                }
            }
            for &v in &node.vertices {
                inside[v] = false;
            }
        }
        Ok(Self { radius, metric: shortest_path_quasimetric(g), edges, checks, hierarchy })
    }

    pub fn with_provider(
        g: &WeightedDigraph,
        radius: f64,
        provider: &SeparatorProvider,
    ) -> Result<Self, PartitionError> {
        Self::new(g, radius, SeparatorTree::build(g, provider)?)
    }

    pub fn metric(&self) -> &Quasimetric {
        &self.metric
    }

    pub fn hierarchy(&self) -> &SeparatorTree {
        &self.hierarchy
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn half(&self) -> f64 {
        self.radius / 2.0
    }

    fn is_cut(&self, id: usize, z: f64) -> bool {
        let (u, v) = self.edges[id];
        let m = &self.metric;
        self.checks[id].iter().any(|&x| (m.get(u, x) > z && m.get(v, x) <= z) || (m.get(x, v) > z && m.get(x, u) <= z))
    }

    pub fn sample(&self, z: f64) -> Result<Quasipartition, PartitionError> {
        check_shift(z, self.half())?;
        let mut rel = Relation::empty(self.metric.size());
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            if !self.is_cut(id, z) {
                rel.insert(u, v);
            }
        }
        Ok(transitive_closure(&rel))
    }

    /// Exact distribution over `z ~ Uniform[0, r/2]`. The outcome can only
    /// change where `z` equals some pairwise distance, so those distances are
    /// the breakpoints.
    pub fn support(&self) -> WeightedSupport {
        let breakpoints: Vec<f64> = self.metric.off_diagonal().map(|(u, v)| self.metric.get(u, v)).collect();
        WeightedSupport::from_breakpoints(breakpoints, self.half(), self.radius, |z| self.sample(z))
            .expect("midpoints lie inside the shift range")
    }
}

/// One draw for shift `z` in `[0, r/2]`.
pub fn sample_treewidth_quasipartition(
    g: &WeightedDigraph,
    radius: f64,
    provider: &SeparatorProvider,
    z: f64,
) -> Result<Quasipartition, PartitionError> {
    TreewidthSampler::with_provider(g, radius, provider)?.sample(z)
}

/// Exact distribution of [`sample_treewidth_quasipartition`] over uniform `z`.
pub fn treewidth_quasipartition_support(
    g: &WeightedDigraph,
    radius: f64,
    provider: &SeparatorProvider,
) -> Result<WeightedSupport, PartitionError> {
    Ok(TreewidthSampler::with_provider(g, radius, provider)?.support())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn pair() -> WeightedDigraph {
        WeightedDigraph::bidirected(2, &[(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn pair_is_cut_below_unit_shift_for_either_separator() {
        let g = pair();
        let provider = SeparatorProvider::Exhaustive { max_size: 1 };
        assert_eq!(sample_treewidth_quasipartition(&g, 4.0, &provider, 0.5).unwrap(), Quasipartition::identity(2));
        assert_eq!(sample_treewidth_quasipartition(&g, 4.0, &provider, 1.0).unwrap(), Quasipartition::full(2));
        // a single bag makes both endpoints separator vertices
        let td = crate::partition::TreeDecomposition::new(vec![vec![0, 1]], vec![]);
        let tree = SeparatorTree::build(&g, &SeparatorProvider::Decomposition(td)).unwrap();
        let sampler = TreewidthSampler::new(&g, 4.0, tree).unwrap();
        assert_eq!(sampler.sample(0.5).unwrap(), Quasipartition::identity(2));
        assert_eq!(sampler.sample(1.5).unwrap(), Quasipartition::full(2));
    }

    #[test]
    fn pair_support_has_two_halves() {
        let support =
            treewidth_quasipartition_support(&pair(), 4.0, &SeparatorProvider::Exhaustive { max_size: 1 }).unwrap();
        assert_eq!(support.len(), 2);
        assert_eq!(support.items()[0].partition, Quasipartition::identity(2));
        assert_eq!(support.items()[0].weight, 0.5);
        assert_eq!(support.items()[1].partition, Quasipartition::full(2));
        assert_eq!(support.items()[1].weight, 0.5);
    }

    #[test]
    fn large_radius_keeps_mutually_reachable_pairs() {
        // 0 <-> 1 -> 2, plus 2 -> 3
        let g = WeightedDigraph::new(
            4,
            vec![Edge::new(0, 1, 1.0), Edge::new(1, 0, 2.0), Edge::new(1, 2, 1.5), Edge::new(2, 3, 0.5)],
        )
        .unwrap();
        let provider = SeparatorProvider::Exhaustive { max_size: 2 };
        let p = sample_treewidth_quasipartition(&g, 100.0, &provider, 50.0).unwrap();
        let m = shortest_path_quasimetric(&g);
        for u in 0..4 {
            for v in 0..4 {
                assert_eq!(p.contains(u, v), m.get(u, v).is_finite(), "({u},{v})");
            }
        }
    }

    #[test]
    fn separator_failure_propagates() {
        let mut edges = Vec::new();
        for u in 0..4 {
            for v in u + 1..4 {
                edges.push((u, v, 1.0));
            }
        }
        let k4 = WeightedDigraph::bidirected(4, &edges).unwrap();
        let err = sample_treewidth_quasipartition(&k4, 1.0, &SeparatorProvider::Exhaustive { max_size: 1 }, 0.1);
        assert_eq!(err, Err(PartitionError::SeparatorNotFound { max_size: 1 }));
    }
}
