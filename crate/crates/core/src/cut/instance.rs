use std::cmp::Ordering;

use super::CutError;
use crate::graph::WeightedDigraph;

/// A demand pair `(s, t)` with non-negative demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalPair {
    pub source: usize,
    pub sink: usize,
    pub demand: f64,
}

impl TerminalPair {
    pub fn new(source: usize, sink: usize, demand: f64) -> Self {
        Self { source, sink, demand }
    }
}

/// A capacitated digraph with terminal pairs. Edge weights are capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct CutInstance {
    graph: WeightedDigraph,
    pairs: Vec<TerminalPair>,
}

impl CutInstance {
    pub fn new(graph: WeightedDigraph, pairs: Vec<TerminalPair>) -> Result<Self, CutError> {
        let n = graph.vertex_count();
        for (i, p) in pairs.iter().enumerate() {
            if p.source >= n || p.sink >= n {
                return Err(CutError::InvalidPair { index: i, reason: "vertex out of range" });
            }
            if p.source == p.sink {
                return Err(CutError::InvalidPair { index: i, reason: "source equals sink" });
            }
            if !(p.demand >= 0.0 && p.demand.is_finite()) {
                return Err(CutError::InvalidPair { index: i, reason: "demand must be finite and non-negative" });
            }
        }
        if !pairs.iter().any(|p| p.demand > 0.0) {
            return Err(CutError::NoDemand);
        }
        Ok(Self { graph, pairs })
    }

    pub fn graph(&self) -> &WeightedDigraph {
        &self.graph
    }

    pub fn pairs(&self) -> &[TerminalPair] {
        &self.pairs
    }

    /// Same graph with every listed pair at demand 1.
    pub fn with_unit_demands(&self, indices: &[usize]) -> Result<Self, CutError> {
        let pairs = indices.iter().map(|&i| TerminalPair { demand: 1.0, ..self.pairs[i] }).collect();
        Self::new(self.graph.clone(), pairs)
    }
}

/// An edge set with its capacity and the pairs it disconnects.
#[derive(Debug, Clone, PartialEq)]
pub struct CutResult {
    /// Edge ids, ascending.
    pub edges: Vec<usize>,
    pub capacity: f64,
    /// Indices of pairs with no path from source to sink once `edges` are removed.
    pub separated: Vec<usize>,
    pub separated_demand: f64,
    /// `capacity / separated_demand`, infinite when no demand is separated.
    pub sparsity: f64,
}

impl CutResult {
    /// Order used to pick among cuts: sparsity, then size, then edge ids.
    pub fn preference(&self, other: &Self) -> Ordering {
        self.sparsity
            .total_cmp(&other.sparsity)
            .then(self.edges.len().cmp(&other.edges.len()))
            .then_with(|| self.edges.cmp(&other.edges))
    }
}

/// Recomputes which pairs `edges` disconnects and the resulting sparsity.
pub fn sparsity_of(inst: &CutInstance, edges: &[usize]) -> CutResult {
    let g = inst.graph();
    let mut edges = edges.to_vec();
    edges.sort_unstable();
    edges.dedup();
    let mut removed = vec![false; g.edge_count()];
    for &id in &edges {
        assert!(id < g.edge_count(), "edge id {id} out of range");
        removed[id] = true;
    }
    let out = g.out_edges();
    let mut separated = Vec::new();
    let mut separated_demand = 0.0;
    for (i, p) in inst.pairs().iter().enumerate() {
        if !reaches(g, &out, &removed, p.source, p.sink) {
            separated.push(i);
            separated_demand += p.demand;
        }
    }
    let capacity: f64 = edges.iter().map(|&id| g.edge(id).weight).sum();
    let sparsity = if separated_demand > 0.0 { capacity / separated_demand } else { f64::INFINITY };
    CutResult { edges, capacity, separated, separated_demand, sparsity }
}

fn reaches(g: &WeightedDigraph, out: &[Vec<usize>], removed: &[bool], from: usize, to: usize) -> bool {
    let mut seen = vec![false; g.vertex_count()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(u) = stack.pop() {
        if u == to {
            return true;
        }
        for &id in &out[u] {
            let head = g.edge(id).head;
            if !removed[id] && !seen[head] {
                seen[head] = true;
                stack.push(head);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn single_edge(cap: f64, dem: f64) -> CutInstance {
        let g = WeightedDigraph::new(2, vec![Edge::new(0, 1, cap)]).unwrap();
        CutInstance::new(g, vec![TerminalPair::new(0, 1, dem)]).unwrap()
    }

    #[test]
    fn single_edge_sparsity() {
        let r = sparsity_of(&single_edge(3.0, 2.0), &[0]);
        assert_eq!(r.sparsity, 1.5);
        assert_eq!(r.separated, vec![0]);
        let r = sparsity_of(&single_edge(3.0, 2.0), &[]);
        assert_eq!(r.sparsity, f64::INFINITY);
        assert!(r.separated.is_empty());
    }

    #[test]
    fn removing_everything_separates_connected_pairs() {
        let g = WeightedDigraph::bidirected(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let inst = CutInstance::new(g, vec![TerminalPair::new(0, 2, 1.0), TerminalPair::new(2, 1, 2.0)]).unwrap();
        let all: Vec<usize> = (0..4).collect();
        let r = sparsity_of(&inst, &all);
        assert_eq!(r.separated, vec![0, 1]);
        assert_eq!(r.capacity, 4.0);
    }

    #[test]
    fn instance_validation() {
        let g = WeightedDigraph::bidirected(2, &[(0, 1, 1.0)]).unwrap();
        assert!(CutInstance::new(g.clone(), vec![TerminalPair::new(0, 0, 1.0)]).is_err());
        assert!(CutInstance::new(g.clone(), vec![TerminalPair::new(0, 2, 1.0)]).is_err());
        assert_eq!(CutInstance::new(g, vec![TerminalPair::new(0, 1, 0.0)]), Err(CutError::NoDemand));
    }
}
