//! Weighted directed graphs and their shortest-path quasimetrics.

use std::collections::BTreeMap;

use crate::metric::{DistanceMatrix, Quasimetric};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("edge ({tail}, {head}) references a vertex outside 0..{n}")]
    VertexOutOfRange { tail: usize, head: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({tail}, {head})")]
    DuplicateEdge { tail: usize, head: usize },
    #[error("edge ({tail}, {head}) has weight {weight}; weights must be finite and non-negative")]
    InvalidWeight { tail: usize, head: usize, weight: f64 },
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("graph has a directed cycle")]
    NotADag,
    #[error("graph has {n} vertices, limit is {limit}")]
    TooLarge { n: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    /// Length for distance computations and capacity for cuts.
    pub weight: f64,
}

impl Edge {
    pub fn new(tail: usize, head: usize, weight: f64) -> Self {
        Self { tail, head, weight }
    }
}

/// A directed graph on vertices `0..n` with at most one edge per ordered
/// pair, no self-loops and finite non-negative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    n: usize,
    edges: Vec<Edge>,
    index: BTreeMap<(usize, usize), usize>,
}

impl WeightedDigraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut index = BTreeMap::new();
        for (id, e) in edges.iter().enumerate() {
            if e.tail >= n || e.head >= n {
                return Err(GraphError::VertexOutOfRange { tail: e.tail, head: e.head, n });
            }
            if e.tail == e.head {
                return Err(GraphError::SelfLoop(e.tail));
            }
            if !(e.weight.is_finite() && e.weight >= 0.0) {
                return Err(GraphError::InvalidWeight { tail: e.tail, head: e.head, weight: e.weight });
            }
            if index.insert((e.tail, e.head), id).is_some() {
                return Err(GraphError::DuplicateEdge { tail: e.tail, head: e.head });
            }
        }
        Ok(Self { n, edges, index })
    }

    /// Graph with an edge in each direction for every `(u, v, w)` triple.
    pub fn bidirected(n: usize, undirected: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let edges = undirected.iter().flat_map(|&(u, v, w)| [Edge::new(u, v, w), Edge::new(v, u, w)]).collect();
        Self::new(n, edges)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn edge_id(&self, tail: usize, head: usize) -> Option<usize> {
        self.index.get(&(tail, head)).copied()
    }

    pub fn has_edge(&self, tail: usize, head: usize) -> bool {
        self.index.contains_key(&(tail, head))
    }

    /// Same structure, new weights (one per edge, in edge order).
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self, GraphError> {
        if weights.len() != self.edges.len() {
            return Err(GraphError::WeightCount { expected: self.edges.len(), got: weights.len() });
        }
        let edges = self.edges.iter().zip(weights).map(|(e, &w)| Edge::new(e.tail, e.head, w)).collect();
        Self::new(self.n, edges)
    }

    pub fn map_weights(&self, mut f: impl FnMut(&Edge) -> f64) -> Result<Self, GraphError> {
        let weights: Vec<f64> = self.edges.iter().map(&mut f).collect();
        self.with_weights(&weights)
    }

    pub fn check_size(&self, limit: usize) -> Result<(), GraphError> {
        if self.n > limit {
            Err(GraphError::TooLarge { n: self.n, limit })
        } else {
            Ok(())
        }
    }

    /// Out-neighbour lists (edge ids), in edge order.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for (id, e) in self.edges.iter().enumerate() {
            adj[e.tail].push(id);
        }
        adj
    }

    /// Neighbour lists of the underlying undirected graph, sorted and deduplicated.
    pub fn undirected_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Weakly connected components of the subgraph induced by the vertices
    /// with `alive[v]`. Each component is sorted; components are ordered by
    /// their smallest vertex.
    pub fn weak_components(&self, alive: &[bool]) -> Vec<Vec<usize>> {
        let adj = self.undirected_neighbors();
        let mut seen = vec![false; self.n];
        let mut components = Vec::new();
        for start in 0..self.n {
            if !alive[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut component = Vec::new();
            while let Some(u) = stack.pop() {
                component.push(u);
                for &w in &adj[u] {
                    if alive[w] && !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components
    }

    pub fn is_dag(&self) -> bool {
        let mut indegree = vec![0usize; self.n];
        for e in &self.edges {
            indegree[e.head] += 1;
        }
        let out = self.out_edges();
        let mut ready: Vec<usize> = (0..self.n).filter(|&v| indegree[v] == 0).collect();
        let mut visited = 0;
        while let Some(u) = ready.pop() {
            visited += 1;
            for &id in &out[u] {
                let h = self.edges[id].head;
                indegree[h] -= 1;
                if indegree[h] == 0 {
                    ready.push(h);
                }
            }
        }
        visited == self.n
    }
}

/// All-pairs shortest directed path lengths by Floyd-Warshall relaxation.
///
/// Unreachable pairs are `+inf`.
pub fn shortest_path_quasimetric(g: &WeightedDigraph) -> Quasimetric {
    let n = g.vertex_count();
    let mut d = vec![f64::INFINITY; n * n];
    for x in 0..n {
        d[x * n + x] = 0.0;
    }
    for e in g.edges() {
        let slot = &mut d[e.tail * n + e.head];
        if e.weight < *slot {
            *slot = e.weight;
        }
    }
    for k in 0..n {
        let (row_k_start, row_k_end) = (k * n, k * n + n);
        let row_k: Vec<f64> = d[row_k_start..row_k_end].to_vec();
        for i in 0..n {
            let dik = d[i * n + k];
            if dik == f64::INFINITY {
                continue;
            }
            let row_i = &mut d[i * n..i * n + n];
            for (dij, &dkj) in row_i.iter_mut().zip(&row_k) {
                let via = dik + dkj;
                if via < *dij {
                    *dij = via;
                }
            }
        }
    }
    let rows: Vec<Vec<f64>> = d.chunks(n).map(<[f64]>::to_vec).collect();
    Quasimetric::from_trusted(DistanceMatrix::from_rows(&rows).expect("shortest paths are non-negative"))
}

/// True iff every edge has its reverse and the underlying undirected graph is
/// a spanning tree.
pub fn is_bidirected_tree(g: &WeightedDigraph) -> bool {
    if g.edges().iter().any(|e| !g.has_edge(e.head, e.tail)) {
        return false;
    }
    let n = g.vertex_count();
    // every undirected edge appears as two directed edges
    if g.edge_count() != 2 * (n - 1) {
        return false;
    }
    g.weak_components(&vec![true; n]).len() == 1
}

/// Replaces every edge `(u, v)` by the path `u -> x_uv -> y_uv -> v`, each
/// piece carrying a third of the original weight.
///
/// The new vertices for the `k`-th input edge are `n + 2k` (`x_uv`) and
/// `n + 2k + 1` (`y_uv`).
pub fn subdivide_three(g: &WeightedDigraph) -> Result<WeightedDigraph, GraphError> {
    if !g.is_dag() {
        return Err(GraphError::NotADag);
    }
    let n = g.vertex_count();
    let mut edges = Vec::with_capacity(3 * g.edge_count());
    for (k, e) in g.edges().iter().enumerate() {
        let x = n + 2 * k;
        let y = x + 1;
        let w = e.weight / 3.0;
        edges.push(Edge::new(e.tail, x, w));
        edges.push(Edge::new(x, y, w));
        edges.push(Edge::new(y, e.head, w));
    }
    WeightedDigraph::new(n + 2 * g.edge_count(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> WeightedDigraph {
        WeightedDigraph::new(n, edges.iter().map(|&(u, v, w)| Edge::new(u, v, w)).collect()).unwrap()
    }

    #[test]
    fn single_edge_distances() {
        let m = shortest_path_quasimetric(&graph(2, &[(0, 1, 3.0)]));
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), f64::INFINITY);
    }

    #[test]
    fn two_cycle_uses_direct_edges() {
        let m = shortest_path_quasimetric(&graph(2, &[(0, 1, 1.0), (1, 0, 2.0)]));
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(1, 0), 2.0);
    }

    #[test]
    fn path_sums_weights() {
        let m = shortest_path_quasimetric(&graph(3, &[(0, 1, 1.0), (1, 2, 2.0)]));
        assert_eq!(m.get(0, 2), 3.0);
        assert_eq!(m.get(2, 0), f64::INFINITY);
    }

    #[test]
    fn zero_weight_cycle_gives_distinct_points_at_zero() {
        let m = shortest_path_quasimetric(&graph(2, &[(0, 1, 0.0), (1, 0, 0.0)]));
        assert_eq!(m.get(0, 1), 0.0);
        assert!(crate::metric::validate_quasimetric(&m).is_ok());
    }

    #[test]
    fn rejects_malformed_edges() {
        let e = |u, v, w| Edge::new(u, v, w);
        assert_eq!(WeightedDigraph::new(2, vec![e(0, 0, 1.0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(
            WeightedDigraph::new(2, vec![e(0, 1, 1.0), e(0, 1, 2.0)]),
            Err(GraphError::DuplicateEdge { tail: 0, head: 1 })
        );
        assert!(matches!(WeightedDigraph::new(2, vec![e(0, 2, 1.0)]), Err(GraphError::VertexOutOfRange { .. })));
        assert!(matches!(WeightedDigraph::new(2, vec![e(0, 1, -1.0)]), Err(GraphError::InvalidWeight { .. })));
        assert!(matches!(WeightedDigraph::new(2, vec![e(0, 1, f64::INFINITY)]), Err(GraphError::InvalidWeight { .. })));
        assert_eq!(WeightedDigraph::new(0, vec![]), Err(GraphError::NoVertices));
    }

    #[test]
    fn bidirected_tree_recognition() {
        assert!(is_bidirected_tree(&WeightedDigraph::bidirected(2, &[(0, 1, 1.0)]).unwrap()));
        assert!(!is_bidirected_tree(&graph(2, &[(0, 1, 1.0)])));
        let triangle = WeightedDigraph::bidirected(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        assert!(!is_bidirected_tree(&triangle));
        // forest: two components
        assert!(!is_bidirected_tree(&WeightedDigraph::bidirected(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap()));
        assert!(is_bidirected_tree(&graph(1, &[])));
    }

    #[test]
    fn subdivision_of_single_edge() {
        let g = subdivide_three(&graph(2, &[(0, 1, 3.0)])).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edges(), &[Edge::new(0, 2, 1.0), Edge::new(2, 3, 1.0), Edge::new(3, 1, 1.0)]);
    }

    #[test]
    fn subdivision_of_empty_graph_is_identity() {
        let g = graph(2, &[]);
        assert_eq!(subdivide_three(&g).unwrap(), g);
    }

    #[test]
    fn subdivision_rejects_cycles() {
        assert_eq!(subdivide_three(&graph(2, &[(0, 1, 1.0), (1, 0, 1.0)])), Err(GraphError::NotADag));
    }

    #[test]
    fn weak_components_respect_mask() {
        let g = graph(5, &[(0, 1, 1.0), (2, 1, 1.0), (3, 4, 1.0)]);
        assert_eq!(g.weak_components(&[true; 5]), vec![vec![0, 1, 2], vec![3, 4]]);
        assert_eq!(g.weak_components(&[true, false, true, true, true]), vec![vec![0], vec![2], vec![3, 4]]);
    }
}
