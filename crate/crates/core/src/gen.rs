//! Seeded random instances: bidirected trees, treewidth-2 graphs with their
//! decompositions, and small cut instances. Weights are multiples of 1/2 so
//! that distance sums and dyadic radii stay exact in floating point.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::cut::{CutInstance, TerminalPair};
use crate::graph::{shortest_path_quasimetric, Edge, WeightedDigraph};
use crate::partition::TreeDecomposition;

/// A weight in `{0, 1/2, 1, ..., 8}`, zero with probability `zero_rate`.
pub fn half_integer_weight<R: Rng + ?Sized>(rng: &mut R, zero_rate: f64) -> f64 {
    if rng.random_bool(zero_rate) {
        0.0
    } else {
        f64::from(rng.random_range(1..=16u32)) / 2.0
    }
}

/// Random tree on `n` vertices with independent weights in each direction.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, n: usize) -> WeightedDigraph {
    let mut edges = Vec::with_capacity(2 * n.saturating_sub(1));
    for v in 1..n {
        let parent = rng.random_range(0..v);
        edges.push(Edge::new(parent, v, half_integer_weight(rng, 0.1)));
        edges.push(Edge::new(v, parent, half_integer_weight(rng, 0.1)));
    }
    WeightedDigraph::new(n, edges).expect("tree edges are distinct")
}

/// Undirected 2-tree on `n` vertices: its edges and a width-2 decomposition.
pub fn random_two_tree<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (Vec<(usize, usize)>, TreeDecomposition) {
    match n {
        0 | 1 => return (Vec::new(), TreeDecomposition::new(vec![(0..n).collect()], Vec::new())),
        2 => return (vec![(0, 1)], TreeDecomposition::new(vec![vec![0, 1]], Vec::new())),
        _ => {}
    }
    let mut edges = vec![(0, 1), (0, 2), (1, 2)];
    let mut bags = vec![vec![0, 1, 2]];
    let mut links = Vec::new();
    for v in 3..n {
        let &(a, b) = edges.choose(rng).expect("edge list is non-empty");
        let host = bags.iter().position(|bag| bag.contains(&a) && bag.contains(&b)).expect("every edge lies in a bag");
        links.push((host, bags.len()));
        bags.push(vec![a, b, v]);
        edges.push((a, v));
        edges.push((b, v));
    }
    (edges, TreeDecomposition::new(bags, links))
}

/// A directed graph of treewidth at most 2 with a matching decomposition.
/// Each 2-tree edge is kept with probability `keep` and oriented one way,
/// the other, or both.
pub fn random_treewidth2<R: Rng + ?Sized>(rng: &mut R, n: usize, keep: f64) -> (WeightedDigraph, TreeDecomposition) {
    let (undirected, td) = random_two_tree(rng, n);
    let mut edges = Vec::new();
    for (a, b) in undirected {
        if !rng.random_bool(keep) {
            continue;
        }
        match rng.random_range(0..3) {
            0 => edges.push(Edge::new(a, b, half_integer_weight(rng, 0.1))),
            1 => edges.push(Edge::new(b, a, half_integer_weight(rng, 0.1))),
            _ => {
                edges.push(Edge::new(a, b, half_integer_weight(rng, 0.1)));
                edges.push(Edge::new(b, a, half_integer_weight(rng, 0.1)));
            }
        }
    }
    (WeightedDigraph::new(n, edges).expect("2-tree edges are distinct"), td)
}

/// Cut instance on a treewidth-2 graph with `3..=max_n` vertices, at most
/// `max_edges` edges of positive capacity and `1..=max_pairs` terminal
/// pairs, drawn from connected pairs when there are any.
pub fn random_cut_instance<R: Rng + ?Sized>(
    rng: &mut R,
    max_n: usize,
    max_edges: usize,
    max_pairs: usize,
) -> (CutInstance, TreeDecomposition) {
    let n = rng.random_range(3..=max_n.max(3));
    let (g, td) = random_treewidth2(rng, n, 0.8);
    let mut edges: Vec<Edge> = g.edges().to_vec();
    edges.shuffle(rng);
    edges.truncate(max_edges);
    edges.sort_by_key(|e| (e.tail, e.head));
    for e in &mut edges {
        e.weight = f64::from(rng.random_range(1..=6u32)) / 2.0;
    }
    let g = WeightedDigraph::new(n, edges).expect("subset of valid edges");

    let m = shortest_path_quasimetric(&g);
    let connected: Vec<(usize, usize)> = m.off_diagonal().filter(|&(u, v)| m.get(u, v).is_finite()).collect();
    let all: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    let count = rng.random_range(1..=max_pairs.max(1));
    let mut pairs: Vec<TerminalPair> = Vec::with_capacity(count);
    while pairs.len() < count {
        let pool = if !connected.is_empty() && rng.random_bool(0.9) { &connected } else { &all };
        let &(s, t) = pool.choose(rng).expect("pool is non-empty");
        if pairs.iter().any(|p| p.source == s && p.sink == t) {
            if pairs.len() >= all.len() {
                break;
            }
            continue;
        }
        pairs.push(TerminalPair::new(s, t, f64::from(rng.random_range(1..=4u32)) / 2.0));
    }
    (CutInstance::new(g, pairs).expect("pairs are distinct with positive demand"), td)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_bidirected_tree;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trees_are_bidirected_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in 1..=12 {
            assert!(is_bidirected_tree(&random_tree(&mut rng, n)));
        }
    }

    #[test]
    fn treewidth_graphs_carry_valid_decompositions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=10 {
            let (g, td) = random_treewidth2(&mut rng, n, 0.7);
            td.validate(&g).unwrap();
            assert!(td.width() <= 2);
        }
    }

    #[test]
    fn cut_instances_respect_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let (inst, td) = random_cut_instance(&mut rng, 8, 14, 4);
            assert!(inst.graph().vertex_count() <= 8);
            assert!(inst.graph().edge_count() <= 14);
            assert!((1..=4).contains(&inst.pairs().len()));
            td.validate(inst.graph()).unwrap();
        }
    }
}
