//! Balanced vertex separators and the recursive separator hierarchy.

use std::collections::BTreeSet;

use super::PartitionError;
use crate::graph::WeightedDigraph;

/// Exhaustive search refuses to enumerate more candidate sets than this.
pub const MAX_SEPARATOR_CANDIDATES: u64 = 20_000_000;

/// Bags of vertices connected by a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    tree_edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(bags: Vec<Vec<usize>>, tree_edges: Vec<(usize, usize)>) -> Self {
        let bags = bags.into_iter().map(|b| b.into_iter().collect::<BTreeSet<_>>().into_iter().collect()).collect();
        Self { bags, tree_edges }
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree_edges
    }

    /// Largest bag size minus one.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Checks the tree shape, vertex and edge coverage, and that the bags
    /// holding any one vertex form a connected subtree.
    pub fn validate(&self, g: &WeightedDigraph) -> Result<(), PartitionError> {
        let invalid = |msg: String| Err(PartitionError::InvalidDecomposition(msg));
        let k = self.bags.len();
        if k == 0 {
            return invalid("no bags".into());
        }
        let n = g.vertex_count();
        if let Some(v) = self.bags.iter().flatten().find(|&&v| v >= n) {
            return invalid(format!("bag vertex {v} is outside the graph"));
        }
        if let Some(&(a, b)) = self.tree_edges.iter().find(|&&(a, b)| a >= k || b >= k || a == b) {
            return invalid(format!("bad tree edge ({a}, {b})"));
        }
        if self.tree_edges.len() != k - 1 || self.bag_components(|_| true) != 1 {
            return invalid("bags do not form a tree".into());
        }
        for v in 0..n {
            let holding = |b: usize| self.bags[b].binary_search(&v).is_ok();
            match self.bag_components(holding) {
                0 => return invalid(format!("vertex {v} is in no bag")),
                1 => {}
                _ => return invalid(format!("bags containing vertex {v} are not connected")),
            }
        }
        for e in g.edges() {
            let covered =
                self.bags.iter().any(|b| b.binary_search(&e.tail).is_ok() && b.binary_search(&e.head).is_ok());
            if !covered {
                return invalid(format!("edge ({}, {}) is in no bag", e.tail, e.head));
            }
        }
        Ok(())
    }

    /// Number of connected pieces of the decomposition tree restricted to
    /// bags satisfying `keep`.
    fn bag_components(&self, keep: impl Fn(usize) -> bool) -> usize {
        let k = self.bags.len();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(a, b) in &self.tree_edges {
            if keep(a) && keep(b) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        (0..k).filter(|&b| keep(b) && find(&mut parent, b) == b).count()
    }
}

/// Largest weak component of `g[vertices \ removed]`.
fn largest_component(g: &WeightedDigraph, vertices: &[usize], removed: &[usize]) -> usize {
    let mut alive = vec![false; g.vertex_count()];
    for &v in vertices {
        alive[v] = true;
    }
    for &v in removed {
        alive[v] = false;
    }
    g.weak_components(&alive).iter().map(Vec::len).max().unwrap_or(0)
}

fn is_balanced(g: &WeightedDigraph, vertices: &[usize], removed: &[usize]) -> bool {
    2 * largest_component(g, vertices, removed) <= vertices.len()
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Smallest, then lexicographically first, `K ⊆ vertices` with
/// `|K| <= max_size` whose removal leaves weak components of at most half
/// of `vertices`.
pub fn balanced_separator_within(
    g: &WeightedDigraph,
    vertices: &[usize],
    max_size: usize,
) -> Result<Vec<usize>, PartitionError> {
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    let len = sorted.len();
    let top = max_size.min(len);
    let budget: u64 = (0..=top as u64).map(|k| binomial(len as u64, k)).fold(0, u64::saturating_add);
    if budget > MAX_SEPARATOR_CANDIDATES {
        return Err(PartitionError::SearchTooLarge { vertices: len, max_size });
    }
    for size in 0..=top {
        // lexicographic k-combinations of positions
        let mut pick: Vec<usize> = (0..size).collect();
        loop {
            let candidate: Vec<usize> = pick.iter().map(|&i| sorted[i]).collect();
            if is_balanced(g, &sorted, &candidate) {
                return Ok(candidate);
            }
            let Some(pos) = (0..size).rev().find(|&i| pick[i] < len - size + i) else {
                break;
            };
            pick[pos] += 1;
            for j in pos + 1..size {
                pick[j] = pick[j - 1] + 1;
            }
        }
    }
    Err(PartitionError::SeparatorNotFound { max_size })
}

/// [`balanced_separator_within`] over the whole vertex set.
pub fn balanced_separator(g: &WeightedDigraph, max_size: usize) -> Result<Vec<usize>, PartitionError> {
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    balanced_separator_within(g, &all, max_size)
}

/// Restricts each bag to `vertices` and returns the restricted bag that
/// leaves the smallest largest component (ties: smaller bag, lower id),
/// provided that component holds at most half of `vertices`.
fn decomposition_separator_within(
    g: &WeightedDigraph,
    td: &TreeDecomposition,
    vertices: &[usize],
) -> Result<Vec<usize>, PartitionError> {
    let inside: BTreeSet<usize> = vertices.iter().copied().collect();
    td.bags()
        .iter()
        .map(|bag| bag.iter().copied().filter(|v| inside.contains(v)).collect::<Vec<_>>())
        .map(|bag| (largest_component(g, vertices, &bag), bag))
        .filter(|(largest, _)| 2 * largest <= vertices.len())
        .min_by_key(|(largest, bag)| (*largest, bag.len()))
        .map(|(_, bag)| bag)
        .ok_or_else(|| PartitionError::InvalidDecomposition("no bag is a balanced separator".into()))
}

/// A balanced separator read off a supplied tree decomposition; its size is
/// at most `width + 1`.
pub fn separator_from_decomposition(g: &WeightedDigraph, td: &TreeDecomposition) -> Result<Vec<usize>, PartitionError> {
    td.validate(g)?;
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    decomposition_separator_within(g, td, &all)
}

/// Where balanced separators come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparatorProvider {
    /// Bags of a tree decomposition of the whole graph.
    Decomposition(TreeDecomposition),
    /// Exhaustive search over sets of at most `max_size` vertices.
    Exhaustive { max_size: usize },
}

impl SeparatorProvider {
    pub fn separator(&self, g: &WeightedDigraph, vertices: &[usize]) -> Result<Vec<usize>, PartitionError> {
        match self {
            SeparatorProvider::Decomposition(td) => decomposition_separator_within(g, td, vertices),
            SeparatorProvider::Exhaustive { max_size } => balanced_separator_within(g, vertices, *max_size),
        }
    }
}

/// One recursive call: the vertex set it works on and the separator chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatorNode {
    pub vertices: Vec<usize>,
    pub separator: Vec<usize>,
    pub depth: usize,
}

/// The full recursion of separator splits. It depends only on the graph's
/// structure, so one tree serves every radius, shift and reweighting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatorTree {
    vertex_count: usize,
    nodes: Vec<SeparatorNode>,
}

impl SeparatorTree {
    pub fn build(g: &WeightedDigraph, provider: &SeparatorProvider) -> Result<Self, PartitionError> {
        if let SeparatorProvider::Decomposition(td) = provider {
            td.validate(g)?;
        }
        let n = g.vertex_count();
        let mut nodes = Vec::new();
        let mut pending = vec![((0..n).collect::<Vec<_>>(), 0usize)];
        while let Some((vertices, depth)) = pending.pop() {
            if vertices.len() <= 1 {
                continue;
            }
            let separator = provider.separator(g, &vertices)?;
            let mut alive = vec![false; n];
            for &v in &vertices {
                alive[v] = true;
            }
            for &v in &separator {
                alive[v] = false;
            }
            // reversed so that the stack pops components in ascending order
            for component in g.weak_components(&alive).into_iter().rev() {
                pending.push((component, depth + 1));
            }
            nodes.push(SeparatorNode { vertices, separator, depth });
        }
        Ok(Self { vertex_count: n, nodes })
    }

    /// The tree for the smallest exhaustive size bound that succeeds at
    /// every level, together with that bound.
    pub fn smallest_exhaustive(g: &WeightedDigraph) -> Result<(usize, Self), PartitionError> {
        let mut last_err = None;
        for t in 0..=g.vertex_count() {
            match Self::build(g, &SeparatorProvider::Exhaustive { max_size: t }) {
                Ok(tree) => return Ok((t, tree)),
                Err(PartitionError::SeparatorNotFound { .. }) => continue,
                Err(e) => {
                    last_err = Some(e);
                    break;
                }
            }
        }
        Err(last_err.unwrap_or(PartitionError::SeparatorNotFound { max_size: g.vertex_count() }))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn nodes(&self) -> &[SeparatorNode] {
        &self.nodes
    }

    /// Number of recursion levels that examine edges.
    pub fn levels(&self) -> usize {
        self.nodes.iter().map(|node| node.depth + 1).max().unwrap_or(0)
    }

    pub fn max_separator_size(&self) -> usize {
        self.nodes.iter().map(|node| node.separator.len()).max().unwrap_or(0)
    }
}
