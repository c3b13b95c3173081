//! Layered random quasipartitions of bidirected trees.
//!
//! Distances to and from a root are cut into layers of width `r/2` offset by
//! a shift `z`. A tree edge is dropped when it steps across a layer boundary
//! in the direction of its own traversal (towards the root for inbound
//! distances, away from it for outbound ones); what survives is closed
//! transitively. Every output is `r`-bounded and each ordered pair is
//! separated with probability at most `2 d(u,v) / r` over uniform `z`.

use super::relation::{transitive_closure, Quasipartition, Relation};
use super::support::WeightedSupport;
use super::{check_radius, check_shift, PartitionError};
use crate::graph::{is_bidirected_tree, shortest_path_quasimetric, WeightedDigraph};
use crate::metric::Quasimetric;

/// Precomputed root distances for repeated sampling on one tree and radius.
#[derive(Debug, Clone)]
pub struct TreeSampler {
    radius: f64,
    root: usize,
    metric: Quasimetric,
    edges: Vec<(usize, usize)>,
}

impl TreeSampler {
    pub fn new(tree: &WeightedDigraph, radius: f64, root: usize) -> Result<Self, PartitionError> {
        check_radius(radius)?;
        if !is_bidirected_tree(tree) {
            return Err(PartitionError::NotATree);
        }
        if root >= tree.vertex_count() {
            return Err(PartitionError::InvalidRoot { root, n: tree.vertex_count() });
        }
        Ok(Self {
            radius,
            root,
            metric: shortest_path_quasimetric(tree),
            edges: tree.edges().iter().map(|e| (e.tail, e.head)).collect(),
        })
    }

    pub fn metric(&self) -> &Quasimetric {
        &self.metric
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn root(&self) -> usize {
        self.root
    }

    fn half(&self) -> f64 {
        self.radius / 2.0
    }

    fn is_cut(&self, u: usize, v: usize, z: f64) -> bool {
        let t = self.root;
        let m = &self.metric;
        let h = self.half();
        crosses_layer(m.get(u, t), m.get(v, t), z, h) || crosses_layer(m.get(t, v), m.get(t, u), z, h)
    }

    pub fn sample(&self, z: f64) -> Result<Quasipartition, PartitionError> {
        check_shift(z, self.half())?;
        let n = self.metric.size();
        let mut rel = Relation::empty(n);
        for &(u, v) in &self.edges {
            if !self.is_cut(u, v, z) {
                rel.insert(u, v);
            }
        }
        Ok(transitive_closure(&rel))
    }

    /// Shift values at which some layer boundary meets a root distance.
    fn breakpoints(&self) -> Vec<f64> {
        let h = self.half();
        let t = self.root;
        let n = self.metric.size();
        let mut out = Vec::new();
        for x in 0..n {
            for d in [self.metric.get(x, t), self.metric.get(t, x)] {
                if !d.is_finite() {
                    continue;
                }
                let first = ((d - h) / h).ceil().max(0.0) as u64;
                let last = (d / h).floor().max(0.0) as u64;
                for i in first.saturating_sub(1)..=last + 1 {
                    let b = d - i as f64 * h;
                    if (0.0..=h).contains(&b) {
                        out.push(b);
                    }
                }
            }
        }
        out
    }

    /// Exact distribution of [`TreeSampler::sample`] over `z ~ Uniform[0, r/2]`.
    pub fn support(&self) -> WeightedSupport {
        WeightedSupport::from_breakpoints(self.breakpoints(), self.half(), self.radius, |z| self.sample(z))
            .expect("midpoints lie inside the shift range")
    }
}

/// Whether some boundary `z + i*h` with integer `i >= 0` satisfies
/// `lo <= z + i*h < hi`.
pub(crate) fn crosses_layer(hi: f64, lo: f64, z: f64, h: f64) -> bool {
    if !(hi > lo) || !lo.is_finite() {
        return false;
    }
    let guess = ((lo - z) / h).ceil().max(0.0) as u64;
    let boundary = |i: u64| z + i as f64 * h;
    let first = (guess.saturating_sub(1)..=guess + 1).find(|&i| boundary(i) >= lo).unwrap_or(guess + 1);
    boundary(first) < hi
}

/// One draw of the layered tree quasipartition for shift `z` in `[0, r/2]`.
pub fn sample_tree_quasipartition(
    tree: &WeightedDigraph,
    radius: f64,
    root: usize,
    z: f64,
) -> Result<Quasipartition, PartitionError> {
    TreeSampler::new(tree, radius, root)?.sample(z)
}

/// Exact distribution of [`sample_tree_quasipartition`] over uniform `z`.
pub fn tree_quasipartition_support(
    tree: &WeightedDigraph,
    radius: f64,
    root: usize,
) -> Result<WeightedSupport, PartitionError> {
    Ok(TreeSampler::new(tree, radius, root)?.support())
}
