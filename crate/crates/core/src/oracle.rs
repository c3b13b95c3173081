//! Brute-force and Monte Carlo references. Shortest paths and reachability
//! here go through `petgraph`, never through this crate's own routines.

use petgraph::algo::{dijkstra, has_path_connecting};
use petgraph::graph::{DiGraph, EdgeIndex, NodeIndex};
use petgraph::visit::{EdgeFiltered, EdgeRef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cut::{CutInstance, CutResult};
use crate::graph::WeightedDigraph;
use crate::metric::DistanceMatrix;
use crate::partition::{Quasipartition, Relation, WeightedSupport};

/// Largest edge count the subset enumerations accept.
pub const MAX_ENUMERATION_EDGES: usize = 20;
pub const MIN_TRIALS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{edges} edges exceeds the enumeration limit of {limit}")]
    TooLarge { edges: usize, limit: usize },
    #[error("at least {MIN_TRIALS} trials are required, got {0}")]
    TooFewTrials(usize),
}

fn to_petgraph(g: &WeightedDigraph) -> DiGraph<(), f64> {
    let mut pg = DiGraph::with_capacity(g.vertex_count(), g.edge_count());
    for _ in 0..g.vertex_count() {
        pg.add_node(());
    }
    for e in g.edges() {
        pg.add_edge(NodeIndex::new(e.tail), NodeIndex::new(e.head), e.weight);
    }
    pg
}

/// All-pairs distances by one Dijkstra run per source.
pub fn all_pairs_dijkstra(g: &WeightedDigraph) -> DistanceMatrix {
    let pg = to_petgraph(g);
    let n = g.vertex_count();
    let mut rows = vec![vec![f64::INFINITY; n]; n];
    for (s, row) in rows.iter_mut().enumerate() {
        for (node, d) in dijkstra(&pg, NodeIndex::new(s), None, |e| *e.weight()) {
            row[node.index()] = d;
        }
    }
    DistanceMatrix::from_rows(&rows).expect("dijkstra distances are valid")
}

/// Reflexive reachability of `rel` read as a digraph.
pub fn reachability_closure(rel: &Relation) -> Relation {
    let n = rel.size();
    let mut pg: DiGraph<(), ()> = DiGraph::new();
    for _ in 0..n {
        pg.add_node(());
    }
    for (u, v) in rel.pairs() {
        pg.add_edge(NodeIndex::new(u), NodeIndex::new(v), ());
    }
    Relation::from_fn(n, |u, v| u == v || has_path_connecting(&pg, NodeIndex::new(u), NodeIndex::new(v), None))
}

/// Whether the relation is reflexive and transitive, by direct triple scan.
pub fn is_quasipartition(rel: &Relation) -> bool {
    let n = rel.size();
    (0..n).all(|x| rel.contains(x, x))
        && (0..n)
            .all(|u| (0..n).all(|v| !rel.contains(u, v) || (0..n).all(|w| !rel.contains(v, w) || rel.contains(u, w))))
}

/// Pairs disconnected once the edges in `removed` are deleted.
fn separated_pairs(pg: &DiGraph<(), f64>, inst: &CutInstance, removed: &[bool]) -> Vec<usize> {
    let filtered = EdgeFiltered::from_fn(pg, |e: petgraph::graph::EdgeReference<'_, f64>| !removed[e.id().index()]);
    inst.pairs()
        .iter()
        .enumerate()
        .filter(|(_, p)| !has_path_connecting(&filtered, NodeIndex::new(p.source), NodeIndex::new(p.sink), None))
        .map(|(i, _)| i)
        .collect()
}

/// Evaluates an edge set independently of the cut module.
pub fn evaluate_cut(inst: &CutInstance, edges: &[usize]) -> CutResult {
    let g = inst.graph();
    let pg = to_petgraph(g);
    let mut removed = vec![false; g.edge_count()];
    for &e in edges {
        removed[e] = true;
    }
    result_for(inst, &pg, &removed)
}

fn result_for(inst: &CutInstance, pg: &DiGraph<(), f64>, removed: &[bool]) -> CutResult {
    let edges: Vec<usize> = (0..removed.len()).filter(|&e| removed[e]).collect();
    let capacity: f64 = edges.iter().map(|&e| pg[EdgeIndex::new(e)]).sum();
    let separated = separated_pairs(pg, inst, removed);
    let separated_demand: f64 = separated.iter().map(|&i| inst.pairs()[i].demand).sum();
    let sparsity = if separated_demand > 0.0 { capacity / separated_demand } else { f64::INFINITY };
    CutResult { edges, capacity, separated, separated_demand, sparsity }
}

fn enumerate(
    inst: &CutInstance,
    mut better: impl FnMut(&CutResult, &CutResult) -> bool,
    admissible: impl Fn(&CutResult) -> bool,
) -> Result<Option<CutResult>, OracleError> {
    let g = inst.graph();
    let m = g.edge_count();
    if m > MAX_ENUMERATION_EDGES {
        return Err(OracleError::TooLarge { edges: m, limit: MAX_ENUMERATION_EDGES });
    }
    let pg = to_petgraph(g);
    let mut best: Option<CutResult> = None;
    let mut removed = vec![false; m];
    for mask in 0u32..(1u32 << m) {
        for (e, slot) in removed.iter_mut().enumerate() {
            *slot = mask >> e & 1 == 1;
        }
        let candidate = result_for(inst, &pg, &removed);
        if admissible(&candidate) && best.as_ref().is_none_or(|b| better(&candidate, b)) {
            best = Some(candidate);
        }
    }
    Ok(best)
}

fn size_then_ids(a: &CutResult, b: &CutResult) -> std::cmp::Ordering {
    a.edges.len().cmp(&b.edges.len()).then_with(|| a.edges.cmp(&b.edges))
}

/// Minimum finite sparsity over all edge subsets; ties go to fewer edges,
/// then lexicographically smaller edge ids.
pub fn brute_force_sparsest_cut(inst: &CutInstance) -> Result<CutResult, OracleError> {
    let best = enumerate(
        inst,
        |a, b| a.sparsity.total_cmp(&b.sparsity).then_with(|| size_then_ids(a, b)).is_lt(),
        |c| c.sparsity.is_finite(),
    )?;
    Ok(best.expect("removing every edge separates every positive-demand pair"))
}

/// Minimum capacity over edge subsets separating every pair.
pub fn brute_force_multicut(inst: &CutInstance) -> Result<CutResult, OracleError> {
    let k = inst.pairs().len();
    let best = enumerate(
        inst,
        |a, b| a.capacity.total_cmp(&b.capacity).then_with(|| size_then_ids(a, b)).is_lt(),
        |c| c.separated.len() == k,
    )?;
    Ok(best.expect("removing every edge separates every pair"))
}

/// A Monte Carlo frequency with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub rate: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Fraction of `trials` uniform shifts `z` in `[0, r/2]` for which `sample(z)`
/// does not relate `(u, v)`.
pub fn empirical_removal_rate(
    mut sample: impl FnMut(f64) -> Quasipartition,
    r: f64,
    (u, v): (usize, usize),
    trials: usize,
    seed: u64,
) -> Result<Estimate, OracleError> {
    if trials < MIN_TRIALS {
        return Err(OracleError::TooFewTrials(trials));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..trials).filter(|_| !sample(rng.random_range(0.0..=r / 2.0)).contains(u, v)).count();
    let rate = hits as f64 / trials as f64;
    Ok(Estimate { rate, stderr: (rate * (1.0 - rate) / trials as f64).sqrt(), trials })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairComparison {
    pub pair: (usize, usize),
    pub exact: f64,
    pub empirical: Estimate,
    /// Standard error implied by the exact probability.
    pub expected_stderr: f64,
    pub within: bool,
}

/// Exact removal probabilities of `support` next to Monte Carlo rates from
/// `sample`, all pairs driven by the same shifts. Agreement means within
/// three standard errors of the exact binomial, or equality when the exact
/// probability is 0 or 1.
pub fn exact_vs_empirical_report(
    support: &WeightedSupport,
    mut sample: impl FnMut(f64) -> Quasipartition,
    pairs: &[(usize, usize)],
    trials: usize,
    seed: u64,
) -> Result<Vec<PairComparison>, OracleError> {
    if trials < MIN_TRIALS {
        return Err(OracleError::TooFewTrials(trials));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = vec![0usize; pairs.len()];
    for _ in 0..trials {
        let p = sample(rng.random_range(0.0..=support.z_max()));
        for (k, &(u, v)) in pairs.iter().enumerate() {
            if !p.contains(u, v) {
                hits[k] += 1;
            }
        }
    }
    Ok(pairs
        .iter()
        .zip(hits)
        .map(|(&(u, v), h)| {
            let exact = support.removal_probability(u, v);
            let rate = h as f64 / trials as f64;
            let expected_stderr = (exact * (1.0 - exact) / trials as f64).sqrt();
            PairComparison {
                pair: (u, v),
                exact,
                empirical: Estimate { rate, stderr: (rate * (1.0 - rate) / trials as f64).sqrt(), trials },
                expected_stderr,
                within: (rate - exact).abs() <= 3.0 * expected_stderr,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::TerminalPair;
    use crate::graph::Edge;

    #[test]
    fn dijkstra_on_two_cycle() {
        let g = WeightedDigraph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 0, 2.0)]).unwrap();
        let d = all_pairs_dijkstra(&g);
        assert_eq!(d.get(0, 1), 1.0);
        assert_eq!(d.get(1, 0), 2.0);
        assert_eq!(d.get(0, 2), f64::INFINITY);
    }

    #[test]
    fn brute_force_on_two_paths() {
        let g = WeightedDigraph::new(
            4,
            vec![Edge::new(0, 1, 1.0), Edge::new(1, 3, 1.0), Edge::new(0, 2, 1.0), Edge::new(2, 3, 1.0)],
        )
        .unwrap();
        let inst = CutInstance::new(g, vec![TerminalPair::new(0, 3, 1.0)]).unwrap();
        let best = brute_force_sparsest_cut(&inst).unwrap();
        assert_eq!(best.sparsity, 2.0);
        assert_eq!(best.edges, vec![0, 2]);
        assert_eq!(brute_force_multicut(&inst).unwrap().capacity, 2.0);
    }

    #[test]
    fn already_disconnected_pair_costs_nothing() {
        let g = WeightedDigraph::new(2, vec![Edge::new(1, 0, 1.0)]).unwrap();
        let inst = CutInstance::new(g, vec![TerminalPair::new(0, 1, 1.0)]).unwrap();
        let best = brute_force_sparsest_cut(&inst).unwrap();
        assert_eq!(best.sparsity, 0.0);
        assert!(best.edges.is_empty());
    }

    #[test]
    fn enumeration_cap() {
        let edges: Vec<_> = (0..21).map(|i| (i, i + 1, 1.0)).collect();
        let g = WeightedDigraph::bidirected(22, &edges).unwrap();
        let inst = CutInstance::new(g, vec![TerminalPair::new(0, 1, 1.0)]).unwrap();
        assert_eq!(brute_force_sparsest_cut(&inst).unwrap_err(), OracleError::TooLarge { edges: 42, limit: 20 });
    }

    #[test]
    fn full_relation_is_never_removed() {
        let est = empirical_removal_rate(|_| Quasipartition::full(2), 1.0, (0, 1), 1000, 9).unwrap();
        assert_eq!(est.rate, 0.0);
        assert!(empirical_removal_rate(|_| Quasipartition::full(2), 1.0, (0, 1), 10, 9).is_err());
    }

    #[test]
    fn closure_oracle() {
        let rel = Relation::from_pairs(3, [(0, 1), (1, 2)]);
        let c = reachability_closure(&rel);
        assert!(c.contains(0, 2) && c.contains(2, 2) && !c.contains(2, 0));
        assert!(is_quasipartition(&c));
        assert!(!is_quasipartition(&rel));
    }
}
