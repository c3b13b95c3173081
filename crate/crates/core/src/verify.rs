//! Property checks over seeded random corpora. Each check compares library
//! output against the independent references in [`crate::oracle`] or against
//! bounds recomputed from first principles.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cut::{harmonic, solve_multicut, solve_sparsest_cut, CutInstance, CutOptions, SeparatorStrategy};
use crate::embedding::{
    build_scale_family, embed_01_combination, embed_quasiultrametric, expected_ultrametric_distance, mid_range_scales,
    quasiultrametric_to_quasipartition, removal_bounds, ScaleFamily,
};
use crate::gen::{random_cut_instance, random_tree, random_treewidth2};
use crate::graph::WeightedDigraph;
use crate::metric::{floor_log2, DistanceMatrix};
use crate::oracle::{
    all_pairs_dijkstra, brute_force_multicut, brute_force_sparsest_cut, evaluate_cut, is_quasipartition,
    reachability_closure,
};
use crate::partition::{
    lipschitz_constant, Quasipartition, SeparatorProvider, SeparatorTree, SupportBuilder, TreeBuilder,
    TreeDecomposition, TreeSampler, TreewidthBuilder, TreewidthSampler, WeightedSupport,
};

/// Tolerance for bound chains evaluated in floating point.
pub const CHAIN_TOL: f64 = 1e-9;
/// Relative accuracy promised for LP optimal values.
pub const LP_TOL: f64 = 1e-7;
/// Tolerance on coefficient and weight totals.
pub const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trees: usize,
    pub treewidth_graphs: usize,
    /// Instances of each kind used for the embedding checks.
    pub embedding_instances: usize,
    /// Random choice vectors per embedding instance.
    pub embeddings_per_instance: usize,
    /// Instances of each kind cross-checked by Monte Carlo.
    pub monte_carlo_instances: usize,
    pub trials: usize,
    pub cut_instances: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trees: 100,
            treewidth_graphs: 100,
            embedding_instances: 30,
            embeddings_per_instance: 40,
            monte_carlo_instances: 2,
            trials: 100_000,
            cut_instances: 50,
        }
    }
}

/// Result of one numbered criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub checks: u64,
    pub failed: u64,
    /// The first few failure descriptions.
    pub notes: Vec<String>,
    pub elapsed: Duration,
    pub time_limit: Option<Duration>,
    pub summary: String,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failed == 0 && self.time_limit.is_none_or(|limit| self.elapsed <= limit)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: {} checks, {} failed, {:.2}s",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.checks,
            self.failed,
            self.elapsed.as_secs_f64()
        )?;
        if !self.summary.is_empty() {
            write!(f, " ({})", self.summary)?;
        }
        for note in &self.notes {
            write!(f, "\n    {note}")?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Tally {
    checks: u64,
    failed: u64,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, note: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.notes.len() < 8 {
                self.notes.push(note());
            }
        }
    }

    fn error(&mut self, what: impl fmt::Display) {
        self.check(false, || what.to_string());
    }

    fn finish(self, id: u32, name: &'static str, start: Instant, limit: Option<Duration>, summary: String) -> Outcome {
        Outcome {
            id,
            name,
            checks: self.checks,
            failed: self.failed,
            notes: self.notes,
            elapsed: start.elapsed(),
            time_limit: limit,
            summary,
        }
    }
}

fn le_tol(x: f64, y: f64) -> bool {
    x <= y + CHAIN_TOL * y.abs().max(1.0)
}

/// Seeded instances shared by the checks.
#[derive(Debug, Clone)]
pub struct Corpus {
    /// Bidirected trees with `2..=12` vertices.
    pub trees: Vec<WeightedDigraph>,
    /// Treewidth-2 digraphs with `2..=8` vertices and their decompositions.
    pub treewidth: Vec<(WeightedDigraph, TreeDecomposition)>,
    /// Cut instances with at most 8 vertices, 14 edges and 4 pairs.
    pub cuts: Vec<(CutInstance, TreeDecomposition)>,
}

impl Corpus {
    pub fn generate(cfg: &VerifyConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7472_6565);
        let trees = (0..cfg.trees).map(|k| random_tree(&mut rng, 2 + k % 11)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7477_6964);
        let treewidth = (0..cfg.treewidth_graphs).map(|k| random_treewidth2(&mut rng, 2 + k % 7, 0.85)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6375_7473);
        let cuts = (0..cfg.cut_instances).map(|_| random_cut_instance(&mut rng, 8, 14, 4)).collect();
        Self { trees, treewidth, cuts }
    }
}

/// Radii `2^k` around the largest finite distance.
fn dyadic_radii(m: &DistanceMatrix) -> Vec<f64> {
    let top = m.max_finite().filter(|&d| d > 0.0).map_or(0, floor_log2);
    (top - 4..=top + 1).map(|k| 2f64.powi(k)).collect()
}

/// Both separator hierarchies for a treewidth instance: the smallest
/// exhaustive bound, and the supplied decomposition.
fn hierarchies(g: &WeightedDigraph, td: &TreeDecomposition) -> Result<Vec<SeparatorTree>, String> {
    let (_, exhaustive) = SeparatorTree::smallest_exhaustive(g).map_err(|e| e.to_string())?;
    let decomposed =
        SeparatorTree::build(g, &SeparatorProvider::Decomposition(td.clone())).map_err(|e| e.to_string())?;
    Ok(vec![exhaustive, decomposed])
}

fn check_partition(t: &mut Tally, p: &Quasipartition, m: &DistanceMatrix, r: f64, label: &dyn Fn() -> String) {
    t.check(is_quasipartition(p.relation()), || format!("{}: not reflexive and transitive", label()));
    t.check(&reachability_closure(p.relation()) == p.relation(), || format!("{}: closure changes it", label()));
    let escaped = p.pairs().find(|&(u, v)| !(m.get(u, v) <= r));
    t.check(escaped.is_none(), || format!("{}: pair {:?} beyond r = {r}", label(), escaped.unwrap()));
}

fn check_support(
    t: &mut Tally,
    support: &WeightedSupport,
    sample: &dyn Fn(f64) -> Quasipartition,
    m: &DistanceMatrix,
    r: f64,
    rng: &mut ChaCha8Rng,
    label: &dyn Fn() -> String,
) {
    t.check((support.total_weight() - 1.0).abs() <= SUM_TOL, || {
        format!("{}: weights sum to {}", label(), support.total_weight())
    });
    for item in support.items() {
        check_partition(t, &item.partition, m, r, label);
    }
    for _ in 0..20 {
        let z = rng.random_range(0.0..=support.z_max());
        let p = sample(z);
        check_partition(t, &p, m, r, label);
        let found = support.locate(z).map(|it| &it.partition);
        t.check(found == Some(&p), || format!("{}: shift {z} not covered by its support item", label()));
    }
}

/// Every sampled or enumerated quasipartition is reflexive, transitive and `r`-bounded.
pub fn structural_soundness(corpus: &Corpus, cfg: &VerifyConfig) -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 1);
    let mut supports = 0usize;
    for (k, g) in corpus.trees.iter().enumerate() {
        let m = all_pairs_dijkstra(g);
        let root = k % g.vertex_count();
        for r in dyadic_radii(&m) {
            match TreeSampler::new(g, r, root) {
                Ok(s) => {
                    let label = || format!("tree {k} r={r}");
                    check_support(&mut t, &s.support(), &|z| s.sample(z).unwrap(), &m, r, &mut rng, &label);
                    supports += 1;
                }
                Err(e) => t.error(format!("tree {k}: {e}")),
            }
        }
    }
    for (k, (g, td)) in corpus.treewidth.iter().enumerate() {
        let m = all_pairs_dijkstra(g);
        let trees = match hierarchies(g, td) {
            Ok(h) => h,
            Err(e) => {
                t.error(format!("treewidth graph {k}: {e}"));
                continue;
            }
        };
        for (h, hierarchy) in trees.into_iter().enumerate() {
            for r in dyadic_radii(&m) {
                match TreewidthSampler::new(g, r, hierarchy.clone()) {
                    Ok(s) => {
                        let label = || format!("treewidth graph {k} hierarchy {h} r={r}");
                        check_support(&mut t, &s.support(), &|z| s.sample(z).unwrap(), &m, r, &mut rng, &label);
                        supports += 1;
                    }
                    Err(e) => t.error(format!("treewidth graph {k}: {e}")),
                }
            }
        }
    }
    let summary =
        format!("{} trees, {} treewidth graphs, {supports} supports", corpus.trees.len(), corpus.treewidth.len());
    t.finish(1, "structural soundness", start, Some(Duration::from_secs(120)), summary)
}

/// Checks `Pr[(u,v) not in P] * r <= beta * d(u,v)` pair by pair. With
/// half-integer weights and dyadic radii every quantity is exact.
fn check_lipschitz(
    t: &mut Tally,
    support: &WeightedSupport,
    m: &DistanceMatrix,
    r: f64,
    beta: f64,
    label: &dyn Fn() -> String,
) {
    for (u, v) in m.off_diagonal() {
        let d = m.get(u, v);
        if !(d > 0.0 && d.is_finite()) {
            continue;
        }
        let p = support.removal_probability(u, v);
        t.check(p * r <= beta * d, || format!("{}: pair ({u},{v}) removed with probability {p} at d={d}", label()));
    }
}

/// Exact tree supports are 2-Lipschitz.
pub fn tree_lipschitz(corpus: &Corpus, _cfg: &VerifyConfig) -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut worst: f64 = 0.0;
    for (k, g) in corpus.trees.iter().enumerate() {
        let m = all_pairs_dijkstra(g);
        for r in dyadic_radii(&m) {
            let support = match TreeSampler::new(g, r, k % g.vertex_count()) {
                Ok(s) => s.support(),
                Err(e) => {
                    t.error(format!("tree {k}: {e}"));
                    continue;
                }
            };
            worst = worst.max(lipschitz_constant(&support, &m, r));
            check_lipschitz(&mut t, &support, &m, r, 2.0, &|| format!("tree {k} r={r}"));
        }
    }
    t.finish(2, "tree Lipschitz bound", start, None, format!("largest constant {worst}"))
}

/// Exact treewidth supports are `4 t (floor(log2 n) + 1)`-Lipschitz with
/// fewer than `n^2` items.
pub fn treewidth_lipschitz(corpus: &Corpus, _cfg: &VerifyConfig) -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut worst_ratio: f64 = 0.0;
    for (k, (g, td)) in corpus.treewidth.iter().enumerate() {
        let m = all_pairs_dijkstra(g);
        let n = g.vertex_count();
        let trees = match hierarchies(g, td) {
            Ok(h) => h,
            Err(e) => {
                t.error(format!("treewidth graph {k}: {e}"));
                continue;
            }
        };
        for (h, hierarchy) in trees.into_iter().enumerate() {
            let builder = TreewidthBuilder { hierarchy };
            let beta = builder.lipschitz_bound(n);
            for r in dyadic_radii(&m) {
                let support = match builder.build(g, r) {
                    Ok(s) => s,
                    Err(e) => {
                        t.error(format!("treewidth graph {k}: {e}"));
                        continue;
                    }
                };
                t.check(support.len() < n * n, || format!("treewidth graph {k}: {} items for n={n}", support.len()));
                worst_ratio = worst_ratio.max(lipschitz_constant(&support, &m, r) / beta);
                check_lipschitz(&mut t, &support, &m, r, beta, &|| format!("treewidth graph {k} hierarchy {h} r={r}"));
            }
        }
    }
    t.finish(3, "treewidth Lipschitz bound", start, None, format!("largest constant / bound {worst_ratio:.4}"))
}

fn check_forced(
    t: &mut Tally,
    builder: &dyn SupportBuilder,
    g: &WeightedDigraph,
    m: &DistanceMatrix,
    label: &dyn Fn() -> String,
) -> usize {
    let n = g.vertex_count();
    let beta = builder.lipschitz_bound(n);
    let mut forced_pairs = 0;
    for r in dyadic_radii(m) {
        let support = match builder.build_forced(g, r) {
            Ok(s) => s,
            Err(e) => {
                t.error(format!("{}: {e}", label()));
                continue;
            }
        };
        for item in support.items() {
            let escaped = item.partition.pairs().find(|&(u, v)| !(m.get(u, v) <= r));
            t.check(escaped.is_none(), || format!("{} r={r}: forced item relates {:?}", label(), escaped.unwrap()));
        }
        for (u, v) in m.off_diagonal() {
            let d = m.get(u, v);
            if 2.0 * n as f64 * d <= r {
                forced_pairs += 1;
                let p = support.removal_probability(u, v);
                t.check(p == 0.0, || {
                    format!("{} r={r}: pair ({u},{v}) at d={d} removed with probability {p}", label())
                });
            }
        }
        check_lipschitz(t, &support, m, r, 2.0 * beta, &|| format!("{} r={r} forced", label()));
    }
    forced_pairs
}

/// Forced supports relate close pairs surely and are `2 beta`-Lipschitz.
pub fn epsilon_forcing(corpus: &Corpus, _cfg: &VerifyConfig) -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut forced_pairs = 0;
    for (k, g) in corpus.trees.iter().enumerate() {
        let m = all_pairs_dijkstra(g);
        let builder = TreeBuilder { root: k % g.vertex_count() };
        forced_pairs += check_forced(&mut t, &builder, g, &m, &|| format!("tree {k}"));
    }
    for (k, (g, td)) in corpus.treewidth.iter().enumerate() {
        let m = all_pairs_dijkstra(g);
        match TreewidthBuilder::new(g, &SeparatorProvider::Decomposition(td.clone())) {
            Ok(builder) => {
                forced_pairs += check_forced(&mut t, &builder, g, &m, &|| format!("treewidth graph {k}"));
            }
            Err(e) => t.error(format!("treewidth graph {k}: {e}")),
        }
    }
    t.finish(4, "epsilon forcing", start, None, format!("{forced_pairs} pairs within r/2n"))
}

/// Scale families for the first `count` trees and treewidth graphs.
fn families(corpus: &Corpus, count: usize, t: &mut Tally) -> Vec<(String, ScaleFamily)> {
    let mut out = Vec::new();
    for (k, g) in corpus.trees.iter().enumerate().take(count) {
        let m = crate::graph::shortest_path_quasimetric(g);
        if m.min_positive().is_none() {
            continue;
        }
        match build_scale_family(&m, g, &TreeBuilder { root: k % g.vertex_count() }) {
            Ok(fam) => out.push((format!("tree {k}"), fam)),
            Err(e) => t.error(format!("tree {k}: {e}")),
        }
    }
    for (k, (g, td)) in corpus.treewidth.iter().enumerate().take(count) {
        let m = crate::graph::shortest_path_quasimetric(g);
        if m.min_positive().is_none() {
            continue;
        }
        let built = TreewidthBuilder::new(g, &SeparatorProvider::Decomposition(td.clone()))
            .map_err(|e| e.to_string())
            .and_then(|b| build_scale_family(&m, g, &b).map_err(|e| e.to_string()));
        match built {
            Ok(fam) => out.push((format!("treewidth graph {k}"), fam)),
            Err(e) => t.error(format!("treewidth graph {k}: {e}")),
        }
    }
    out
}

/// Choice vectors: all first items, all last items, then seeded draws.
fn choice_vectors(fam: &ScaleFamily, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; fam.scales().len()], fam.scales().iter().map(|s| s.support.len() - 1).collect()];
    out.extend((0..count).map(|_| fam.sample_choices(rng)));
    out
}

fn is_strong_ultrametric(um: &DistanceMatrix) -> Option<(usize, usize, usize)> {
    let n = um.size();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if um.get(x, y) > um.get(x, z).max(um.get(z, y)) {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

/// Exact distribution of `d*(u,v)` over the ladder `1, 2, ..., 2^(L+1)`.
fn ladder_distribution(fam: &ScaleFamily, u: usize, v: usize) -> Vec<(f64, f64)> {
    let p = fam.removal_profile(u, v);
    let top = p.len();
    // q[i] = Pr[d* >= 2^(i+1)] = 1 - prod_{j >= i} (1 - p_j)
    let mut q = vec![0.0; top + 1];
    let mut kept = 1.0;
    for i in (0..top).rev() {
        kept *= 1.0 - p[i];
        q[i] = 1.0 - kept;
    }
    (0..=top)
        .map(|k| {
            let at_least = if k == 0 { 1.0 } else { q[k - 1] };
            (2f64.powi(k as i32), at_least - q[k])
        })
        .collect()
}

fn check_chain(t: &mut Tally, fam: &ScaleFamily, u: usize, v: usize, value: f64, label: &dyn Fn() -> String) {
    let n = fam.size();
    let d = fam.metric().get(u, v);
    let lambda = fam.measured_lipschitz();
    let beta = fam.lipschitz_bound();
    let p = fam.removal_profile(u, v);
    let b = removal_bounds(d, n, lambda, fam.top_index());
    let weight = |i: usize| 2f64.powi(i as i32 + 1);
    let exact: f64 = p.iter().enumerate().map(|(i, pi)| pi * weight(i)).sum();
    let bounded: f64 = b.iter().enumerate().map(|(i, bi)| bi * weight(i)).sum();
    let mid = f64::from(mid_range_scales(d, n));
    t.check(le_tol(value, exact), || format!("{}: ({u},{v}) value {value} above scale sum {exact}", label()));
    for (i, (pi, bi)) in p.iter().zip(&b).enumerate() {
        t.check(le_tol(*pi, *bi), || format!("{}: ({u},{v}) scale {i} probability {pi} above bound {bi}", label()));
    }
    t.check(le_tol(bounded, (4.0 + 2.0 * lambda * mid) * d), || {
        format!("{}: ({u},{v}) bound sum {bounded} above (4 + 2 lambda mid) d", label())
    });
    t.check(le_tol(value / d, 4.0 + 4.0 * beta * mid), || {
        format!("{}: ({u},{v}) ratio {} above 4 + 4 beta mid", label(), value / d)
    });
}

/// Quasiultrametric embeddings: strong triangle inequality, non-contraction,
/// expected stretch against the scale-by-scale bound, and Monte Carlo agreement.
pub fn quasiultrametric_embedding(corpus: &Corpus, cfg: &VerifyConfig) -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 5);
    let fams = families(corpus, cfg.embedding_instances, &mut t);
    let mut embeddings = 0;
    let mut worst_stretch: f64 = 0.0;
    for (label, fam) in &fams {
        let m = fam.metric().matrix();
        t.check(le_tol(fam.measured_lipschitz(), 2.0 * fam.lipschitz_bound()), || {
            format!("{label}: forced constant {} above twice {}", fam.measured_lipschitz(), fam.lipschitz_bound())
        });
        for choices in choice_vectors(fam, cfg.embeddings_per_instance, &mut rng) {
            let um = match embed_quasiultrametric(fam, &choices) {
                Ok(um) => um.into_matrix(),
                Err(e) => {
                    t.error(format!("{label}: {e}"));
                    continue;
                }
            };
            embeddings += 1;
            let bad = is_strong_ultrametric(&um);
            t.check(bad.is_none(), || format!("{label}: strong triangle fails at {:?}", bad.unwrap()));
            for (u, v) in m.off_diagonal() {
                t.check(um.get(u, v) >= m.get(u, v), || {
                    format!("{label}: ({u},{v}) contracted from {} to {}", m.get(u, v), um.get(u, v))
                });
            }
        }
        for (u, v) in m.off_diagonal() {
            let d = m.get(u, v);
            if d > 0.0 && d.is_finite() {
                let e = expected_ultrametric_distance(fam, u, v);
                worst_stretch = worst_stretch.max(e / d);
                check_chain(&mut t, fam, u, v, e, &|| label.clone());
            }
        }
    }

    // Monte Carlo on the smallest instances of each kind.
    let mut by_size: Vec<&(String, ScaleFamily)> = fams.iter().collect();
    by_size.sort_by_key(|(label, fam)| (!label.starts_with("tree"), fam.size()));
    let picked: Vec<&(String, ScaleFamily)> = by_size
        .iter()
        .filter(|(l, f)| l.starts_with("tree") && f.size() >= 4)
        .take(cfg.monte_carlo_instances)
        .chain(by_size.iter().filter(|(l, f)| !l.starts_with("tree") && f.size() >= 4).take(cfg.monte_carlo_instances))
        .copied()
        .collect();
    let mut compared = 0;
    for (label, fam) in picked {
        let n = fam.size();
        let mut sums = vec![0.0; n * n];
        for _ in 0..cfg.trials {
            let choices = fam.sample_choices(&mut rng);
            match embed_quasiultrametric(fam, &choices) {
                Ok(um) => {
                    for (u, v) in um.off_diagonal() {
                        sums[u * n + v] += um.get(u, v);
                    }
                }
                Err(e) => t.error(format!("{label}: {e}")),
            }
        }
        for (u, v) in fam.metric().off_diagonal() {
            if !fam.metric().get(u, v).is_finite() {
                continue;
            }
            let dist = ladder_distribution(fam, u, v);
            let mean: f64 = dist.iter().map(|(x, p)| x * p).sum();
            let second: f64 = dist.iter().map(|(x, p)| x * x * p).sum();
            let stderr = ((second - mean * mean).max(0.0) / cfg.trials as f64).sqrt();
            let exact = expected_ultrametric_distance(fam, u, v);
            let empirical = sums[u * n + v] / cfg.trials as f64;
            compared += 1;
            t.check((mean - exact).abs() <= CHAIN_TOL * exact, || {
                format!("{label}: ({u},{v}) ladder mean {mean} differs from {exact}")
            });
            t.check((empirical - exact).abs() <= 3.0 * stderr + CHAIN_TOL * exact, || {
                format!("{label}: ({u},{v}) empirical {empirical} vs exact {exact}, stderr {stderr}")
            });
        }
    }
    let summary = format!(
        "{} families, {embeddings} embeddings, largest E[d*]/d {worst_stretch:.3}, {compared} pairs vs {} trials",
        fams.len(),
        cfg.trials
    );
    t.finish(5, "quasiultrametric embedding", start, None, summary)
}

/// 0-1 combinations: unit total weight, exact lower bound, scale-sum upper bound.
pub fn zero_one_combination(corpus: &Corpus, cfg: &VerifyConfig) -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let fams = families(corpus, cfg.embedding_instances, &mut t);
    let mut items = 0;
    for (label, fam) in &fams {
        let phi = embed_01_combination(fam);
        let c = phi.normalizer();
        items += phi.items().len();
        t.check((phi.total_coefficient() - 1.0).abs() <= SUM_TOL, || {
            format!("{label}: coefficients sum to {}", phi.total_coefficient())
        });
        for item in phi.items() {
            t.check(item.coefficient > 0.0, || format!("{label}: non-positive coefficient"));
            t.check(is_quasipartition(item.partition.relation()), || {
                format!("{label}: 0-1 item violates the triangle inequality")
            });
        }
        let m = fam.metric().matrix();
        let d_phi = phi.distances(fam.size());
        for (u, v) in m.off_diagonal() {
            let d = m.get(u, v);
            if !d.is_finite() {
                continue;
            }
            let scaled = c * d_phi.get(u, v);
            t.check(scaled >= d, || format!("{label}: ({u},{v}) c d_phi = {scaled} below d = {d}"));
            if d > 0.0 {
                let exact: f64 =
                    fam.removal_profile(u, v).iter().enumerate().map(|(i, p)| p * 2f64.powi(i as i32 + 1)).sum();
                t.check((scaled - exact).abs() <= CHAIN_TOL * exact.max(1.0), || {
                    format!("{label}: ({u},{v}) c d_phi = {scaled} differs from scale sum {exact}")
                });
                check_chain(&mut t, fam, u, v, scaled, &|| label.clone());
            }
        }
    }
    t.finish(6, "0-1 combination", start, None, format!("{} families, {items} items", fams.len()))
}

/// Thresholding produced quasiultrametrics yields transitive, `r`-bounded relations.
pub fn threshold_round_trip(corpus: &Corpus, cfg: &VerifyConfig) -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 7);
    let fams = families(corpus, cfg.embedding_instances, &mut t);
    let mut relations = 0;
    for (label, fam) in &fams {
        let m = fam.metric().matrix();
        for choices in choice_vectors(fam, cfg.embeddings_per_instance / 4, &mut rng) {
            let um = match embed_quasiultrametric(fam, &choices) {
                Ok(um) => um.into_matrix(),
                Err(e) => {
                    t.error(format!("{label}: {e}"));
                    continue;
                }
            };
            let mut radii: Vec<f64> = um.off_diagonal().map(|(u, v)| um.get(u, v)).filter(|d| d.is_finite()).collect();
            radii.extend(radii.clone().iter().map(|d| d * 1.5));
            radii.extend([0.5, rng.random_range(0.0..2.0 * fam.delta() + 1.0)]);
            radii.sort_by(f64::total_cmp);
            radii.dedup();
            for r in radii {
                match quasiultrametric_to_quasipartition(&um, r) {
                    Ok(p) => {
                        relations += 1;
                        t.check(is_quasipartition(p.relation()), || format!("{label}: threshold {r} not transitive"));
                        let escaped = p.pairs().find(|&(u, v)| !(m.get(u, v) <= r));
                        t.check(escaped.is_none(), || format!("{label}: threshold {r} relates {:?}", escaped.unwrap()));
                    }
                    Err(e) => t.error(format!("{label}: threshold {r}: {e}")),
                }
            }
        }
    }
    t.finish(7, "threshold round trip", start, None, format!("{relations} thresholded relations"))
}

fn cut_options(k: usize, td: &TreeDecomposition) -> CutOptions {
    let strategy =
        if k.is_multiple_of(2) { SeparatorStrategy::Auto } else { SeparatorStrategy::Decomposition(td.clone()) };
    CutOptions { strategy, ..CutOptions::default() }
}

/// The sparsest-cut pipeline against brute-force optima.
pub fn sparsest_cut_pipeline(corpus: &Corpus, _cfg: &VerifyConfig) -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut worst_ratio: f64 = 1.0;
    let mut trivial = 0;
    for (k, (inst, td)) in corpus.cuts.iter().enumerate() {
        let label = format!("cut instance {k}");
        let best = match brute_force_sparsest_cut(inst) {
            Ok(b) => b,
            Err(e) => {
                t.error(format!("{label}: {e}"));
                continue;
            }
        };
        let report = match solve_sparsest_cut(inst, &cut_options(k, td)) {
            Ok(r) => r,
            Err(e) => {
                t.error(format!("{label}: {e}"));
                continue;
            }
        };
        trivial += usize::from(report.trivial);
        let cut = &report.cut;
        let recheck = evaluate_cut(inst, &cut.edges);
        t.check(recheck.separated == cut.separated && recheck.sparsity == cut.sparsity, || {
            format!("{label}: reported separation {:?} but recheck gives {:?}", cut.separated, recheck.separated)
        });
        t.check(report.lp_value <= best.sparsity * (1.0 + LP_TOL), || {
            format!("{label}: LP value {} above optimum {}", report.lp_value, best.sparsity)
        });
        t.check(cut.sparsity <= report.bound() * (1.0 + CHAIN_TOL), || {
            format!("{label}: sparsity {} above distortion x LP = {}", cut.sparsity, report.bound())
        });
        t.check(cut.sparsity >= best.sparsity * (1.0 - SUM_TOL), || {
            format!("{label}: sparsity {} below the optimum {}", cut.sparsity, best.sparsity)
        });
        if best.sparsity > 0.0 {
            worst_ratio = worst_ratio.max(cut.sparsity / best.sparsity);
        }
    }
    let summary =
        format!("{} instances ({trivial} trivial), worst ratio to optimum {worst_ratio:.3}", corpus.cuts.len());
    t.finish(8, "sparsest-cut pipeline", start, Some(Duration::from_secs(600)), summary)
}

/// Multicut: full separation and the harmonic capacity bound.
pub fn multicut(corpus: &Corpus, _cfg: &VerifyConfig) -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut worst: f64 = 0.0;
    for (k, (inst, td)) in corpus.cuts.iter().enumerate() {
        let label = format!("cut instance {k}");
        let report = match solve_multicut(inst, &cut_options(k, td)) {
            Ok(r) => r,
            Err(e) => {
                t.error(format!("{label}: {e}"));
                continue;
            }
        };
        let recheck = evaluate_cut(inst, &report.cut.edges);
        t.check(recheck.separated.len() == inst.pairs().len(), || {
            format!("{label}: multicut leaves pairs connected, separated {:?}", recheck.separated)
        });
        let optimum = match brute_force_multicut(inst) {
            Ok(b) => b.capacity,
            Err(e) => {
                t.error(format!("{label}: {e}"));
                continue;
            }
        };
        let mut alpha: f64 = 1.0;
        for (i, it) in report.iterations.iter().enumerate() {
            t.check(!it.separated.is_empty(), || format!("{label}: round {i} separated nothing"));
            let sub = match inst
                .with_unit_demands(&it.remaining)
                .map_err(|e| e.to_string())
                .and_then(|s| brute_force_sparsest_cut(&s).map_err(|e| e.to_string()))
            {
                Ok(b) => b,
                Err(e) => {
                    t.error(format!("{label}: round {i}: {e}"));
                    continue;
                }
            };
            let ratio = if it.sparsity == 0.0 { 1.0 } else { it.sparsity / sub.sparsity };
            alpha = alpha.max(ratio);
        }
        let h = harmonic(inst.pairs().len());
        let bound = alpha * h * optimum;
        t.check(report.cut.capacity <= bound * (1.0 + CHAIN_TOL), || {
            format!("{label}: capacity {} above alpha {alpha} x H {h} x OPT {optimum}", report.cut.capacity)
        });
        if optimum > 0.0 {
            worst = worst.max(report.cut.capacity / optimum);
        }
    }
    t.finish(9, "multicut", start, None, format!("{} instances, worst ratio to optimum {worst:.3}", corpus.cuts.len()))
}

/// Criteria 1 through 9 in order.
pub fn run_all(cfg: &VerifyConfig) -> Vec<Outcome> {
    let corpus = Corpus::generate(cfg);
    type Check = fn(&Corpus, &VerifyConfig) -> Outcome;
    let checks: [Check; 9] = [
        structural_soundness,
        tree_lipschitz,
        treewidth_lipschitz,
        epsilon_forcing,
        quasiultrametric_embedding,
        zero_one_combination,
        threshold_round_trip,
        sparsest_cut_pipeline,
        multicut,
    ];
    checks.iter().map(|check| check(&corpus, cfg)).collect()
}
