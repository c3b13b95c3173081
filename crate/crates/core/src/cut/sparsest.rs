use super::instance::{sparsity_of, CutInstance, CutResult};
use super::lp::{solve_lp, LinearProgram, Sense};
use super::CutError;
use crate::embedding::{build_scale_family, distortion, embed_01_combination, ConvexCombination01};
use crate::graph::{shortest_path_quasimetric, WeightedDigraph};
use crate::metric::Quasimetric;
use crate::partition::{SeparatorProvider, SeparatorTree, TreeDecomposition, TreewidthBuilder};

/// Relative slack allowed when checking the rounding certificate.
pub const CERTIFICATE_RTOL: f64 = 1e-9;

/// Relaxation with one length `x(e)` per edge and one distance `d(u,v)` per
/// ordered pair of distinct vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsestCutLp {
    pub program: LinearProgram,
    n: usize,
    edge_count: usize,
}

impl SparsestCutLp {
    pub fn edge_var(&self, e: usize) -> usize {
        e
    }

    pub fn distance_var(&self, u: usize, v: usize) -> usize {
        assert!(u != v && u < self.n && v < self.n);
        self.edge_count + u * (self.n - 1) + if v < u { v } else { v - 1 }
    }
}

pub fn build_sparsest_cut_lp(inst: &CutInstance) -> SparsestCutLp {
    let g = inst.graph();
    let n = g.vertex_count();
    let edge_count = g.edge_count();
    let mut lp = SparsestCutLp { program: LinearProgram::new(edge_count + n * n.saturating_sub(1)), n, edge_count };
    for (id, e) in g.edges().iter().enumerate() {
        lp.program.objective[id] = e.weight;
    }
    for (id, e) in g.edges().iter().enumerate() {
        let terms = vec![(lp.distance_var(e.tail, e.head), 1.0), (lp.edge_var(id), -1.0)];
        lp.program.add(terms, Sense::Le, 0.0);
    }
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                if u == v || v == w || u == w {
                    continue;
                }
                let terms =
                    vec![(lp.distance_var(u, w), 1.0), (lp.distance_var(u, v), -1.0), (lp.distance_var(v, w), -1.0)];
                lp.program.add(terms, Sense::Le, 0.0);
            }
        }
    }
    let mut demand: Vec<(usize, f64)> = Vec::new();
    for p in inst.pairs().iter().filter(|p| p.demand > 0.0) {
        let var = lp.distance_var(p.source, p.sink);
        match demand.iter_mut().find(|(j, _)| *j == var) {
            Some(entry) => entry.1 += p.demand,
            None => demand.push((var, p.demand)),
        }
    }
    lp.program.add(demand, Sense::Ge, 1.0);
    lp
}

/// Shortest-path quasimetric of `g` with edge lengths `lengths`.
pub fn lp_distances_to_quasimetric(g: &WeightedDigraph, lengths: &[f64]) -> Quasimetric {
    let weighted = g.with_weights(lengths).expect("edge lengths are non-negative and finite");
    shortest_path_quasimetric(&weighted)
}

/// Quantities that bound the rounded sparsity from above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundingCertificate {
    /// `sum c(e) d_phi(e) / sum dem d_phi(s,t)`.
    pub combination_ratio: f64,
    /// `sum c(e) m(e) / sum dem m(s,t)`.
    pub fractional_ratio: f64,
    /// Largest `m / d_phi` over pairs where both are positive and finite.
    pub contraction: f64,
    /// Largest `d_phi / m` over the same pairs.
    pub expansion: f64,
}

impl RoundingCertificate {
    pub fn distortion(&self) -> f64 {
        self.contraction * self.expansion
    }
}

/// Best cut among those induced by the 0-1 quasimetrics of `phi`, together
/// with the chain `sparsity <= combination ratio <= distortion * fractional ratio`.
pub fn round_sparsest_cut(
    inst: &CutInstance,
    m: &Quasimetric,
    phi: &ConvexCombination01,
) -> Result<(CutResult, RoundingCertificate), CutError> {
    let g = inst.graph();
    let n = g.vertex_count();
    let mut best: Option<CutResult> = None;
    for item in phi.items() {
        let edges: Vec<usize> = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| !item.partition.contains(e.tail, e.head))
            .map(|(id, _)| id)
            .collect();
        let candidate = sparsity_of(inst, &edges);
        if candidate.sparsity.is_finite() && best.as_ref().is_none_or(|b| candidate.preference(b).is_lt()) {
            best = Some(candidate);
        }
    }
    let cut = best.ok_or(CutError::NoSeparatingCandidate)?;

    let d_phi = phi.distances(n);
    let ratio = |d: &dyn Fn(usize, usize) -> f64| {
        let num: f64 = g.edges().iter().map(|e| e.weight * d(e.tail, e.head)).sum();
        let den: f64 = inst.pairs().iter().map(|p| p.demand * d(p.source, p.sink)).sum();
        num / den
    };
    let (contraction, expansion) = distortion(m.matrix(), &d_phi);
    let cert = RoundingCertificate {
        combination_ratio: ratio(&|u, v| d_phi.get(u, v)),
        fractional_ratio: ratio(&|u, v| m.get(u, v)),
        contraction,
        expansion,
    };
    let slack = 1.0 + CERTIFICATE_RTOL;
    if !(cut.sparsity <= cert.combination_ratio * slack) {
        return Err(CutError::CertificateViolated {
            stage: "combination ratio",
            sparsity: cut.sparsity,
            bound: cert.combination_ratio,
        });
    }
    if !(cert.combination_ratio <= cert.distortion() * cert.fractional_ratio * slack) {
        return Err(CutError::CertificateViolated {
            stage: "distortion times fractional ratio",
            sparsity: cert.combination_ratio,
            bound: cert.distortion() * cert.fractional_ratio,
        });
    }
    Ok((cut, cert))
}

/// How the separator hierarchy for the rounding step is obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparatorStrategy {
    /// Smallest exhaustive size bound that works at every level.
    Auto,
    /// Exhaustive search with this size bound.
    Exhaustive(usize),
    /// Bags of a supplied tree decomposition.
    Decomposition(TreeDecomposition),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutOptions {
    pub strategy: SeparatorStrategy,
    /// Largest vertex count accepted by the LP path.
    pub max_lp_vertices: usize,
}

impl Default for CutOptions {
    fn default() -> Self {
        Self { strategy: SeparatorStrategy::Auto, max_lp_vertices: crate::DEFAULT_MAX_LP_VERTICES }
    }
}

impl CutOptions {
    pub(crate) fn hierarchy(&self, g: &WeightedDigraph) -> Result<SeparatorTree, CutError> {
        Ok(match &self.strategy {
            SeparatorStrategy::Auto => SeparatorTree::smallest_exhaustive(g)?.1,
            SeparatorStrategy::Exhaustive(t) => {
                SeparatorTree::build(g, &SeparatorProvider::Exhaustive { max_size: *t })?
            }
            SeparatorStrategy::Decomposition(td) => {
                SeparatorTree::build(g, &SeparatorProvider::Decomposition(td.clone()))?
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsestCutReport {
    pub cut: CutResult,
    /// Some demand pair was already disconnected, so the empty cut was returned without solving.
    pub trivial: bool,
    pub lp_value: f64,
    /// Optimal `x(e)` per edge.
    pub lp_lengths: Vec<f64>,
    pub separator_width: usize,
    pub scale_count: usize,
    pub combination_size: usize,
    pub certificate: RoundingCertificate,
}

impl SparsestCutReport {
    /// `distortion * lp_value`, the bound the rounded sparsity is checked against.
    pub fn bound(&self) -> f64 {
        self.certificate.distortion() * self.lp_value
    }

    /// Rounded sparsity over the LP value; 1 when both are zero.
    pub fn approximation_ratio(&self) -> f64 {
        if self.cut.sparsity == 0.0 {
            1.0
        } else {
            self.cut.sparsity / self.lp_value
        }
    }
}

/// LP, shortest-path metric of its lengths, separator-based 0-1
/// combination, and rounding, with every step of the bound checked.
pub fn solve_sparsest_cut(inst: &CutInstance, opts: &CutOptions) -> Result<SparsestCutReport, CutError> {
    let g = inst.graph();
    let n = g.vertex_count();
    if n > opts.max_lp_vertices {
        return Err(CutError::TooLarge { n, limit: opts.max_lp_vertices });
    }
    let hierarchy = opts.hierarchy(g)?;
    let empty = sparsity_of(inst, &[]);
    if empty.separated.iter().any(|&i| inst.pairs()[i].demand > 0.0) {
        return Ok(SparsestCutReport {
            cut: empty,
            trivial: true,
            lp_value: 0.0,
            lp_lengths: vec![0.0; g.edge_count()],
            separator_width: hierarchy.max_separator_size(),
            scale_count: 0,
            combination_size: 0,
            certificate: RoundingCertificate {
                combination_ratio: 0.0,
                fractional_ratio: 0.0,
                contraction: 1.0,
                expansion: 1.0,
            },
        });
    }

    let lp = build_sparsest_cut_lp(inst);
    let solution = solve_lp(&lp.program)?;
    let largest = solution.x[..g.edge_count()].iter().copied().fold(0.0, f64::max);
    let lengths: Vec<f64> =
        solution.x[..g.edge_count()].iter().map(|&x| if x <= 1e-12 * largest { 0.0 } else { x }).collect();
    let m = lp_distances_to_quasimetric(g, &lengths);
    let builder = TreewidthBuilder { hierarchy };
    let separator_width = builder.width();
    let fam = build_scale_family(&m, &g.with_weights(&lengths)?, &builder)?;
    let phi = embed_01_combination(&fam);
    let (cut, certificate) = round_sparsest_cut(inst, &m, &phi)?;

    let slack = 1.0 + CERTIFICATE_RTOL;
    if !(certificate.fractional_ratio <= solution.value * slack) {
        return Err(CutError::CertificateViolated {
            stage: "fractional ratio versus LP value",
            sparsity: certificate.fractional_ratio,
            bound: solution.value,
        });
    }
    if !(cut.sparsity <= certificate.distortion() * solution.value * slack) {
        return Err(CutError::CertificateViolated {
            stage: "distortion times LP value",
            sparsity: cut.sparsity,
            bound: certificate.distortion() * solution.value,
        });
    }
    Ok(SparsestCutReport {
        cut,
        trivial: false,
        lp_value: solution.value,
        lp_lengths: lengths,
        separator_width,
        scale_count: fam.scales().len(),
        combination_size: phi.items().len(),
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::TerminalPair;
    use crate::graph::Edge;

    fn single_edge() -> CutInstance {
        let g = WeightedDigraph::new(2, vec![Edge::new(0, 1, 1.0)]).unwrap();
        CutInstance::new(g, vec![TerminalPair::new(0, 1, 1.0)]).unwrap()
    }

    fn two_paths() -> CutInstance {
        // s=0, a=1, b=2, t=3
        let g = WeightedDigraph::new(
            4,
            vec![Edge::new(0, 1, 1.0), Edge::new(1, 3, 1.0), Edge::new(0, 2, 1.0), Edge::new(2, 3, 1.0)],
        )
        .unwrap();
        CutInstance::new(g, vec![TerminalPair::new(0, 3, 1.0)]).unwrap()
    }

    #[test]
    fn lp_layout() {
        let lp = build_sparsest_cut_lp(&two_paths());
        assert_eq!(lp.program.num_vars(), 4 + 12);
        // 4 edge rows, 24 triangle rows, 1 demand row
        assert_eq!(lp.program.constraints.len(), 4 + 24 + 1);
        assert_eq!(lp.distance_var(0, 1), 4);
        assert_eq!(lp.distance_var(3, 2), 15);
    }

    #[test]
    fn single_edge_pipeline() {
        let report = solve_sparsest_cut(&single_edge(), &CutOptions::default()).unwrap();
        assert!((report.lp_value - 1.0).abs() < 1e-9);
        assert_eq!(report.cut.edges, vec![0]);
        assert_eq!(report.cut.sparsity, 1.0);
    }

    #[test]
    fn two_path_lp_value() {
        let inst = two_paths();
        let lp = build_sparsest_cut_lp(&inst);
        let s = solve_lp(&lp.program).unwrap();
        assert!((s.value - 2.0).abs() < 1e-9);
        let report = solve_sparsest_cut(&inst, &CutOptions::default()).unwrap();
        assert_eq!(report.cut.sparsity, 2.0);
        assert!(report.cut.sparsity <= report.bound() * (1.0 + 1e-9));
    }

    #[test]
    fn disconnected_pair_gives_empty_cut() {
        let g = WeightedDigraph::new(2, vec![Edge::new(1, 0, 1.0)]).unwrap();
        let inst = CutInstance::new(g, vec![TerminalPair::new(0, 1, 1.0)]).unwrap();
        let report = solve_sparsest_cut(&inst, &CutOptions::default()).unwrap();
        assert!(report.trivial);
        assert!(report.cut.edges.is_empty());
        assert_eq!(report.cut.sparsity, 0.0);
    }

    #[test]
    fn zero_demand_pairs_do_not_change_the_lp() {
        let base = two_paths();
        let mut pairs = base.pairs().to_vec();
        pairs.push(TerminalPair::new(1, 2, 0.0));
        let padded = CutInstance::new(base.graph().clone(), pairs).unwrap();
        assert_eq!(build_sparsest_cut_lp(&padded), build_sparsest_cut_lp(&base));
    }

    #[test]
    fn size_cap_is_enforced() {
        let opts = CutOptions { max_lp_vertices: 1, ..CutOptions::default() };
        assert_eq!(solve_sparsest_cut(&single_edge(), &opts), Err(CutError::TooLarge { n: 2, limit: 1 }));
    }
}
