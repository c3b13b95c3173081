//! Quasiultrametric and 0-1 convex-combination embeddings built from
//! families of forced quasipartition distributions at radii `1, 2, 4, ...`.

use std::collections::HashMap;

use rand::Rng;
use thiserror::Error;

use crate::graph::WeightedDigraph;
use crate::metric::{floor_log2, validate_quasiultrametric, DistanceMatrix, QuasiUltrametric, Quasimetric, Violation};
use crate::partition::{lipschitz_constant, PartitionError, Quasipartition, Relation, SupportBuilder, WeightedSupport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmbeddingError {
    #[error("no pair is at positive finite distance")]
    DegenerateSpace,
    #[error("metric has {metric} points but graph has {graph} vertices")]
    SizeMismatch { metric: usize, graph: usize },
    #[error("expected {expected} scale choices, got {got}")]
    ScaleMismatch { expected: usize, got: usize },
    #[error("choice {index} at scale {scale} is outside a support of {len} items")]
    ChoiceOutOfRange { scale: usize, index: usize, len: usize },
    #[error("not a quasiultrametric: {0}")]
    NotAQuasiUltrametric(Violation),
    #[error("threshold relation at r = {0} is not transitive")]
    ThresholdNotTransitive(f64),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// One rung of the ladder: a forced distribution whose members are
/// `radius`-bounded on the rescaled metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Scale {
    pub index: u32,
    pub radius: f64,
    pub support: WeightedSupport,
}

#[derive(Debug, Clone)]
pub struct ScaleFamily {
    scales: Vec<Scale>,
    delta: f64,
    scale_factor: f64,
    metric: Quasimetric,
    graph: WeightedDigraph,
    lipschitz_bound: f64,
}

/// Rescale so the smallest positive finite distance is 1, then build one
/// forced support at each radius `2^i` for `i = 0..=floor(log2(delta))`.
///
/// `m` is expected to be the shortest-path quasimetric of `g`.
pub fn build_scale_family(
    m: &Quasimetric,
    g: &WeightedDigraph,
    builder: &impl SupportBuilder,
) -> Result<ScaleFamily, EmbeddingError> {
    if m.size() != g.vertex_count() {
        return Err(EmbeddingError::SizeMismatch { metric: m.size(), graph: g.vertex_count() });
    }
    let unit = m.min_positive().ok_or(EmbeddingError::DegenerateSpace)?;
    let metric = Quasimetric::from_trusted(m.divided_by(unit));
    let graph = g.map_weights(|e| e.weight / unit).expect("rescaled weights stay valid");
    let delta = metric.max_finite().expect("a positive finite distance exists");
    let top = floor_log2(delta).max(0) as u32;
    let scales = (0..=top)
        .map(|i| {
            let radius = 2f64.powi(i as i32);
            Ok(Scale { index: i, radius, support: builder.build_forced(&graph, radius)? })
        })
        .collect::<Result<Vec<_>, PartitionError>>()?;
    Ok(ScaleFamily {
        scales,
        delta,
        scale_factor: 1.0 / unit,
        metric,
        graph,
        lipschitz_bound: builder.lipschitz_bound(g.vertex_count()),
    })
}

impl ScaleFamily {
    pub fn scales(&self) -> &[Scale] {
        &self.scales
    }

    /// Largest finite rescaled distance.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Multiplier taking original distances to rescaled ones.
    pub fn scale_factor(&self) -> f64 {
        self.scale_factor
    }

    pub fn metric(&self) -> &Quasimetric {
        &self.metric
    }

    pub fn graph(&self) -> &WeightedDigraph {
        &self.graph
    }

    pub fn size(&self) -> usize {
        self.metric.size()
    }

    /// `floor(log2(delta))`, the index of the coarsest scale.
    pub fn top_index(&self) -> u32 {
        self.scales.last().map_or(0, |s| s.index)
    }

    /// Proven Lipschitz constant of the unforced family.
    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }

    /// Largest exact Lipschitz constant over all scales, against the rescaled metric.
    pub fn measured_lipschitz(&self) -> f64 {
        self.scales.iter().map(|s| lipschitz_constant(&s.support, self.metric.matrix(), s.radius)).fold(0.0, f64::max)
    }

    /// `Pr[(u,v) not in P_i]` for each scale, ascending.
    pub fn removal_profile(&self, u: usize, v: usize) -> Vec<f64> {
        self.scales.iter().map(|s| s.support.removal_probability(u, v)).collect()
    }

    /// One support index per scale, drawn in ascending scale order.
    pub fn sample_choices<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        self.scales.iter().map(|s| s.support.sample_index(rng)).collect()
    }
}

/// Descending-ladder quasiultrametric for one choice per scale.
///
/// Pairs at infinite distance stay infinite.
pub fn embed_quasiultrametric(fam: &ScaleFamily, choices: &[usize]) -> Result<QuasiUltrametric, EmbeddingError> {
    if choices.len() != fam.scales.len() {
        return Err(EmbeddingError::ScaleMismatch { expected: fam.scales.len(), got: choices.len() });
    }
    let chosen: Vec<&Quasipartition> = fam
        .scales
        .iter()
        .zip(choices)
        .enumerate()
        .map(|(k, (s, &idx))| {
            s.support.items().get(idx).map(|it| &it.partition).ok_or(EmbeddingError::ChoiceOutOfRange {
                scale: k,
                index: idx,
                len: s.support.len(),
            })
        })
        .collect::<Result<_, _>>()?;
    let n = fam.size();
    let top = 2.0 * fam.scales.last().map_or(1.0, |s| s.radius);
    let m = fam.metric.matrix();
    let mut out = DistanceMatrix::from_fn(n, |u, v| {
        if u == v {
            0.0
        } else if m.get(u, v).is_finite() {
            top
        } else {
            f64::INFINITY
        }
    })
    .expect("ladder values are valid distances");
    for (s, p) in fam.scales.iter().zip(&chosen).rev() {
        for (u, v) in p.proper_pairs() {
            if out.get(u, v) == 2.0 * s.radius {
                out.set(u, v, s.radius);
            }
        }
    }
    QuasiUltrametric::new(out).map_err(EmbeddingError::NotAQuasiUltrametric)
}

/// Exact `E[d*(u,v)]` under independent per-scale draws.
pub fn expected_ultrametric_distance(fam: &ScaleFamily, u: usize, v: usize) -> f64 {
    if u == v {
        return 0.0;
    }
    if !fam.metric.get(u, v).is_finite() {
        return f64::INFINITY;
    }
    let p = fam.removal_profile(u, v);
    let mut kept_above = 1.0;
    let mut expected = 1.0;
    for (i, s) in fam.scales.iter().enumerate().rev() {
        kept_above *= 1.0 - p[i];
        expected += s.radius * (1.0 - kept_above);
    }
    expected
}

/// Per-scale upper bounds on removal probabilities for a pair at rescaled
/// distance `d`: certain removal up to scale `floor(log2 d)`, `lambda d / 2^i`
/// up to `floor(log2(2 n d))`, and zero above where forcing applies.
pub fn removal_bounds(d: f64, n: usize, lambda: f64, top_index: u32) -> Vec<f64> {
    let low = floor_log2(d);
    let high = floor_log2(2.0 * n as f64 * d);
    (0..=top_index as i32)
        .map(|i| {
            if i <= low {
                1.0
            } else if i <= high {
                (lambda * d / 2f64.powi(i)).min(1.0)
            } else {
                0.0
            }
        })
        .collect()
}

/// Number of scales strictly above `floor(log2 d)` and at most `floor(log2(2 n d))`.
pub fn mid_range_scales(d: f64, n: usize) -> u32 {
    (floor_log2(2.0 * n as f64 * d) - floor_log2(d)).max(0) as u32
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombinationItem {
    pub partition: Quasipartition,
    pub coefficient: f64,
}

/// Convex combination of the 0-1 quasimetrics induced by quasipartitions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCombination01 {
    items: Vec<CombinationItem>,
    normalizer: f64,
}

impl ConvexCombination01 {
    pub fn items(&self) -> &[CombinationItem] {
        &self.items
    }

    /// `c = sum_i 2^(i+1)` over the scale ladder.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn total_coefficient(&self) -> f64 {
        self.items.iter().map(|it| it.coefficient).sum()
    }

    /// Matrix of `combination_distance` over all pairs.
    pub fn distances(&self, n: usize) -> DistanceMatrix {
        DistanceMatrix::from_fn(n, |u, v| combination_distance(self, u, v)).expect("convex weights are finite")
    }
}

/// Scale `i` carries mass `2^(i+1) / c`, split by support weight; identical
/// quasipartitions are merged in first-appearance order.
pub fn embed_01_combination(fam: &ScaleFamily) -> ConvexCombination01 {
    let normalizer: f64 = fam.scales.iter().map(|s| 2.0 * s.radius).sum();
    let mut items: Vec<CombinationItem> = Vec::new();
    let mut position: HashMap<&Quasipartition, usize> = HashMap::new();
    for s in &fam.scales {
        let mass = 2.0 * s.radius / normalizer;
        for it in s.support.items() {
            let coefficient = mass * it.weight;
            match position.get(&it.partition) {
                Some(&k) => items[k].coefficient += coefficient,
                None => {
                    position.insert(&it.partition, items.len());
                    items.push(CombinationItem { partition: it.partition.clone(), coefficient });
                }
            }
        }
    }
    ConvexCombination01 { items, normalizer }
}

/// `sum_j alpha_j d_j(u,v)`: total coefficient of items not relating `(u,v)`.
pub fn combination_distance(phi: &ConvexCombination01, u: usize, v: usize) -> f64 {
    phi.items.iter().filter(|it| !it.partition.contains(u, v)).map(|it| it.coefficient).sum()
}

/// Pairs at distance at most `r`. Transitivity comes from the strong
/// triangle inequality and is checked, not enforced.
pub fn quasiultrametric_to_quasipartition(um: &DistanceMatrix, r: f64) -> Result<Quasipartition, EmbeddingError> {
    validate_quasiultrametric(um).map_err(EmbeddingError::NotAQuasiUltrametric)?;
    let rel = Relation::from_fn(um.size(), |u, v| um.get(u, v) <= r);
    Quasipartition::try_from_relation(rel).map_err(|_| EmbeddingError::ThresholdNotTransitive(r))
}

/// `(max d/d2, max d2/d)` over pairs with both values positive and finite;
/// `(0, 0)` when there are none.
pub fn distortion(m: &DistanceMatrix, m2: &DistanceMatrix) -> (f64, f64) {
    assert_eq!(m.size(), m2.size(), "metric sizes differ");
    m.off_diagonal()
        .filter_map(|(u, v)| {
            let (a, b) = (m.get(u, v), m2.get(u, v));
            (a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()).then_some((a / b, b / a))
        })
        .fold((0.0, 0.0), |(c, e), (x, y)| (f64::max(c, x), f64::max(e, y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::shortest_path_quasimetric;
    use crate::partition::TreeBuilder;

    fn pair_family(w: f64) -> ScaleFamily {
        let g = WeightedDigraph::bidirected(2, &[(0, 1, w)]).unwrap();
        build_scale_family(&shortest_path_quasimetric(&g), &g, &TreeBuilder { root: 0 }).unwrap()
    }

    #[test]
    fn unit_pair_has_one_scale() {
        let fam = pair_family(3.0);
        assert_eq!(fam.scales().len(), 1);
        assert_eq!(fam.delta(), 1.0);
        assert_eq!(fam.scale_factor(), 1.0 / 3.0);
    }

    #[test]
    fn ladder_depth_follows_diameter() {
        let g = WeightedDigraph::bidirected(3, &[(0, 1, 1.0), (1, 2, 7.0)]).unwrap();
        let fam = build_scale_family(&shortest_path_quasimetric(&g), &g, &TreeBuilder { root: 1 }).unwrap();
        assert_eq!(fam.delta(), 8.0);
        assert_eq!(fam.scales().iter().map(|s| s.index).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn degenerate_space_is_rejected() {
        let g = WeightedDigraph::bidirected(2, &[(0, 1, 0.0)]).unwrap();
        let err = build_scale_family(&shortest_path_quasimetric(&g), &g, &TreeBuilder { root: 0 });
        assert_eq!(err.unwrap_err(), EmbeddingError::DegenerateSpace);
    }

    #[test]
    fn unit_pair_is_always_separated_at_the_bottom() {
        let fam = pair_family(1.0);
        assert_eq!(fam.removal_profile(0, 1), vec![1.0]);
        assert_eq!(expected_ultrametric_distance(&fam, 0, 1), 2.0);
        let um = embed_quasiultrametric(&fam, &[0]).unwrap();
        assert_eq!(um.get(0, 1), 2.0);
        assert_eq!(um.get(1, 0), 2.0);
        assert_eq!(
            embed_quasiultrametric(&fam, &[]).unwrap_err(),
            EmbeddingError::ScaleMismatch { expected: 1, got: 0 }
        );
    }

    #[test]
    fn infinite_pairs_stay_infinite() {
        let g = WeightedDigraph::new(2, vec![crate::graph::Edge::new(0, 1, 2.0)]).unwrap();
        let m = shortest_path_quasimetric(&g);
        let builder = crate::partition::TreewidthBuilder::new(
            &g,
            &crate::partition::SeparatorProvider::Exhaustive { max_size: 1 },
        )
        .unwrap();
        let fam = build_scale_family(&m, &g, &builder).unwrap();
        let um = embed_quasiultrametric(&fam, &vec![0; fam.scales().len()]).unwrap();
        assert_eq!(um.get(1, 0), f64::INFINITY);
        assert_eq!(expected_ultrametric_distance(&fam, 1, 0), f64::INFINITY);
    }

    #[test]
    fn combination_weights_follow_scale_mass() {
        let fam = pair_family(1.0);
        let phi = embed_01_combination(&fam);
        assert_eq!(phi.normalizer(), 2.0);
        assert!((phi.total_coefficient() - 1.0).abs() < 1e-12);
        // q = 1 at the only scale
        assert_eq!(combination_distance(&phi, 0, 1), 1.0);
        assert_eq!(combination_distance(&phi, 0, 0), 0.0);
    }

    #[test]
    fn thresholding() {
        let um = DistanceMatrix::from_rows(&[vec![0.0, 1.0], vec![3.0, 0.0]]).unwrap();
        let p = quasiultrametric_to_quasipartition(&um, 2.0).unwrap();
        assert_eq!(p.relation(), &Relation::from_pairs(2, [(0, 0), (1, 1), (0, 1)]));
        assert_eq!(quasiultrametric_to_quasipartition(&um, 3.0).unwrap(), Quasipartition::full(2));
        let bad = DistanceMatrix::from_rows(&[vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]]).unwrap();
        assert!(matches!(quasiultrametric_to_quasipartition(&bad, 1.0), Err(EmbeddingError::NotAQuasiUltrametric(_))));
    }

    #[test]
    fn distortion_of_scaled_copy() {
        let m = DistanceMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(distortion(&m, &m), (1.0, 1.0));
        assert_eq!(distortion(&m, &m.scaled(2.0)), (0.5, 2.0));
        assert_eq!(distortion(&DistanceMatrix::zeros(2), &m), (0.0, 0.0));
    }

    #[test]
    fn bound_terms() {
        // d = 3, n = 4: certain up to scale 1, mid-range scales 2..=4
        let b = removal_bounds(3.0, 4, 2.0, 5);
        assert_eq!(b[..2], [1.0, 1.0]);
        assert_eq!(b[2], 1.0);
        assert_eq!(b[3], 0.75);
        assert_eq!(b[4], 0.375);
        assert_eq!(b[5], 0.0);
        assert_eq!(mid_range_scales(3.0, 4), 3);
    }
}
