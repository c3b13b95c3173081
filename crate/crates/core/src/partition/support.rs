use std::collections::HashMap;

use rand::Rng;

use super::relation::Quasipartition;
use crate::metric::DistanceMatrix;

/// One quasipartition of a finite distribution, with the set of threshold
/// values `z` that produce it.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportItem {
    pub partition: Quasipartition,
    pub weight: f64,
    /// Half-open `[lo, hi)` pieces of `[0, z_max]`, ascending.
    pub intervals: Vec<(f64, f64)>,
}

/// A distribution over quasipartitions with exactly representable weights.
///
/// `bound` is the radius each member is claimed to respect; `z_max` is the
/// upper end of the threshold range the distribution was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSupport {
    items: Vec<SupportItem>,
    bound: f64,
    z_max: f64,
}

impl WeightedSupport {
    /// Distribution concentrated on a single quasipartition.
    pub fn point(partition: Quasipartition, bound: f64, z_max: f64) -> Self {
        Self { items: vec![SupportItem { partition, weight: 1.0, intervals: vec![(0.0, z_max)] }], bound, z_max }
    }

    /// Exact distribution of `eval(z)` for `z ~ Uniform[0, z_max]`, where the
    /// outcome is constant on each half-open gap between consecutive
    /// `breakpoints`. Each gap is evaluated at its midpoint.
    pub(crate) fn from_breakpoints<E>(
        mut breakpoints: Vec<f64>,
        z_max: f64,
        bound: f64,
        mut eval: impl FnMut(f64) -> Result<Quasipartition, E>,
    ) -> Result<Self, E> {
        assert!(z_max > 0.0 && z_max.is_finite());
        breakpoints.retain(|b| (0.0..=z_max).contains(b));
        breakpoints.push(0.0);
        breakpoints.push(z_max);
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();

        let mut items: Vec<SupportItem> = Vec::new();
        let mut position: HashMap<Quasipartition, usize> = HashMap::new();
        for gap in breakpoints.windows(2) {
            let (lo, hi) = (gap[0], gap[1]);
            let weight = (hi - lo) / z_max;
            if weight <= 0.0 {
                continue;
            }
            let partition = eval(lo + (hi - lo) / 2.0)?;
            match position.get(&partition) {
                Some(&k) => {
                    let item = &mut items[k];
                    item.weight += weight;
                    match item.intervals.last_mut() {
                        Some(last) if last.1 == lo => last.1 = hi,
                        _ => item.intervals.push((lo, hi)),
                    }
                }
                None => {
                    position.insert(partition.clone(), items.len());
                    items.push(SupportItem { partition, weight, intervals: vec![(lo, hi)] });
                }
            }
        }
        Ok(Self { items, bound, z_max })
    }

    pub fn items(&self) -> &[SupportItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    /// Same items, claimed to respect a different radius.
    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = bound;
        self
    }

    pub fn total_weight(&self) -> f64 {
        self.items.iter().map(|it| it.weight).sum()
    }

    /// `Pr[(u, v) not in P]`.
    pub fn removal_probability(&self, u: usize, v: usize) -> f64 {
        self.items.iter().filter(|it| !it.partition.contains(u, v)).map(|it| it.weight).sum()
    }

    /// The item whose threshold set contains `z`.
    pub fn locate(&self, z: f64) -> Option<&SupportItem> {
        self.items.iter().find(|it| {
            it.intervals.iter().any(|&(lo, hi)| (lo <= z && z < hi) || (z == self.z_max && hi == self.z_max))
        })
    }

    /// Index of an item drawn with probability equal to its weight.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = self.total_weight();
        let mut target = rng.random::<f64>() * total;
        for (k, item) in self.items.iter().enumerate() {
            if target < item.weight {
                return k;
            }
            target -= item.weight;
        }
        self.items.len() - 1
    }
}

/// Largest `Pr[(u,v) not in P] * r / d(u,v)` over ordered pairs with
/// `0 < d(u,v) < inf`; zero when no such pair exists.
pub fn lipschitz_constant(support: &WeightedSupport, m: &DistanceMatrix, r: f64) -> f64 {
    m.off_diagonal()
        .filter_map(|(u, v)| {
            let d = m.get(u, v);
            (d > 0.0 && d.is_finite()).then(|| support.removal_probability(u, v) * r / d)
        })
        .fold(0.0, f64::max)
}
