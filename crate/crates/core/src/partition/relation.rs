use std::fmt;

use fixedbitset::FixedBitSet;

use crate::metric::DistanceMatrix;

/// A binary relation on `0..n`, stored as one bit row per element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    rows: Vec<FixedBitSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Self { rows: vec![FixedBitSet::with_capacity(n); n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut rel = Self::empty(n);
        for x in 0..n {
            rel.insert(x, x);
        }
        rel
    }

    pub fn full(n: usize) -> Self {
        let mut rows = vec![FixedBitSet::with_capacity(n); n];
        for row in &mut rows {
            row.insert_range(..);
        }
        Self { rows }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut rel = Self::empty(n);
        for (u, v) in pairs {
            rel.insert(u, v);
        }
        rel
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut rel = Self::empty(n);
        for u in 0..n {
            for v in 0..n {
                if f(u, v) {
                    rel.insert(u, v);
                }
            }
        }
        rel
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn insert(&mut self, u: usize, v: usize) {
        self.rows[u].insert(v);
    }

    pub fn remove(&mut self, u: usize, v: usize) {
        self.rows[u].set(v, false);
    }

    /// Related pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(u, row)| row.ones().map(move |v| (u, v)))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_clear())
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size()).all(|x| self.contains(x, x))
    }

    pub fn is_transitive(&self) -> bool {
        // (u,v) and (v,w) related implies row(v) ⊆ row(u)
        self.pairs().all(|(u, v)| self.rows[v].is_subset(&self.rows[u]))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// A reflexive, transitive relation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quasipartition(Relation);

impl Quasipartition {
    pub fn identity(n: usize) -> Self {
        Self(Relation::identity(n))
    }

    pub fn full(n: usize) -> Self {
        Self(Relation::full(n))
    }

    /// Accepts `rel` as-is if it is already reflexive and transitive.
    pub fn try_from_relation(rel: Relation) -> Result<Self, Relation> {
        if rel.is_reflexive() && rel.is_transitive() {
            Ok(Self(rel))
        } else {
            Err(rel)
        }
    }

    pub fn relation(&self) -> &Relation {
        &self.0
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.0.size()
    }

    #[inline]
    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.0.contains(u, v)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.pairs()
    }

    /// Related pairs with `u != v`.
    pub fn proper_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.pairs().filter(|(u, v)| u != v)
    }

    /// The 0-1 quasimetric: 0 on related pairs, 1 elsewhere.
    pub fn zero_one_metric(&self) -> DistanceMatrix {
        DistanceMatrix::from_fn(self.size(), |u, v| if self.contains(u, v) { 0.0 } else { 1.0 })
            .expect("0-1 values are valid distances")
    }
}

impl fmt::Debug for Quasipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Quasipartition").field(&self.0).finish()
    }
}

/// Smallest reflexive transitive relation containing `rel` (Warshall on bit rows).
pub fn transitive_closure(rel: &Relation) -> Quasipartition {
    let n = rel.size();
    let mut rows = rel.rows.clone();
    for (x, row) in rows.iter_mut().enumerate() {
        row.insert(x);
    }
    for k in 0..n {
        let row_k = rows[k].clone();
        for row in rows.iter_mut() {
            if row.contains(k) {
                row.union_with(&row_k);
            }
        }
    }
    Quasipartition(Relation { rows })
}

/// True iff every related pair is at distance at most `r` under `m`.
pub fn is_r_bounded(p: &Quasipartition, m: &DistanceMatrix, r: f64) -> bool {
    assert_eq!(p.size(), m.size(), "quasipartition and metric sizes differ");
    p.pairs().all(|(u, v)| m.get(u, v) <= r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_adds_chain_and_loops() {
        let p = transitive_closure(&Relation::from_pairs(3, [(0, 1), (1, 2)]));
        let expected = Relation::from_pairs(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)]);
        assert_eq!(p.relation(), &expected);
    }

    #[test]
    fn closure_is_fixpoint_on_transitive_input() {
        let rel = Relation::from_pairs(3, [(0, 0), (1, 1), (2, 2), (0, 1)]);
        assert_eq!(transitive_closure(&rel).relation(), &rel);
        let without_loops = Relation::from_pairs(3, [(0, 1)]);
        assert_eq!(transitive_closure(&without_loops).relation(), &rel);
    }

    #[test]
    fn identity_is_r_bounded_for_any_r() {
        let m = DistanceMatrix::from_rows(&[vec![0.0, 5.0], vec![1.0, 0.0]]).unwrap();
        assert!(is_r_bounded(&Quasipartition::identity(2), &m, 1e-9));
        assert!(!is_r_bounded(&Quasipartition::full(2), &m, 4.0));
        assert!(is_r_bounded(&Quasipartition::full(2), &m, 5.0));
    }

    #[test]
    fn try_from_relation_checks_axioms() {
        assert!(Quasipartition::try_from_relation(Relation::from_pairs(2, [(0, 1)])).is_err());
        let chain = Relation::from_pairs(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)]);
        assert!(Quasipartition::try_from_relation(chain).is_err());
        assert!(Quasipartition::try_from_relation(Relation::full(3)).is_ok());
    }

    #[test]
    fn zero_one_metric_is_quasimetric() {
        let p = transitive_closure(&Relation::from_pairs(4, [(0, 1), (1, 2), (3, 2)]));
        let m = p.zero_one_metric();
        assert!(crate::metric::validate_quasimetric(&m).is_ok());
        assert_eq!(m.get(0, 2), 0.0);
        assert_eq!(m.get(2, 0), 1.0);
    }
}
