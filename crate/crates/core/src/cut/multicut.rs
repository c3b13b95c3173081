use super::instance::{sparsity_of, CutInstance, CutResult};
use super::sparsest::{solve_sparsest_cut, CutOptions};
use super::CutError;

/// One round of the reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct MulticutIteration {
    /// Original indices of the pairs still to be separated.
    pub remaining: Vec<usize>,
    /// Original indices of the pairs this round's cut separates.
    pub separated: Vec<usize>,
    pub edges: Vec<usize>,
    pub capacity: f64,
    /// Sparsity under unit demands on `remaining`.
    pub sparsity: f64,
    pub lp_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MulticutReport {
    /// The union of all rounds' cuts, evaluated on the input instance.
    pub cut: CutResult,
    pub iterations: Vec<MulticutIteration>,
}

impl MulticutReport {
    /// `sum_i c(J_i)`, an upper bound on the union's capacity.
    pub fn iteration_capacity(&self) -> f64 {
        self.iterations.iter().map(|it| it.capacity).sum()
    }

    /// `sum_i |S_i| / |T'_i|`, at most the harmonic number of the pair count.
    pub fn harmonic_weight(&self) -> f64 {
        self.iterations.iter().map(|it| it.separated.len() as f64 / it.remaining.len() as f64).sum()
    }
}

/// `1 + 1/2 + ... + 1/k`.
pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

/// Repeatedly cut the remaining pairs with unit demands and drop the pairs
/// each cut separates, until none remain.
pub fn solve_multicut(inst: &CutInstance, opts: &CutOptions) -> Result<MulticutReport, CutError> {
    let mut remaining: Vec<usize> = (0..inst.pairs().len()).collect();
    let mut iterations = Vec::new();
    let mut union: Vec<usize> = Vec::new();
    while !remaining.is_empty() {
        let sub = inst.with_unit_demands(&remaining)?;
        let report = solve_sparsest_cut(&sub, opts)?;
        let separated: Vec<usize> = report.cut.separated.iter().map(|&k| remaining[k]).collect();
        if separated.is_empty() {
            return Err(CutError::NonProgress { iteration: iterations.len() });
        }
        union.extend_from_slice(&report.cut.edges);
        iterations.push(MulticutIteration {
            remaining: remaining.clone(),
            separated: separated.clone(),
            edges: report.cut.edges.clone(),
            capacity: report.cut.capacity,
            sparsity: report.cut.sparsity,
            lp_value: report.lp_value,
        });
        remaining.retain(|i| !separated.contains(i));
    }
    let cut = sparsity_of(inst, &union);
    if cut.separated.len() != inst.pairs().len() {
        return Err(CutError::NotAMulticut);
    }
    Ok(MulticutReport { cut, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::TerminalPair;
    use crate::graph::{Edge, WeightedDigraph};

    #[test]
    fn two_disjoint_demand_edges() {
        let g = WeightedDigraph::new(4, vec![Edge::new(0, 1, 1.0), Edge::new(2, 3, 1.0)]).unwrap();
        let inst = CutInstance::new(g, vec![TerminalPair::new(0, 1, 1.0), TerminalPair::new(2, 3, 1.0)]).unwrap();
        let report = solve_multicut(&inst, &CutOptions::default()).unwrap();
        assert_eq!(report.cut.capacity, 2.0);
        assert_eq!(report.cut.separated, vec![0, 1]);
        assert!(report.harmonic_weight() <= harmonic(2) + 1e-12);
    }

    #[test]
    fn single_pair_matches_sparsest_cut() {
        let g = WeightedDigraph::bidirected(3, &[(0, 1, 2.0), (1, 2, 1.0)]).unwrap();
        let inst = CutInstance::new(g, vec![TerminalPair::new(0, 2, 1.0)]).unwrap();
        let mc = solve_multicut(&inst, &CutOptions::default()).unwrap();
        let sc = solve_sparsest_cut(&inst, &CutOptions::default()).unwrap();
        assert_eq!(mc.iterations.len(), 1);
        assert_eq!(mc.cut.edges, sc.cut.edges);
    }

    #[test]
    fn harmonic_numbers() {
        assert_eq!(harmonic(0), 0.0);
        assert_eq!(harmonic(1), 1.0);
        assert!((harmonic(3) - 11.0 / 6.0).abs() < 1e-15);
    }
}
