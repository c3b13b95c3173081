//! Dense two-phase primal simplex with Bland's rule.

use thiserror::Error;

pub const MAX_ITERATIONS: usize = 100_000;
/// Allowed constraint violation of a returned assignment, relative to the row scale.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// Sparse `(variable, coefficient)` terms.
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `min objective . x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self { objective: vec![0.0; num_vars], constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint { terms, sense, rhs });
    }

    fn validate(&self) -> Result<(), LpError> {
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Invalid("non-finite objective coefficient".into()));
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(LpError::Invalid(format!("row {i}: non-finite right-hand side")));
            }
            for &(j, a) in &row.terms {
                if j >= self.num_vars() {
                    return Err(LpError::Invalid(format!("row {i}: variable {j} out of range")));
                }
                if !a.is_finite() {
                    return Err(LpError::Invalid(format!("row {i}: non-finite coefficient")));
                }
            }
        }
        Ok(())
    }

    /// Largest violation of any constraint by `x`, each row scaled by its magnitude.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|row| {
                let lhs: f64 = row.terms.iter().map(|&(j, a)| a * x[j]).sum();
                let scale =
                    1.0f64.max(row.rhs.abs()).max(row.terms.iter().map(|&(j, a)| (a * x[j]).abs()).fold(0.0, f64::max));
                let gap = match row.sense {
                    Sense::Le => lhs - row.rhs,
                    Sense::Ge => row.rhs - lhs,
                    Sense::Eq => (lhs - row.rhs).abs(),
                };
                gap.max(0.0) / scale
            })
            .chain(x.iter().map(|&v| (-v).max(0.0)))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("no optimum after {0} pivots")]
    CycleSuspected(usize),
    #[error("malformed linear program: {0}")]
    Invalid(String),
    #[error("solution violates a constraint by {0:e}")]
    Numerical(f64),
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let nv = lp.num_vars();
    let m = lp.constraints.len();

    // Column layout: originals, then one slack/surplus per inequality, then artificials.
    let rows: Vec<Constraint> = lp
        .constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let flipped = match c.sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
                Constraint { terms: c.terms.iter().map(|&(j, a)| (j, -a)).collect(), sense: flipped, rhs: -c.rhs }
            } else {
                c.clone()
            }
        })
        .collect();
    let n_slack = rows.iter().filter(|r| r.sense != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.sense != Sense::Le).count();
    let first_art = nv + n_slack;
    let width = first_art + n_art;
    let rhs_col = width;

    let mut tab = vec![vec![0.0; width + 1]; m];
    let mut basis = vec![0usize; m];
    let mut next_slack = nv;
    let mut next_art = first_art;
    for (i, Constraint { terms, sense, rhs }) in rows.into_iter().enumerate() {
        for (j, a) in terms {
            tab[i][j] += a;
        }
        tab[i][rhs_col] = rhs;
        match sense {
            Sense::Le => {
                tab[i][next_slack] = 1.0;
                basis[i] = next_slack;
                next_slack += 1;
            }
            Sense::Ge => {
                tab[i][next_slack] = -1.0;
                next_slack += 1;
                tab[i][next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            }
            Sense::Eq => {
                tab[i][next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            }
        }
    }

    let coef_max = lp
        .objective
        .iter()
        .map(|c| c.abs())
        .chain(lp.constraints.iter().flat_map(|c| c.terms.iter().map(|t| t.1.abs())))
        .fold(1.0, f64::max);
    let rhs_max = tab.iter().map(|r| r[rhs_col].abs()).fold(1.0, f64::max);
    let mut iterations = 0;

    if n_art > 0 {
        let mut cost = vec![0.0; width];
        cost[first_art..].fill(1.0);
        let mut reduced = reduced_costs(&tab, &basis, &cost);
        simplex(&mut tab, &mut basis, &mut reduced, width, 1e-9, &mut iterations)?;
        if -reduced[rhs_col] > FEASIBILITY_TOL * rhs_max {
            return Err(LpError::Infeasible);
        }
        // Drive remaining artificials out of the basis; rows that cannot be
        // pivoted are redundant and keep their artificial at zero.
        for i in 0..m {
            if basis[i] >= first_art {
                if let Some(j) = (0..first_art).find(|&j| tab[i][j].abs() > 1e-9) {
                    pivot(&mut tab, &mut reduced, i, j);
                    basis[i] = j;
                }
            }
        }
    }

    let mut cost = vec![0.0; width];
    cost[..nv].copy_from_slice(&lp.objective);
    let mut reduced = reduced_costs(&tab, &basis, &cost);
    simplex(&mut tab, &mut basis, &mut reduced, first_art, 1e-9 * coef_max, &mut iterations)?;

    let mut x = vec![0.0; nv];
    for (i, &b) in basis.iter().enumerate() {
        if b < nv {
            x[b] = tab[i][rhs_col].max(0.0);
        }
    }
    let violation = lp.max_violation(&x);
    if violation > FEASIBILITY_TOL {
        return Err(LpError::Numerical(violation));
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { value, x, iterations })
}

/// `cost[j] - c_B . column j` for every column; the last entry holds `-objective`.
fn reduced_costs(tab: &[Vec<f64>], basis: &[usize], cost: &[f64]) -> Vec<f64> {
    let mut reduced = cost.to_vec();
    reduced.push(0.0);
    for (row, &b) in tab.iter().zip(basis) {
        let cb = cost[b];
        if cb != 0.0 {
            for (r, t) in reduced.iter_mut().zip(row) {
                *r -= cb * t;
            }
        }
    }
    reduced
}

/// Bland's-rule pivoting over columns `0..eligible` until no reduced cost is
/// below `-cost_tol`.
fn simplex(
    tab: &mut [Vec<f64>],
    basis: &mut [usize],
    reduced: &mut [f64],
    eligible: usize,
    cost_tol: f64,
    iterations: &mut usize,
) -> Result<(), LpError> {
    let rhs_col = reduced.len() - 1;
    let pivot_tol = 1e-11;
    loop {
        let Some(enter) = (0..eligible).find(|&j| reduced[j] < -cost_tol) else {
            return Ok(());
        };
        let mut leave: Option<(usize, f64)> = None;
        for (i, row) in tab.iter().enumerate() {
            let a = row[enter];
            if a > pivot_tol {
                let ratio = row[rhs_col].max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * best.abs().max(1.0);
                        if ratio < best && !tie || tie && basis[i] < basis[k] {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
        }
        let Some((row, _)) = leave else {
            return Err(LpError::Unbounded);
        };
        pivot(tab, reduced, row, enter);
        basis[row] = enter;
        *iterations += 1;
        if *iterations >= MAX_ITERATIONS {
            return Err(LpError::CycleSuspected(*iterations));
        }
    }
}

fn pivot(tab: &mut [Vec<f64>], reduced: &mut [f64], row: usize, col: usize) {
    let p = tab[row][col];
    for v in tab[row].iter_mut() {
        *v /= p;
    }
    tab[row][col] = 1.0;
    let pivot_row = tab[row].clone();
    let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&j| pivot_row[j] != 0.0).collect();
    for (i, r) in tab.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            for &j in &nonzero {
                r[j] -= f * pivot_row[j];
            }
            r[col] = 0.0;
        }
    }
    let f = reduced[col];
    if f != 0.0 {
        for &j in &nonzero {
            reduced[j] -= f * pivot_row[j];
        }
        reduced[col] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_lower_bound() {
        let mut lp = LinearProgram::new(1);
        lp.objective[0] = 1.0;
        lp.add(vec![(0, 1.0)], Sense::Ge, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn textbook_maximisation() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![-3.0, -5.0];
        lp.add(vec![(0, 1.0)], Sense::Le, 4.0);
        lp.add(vec![(1, 2.0)], Sense::Le, 12.0);
        lp.add(vec![(0, 3.0), (1, 2.0)], Sense::Le, 18.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value + 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // min x + y, x - y = -1, y <= 3 -> y = 1, x = 0
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add(vec![(0, 1.0), (1, -1.0)], Sense::Eq, -1.0);
        lp.add(vec![(1, 1.0)], Sense::Le, 3.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.objective[0] = 1.0;
        lp.add(vec![(0, 1.0)], Sense::Le, 1.0);
        lp.add(vec![(0, 1.0)], Sense::Ge, 2.0);
        assert_eq!(solve_lp(&lp), Err(LpError::Infeasible));
        let mut lp = LinearProgram::new(1);
        lp.objective[0] = -1.0;
        lp.add(vec![(0, 1.0)], Sense::Ge, 1.0);
        assert_eq!(solve_lp(&lp), Err(LpError::Unbounded));
    }

    #[test]
    fn malformed_programs_are_rejected() {
        let mut lp = LinearProgram::new(1);
        lp.add(vec![(3, 1.0)], Sense::Le, 1.0);
        assert!(matches!(solve_lp(&lp), Err(LpError::Invalid(_))));
        let mut lp = LinearProgram::new(1);
        lp.objective[0] = f64::NAN;
        assert!(matches!(solve_lp(&lp), Err(LpError::Invalid(_))));
    }
}
