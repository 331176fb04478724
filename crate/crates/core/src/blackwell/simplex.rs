use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// `A x = b, x >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityProblem {
    num_vars: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl FeasibilityProblem {
    pub fn new(num_vars: usize, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        if rows.len() != rhs.len() {
            return Err(Error::InvalidParam(format!(
                "{} constraint rows but {} right-hand sides",
                rows.len(),
                rhs.len()
            )));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != num_vars) {
            return Err(Error::InvalidParam(format!("row {i} does not have {num_vars} coefficients")));
        }
        if rows.iter().flatten().chain(&rhs).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParam("non-finite coefficient".into()));
        }
        Ok(FeasibilityProblem { num_vars, rows, rhs })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    /// `max_i |A_i x - b_i|`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| (row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Feasibility {
    Feasible(Vec<f64>),
    /// Certified: the phase-1 optimum is at least [`tol::FEAS_REJECT`].
    Infeasible { phase_one_optimum: f64 },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

const PIVOT_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;

/// Phase-1 simplex on a dense tableau with Bland's rule.
///
/// One artificial variable per row; the phase-1 objective is their sum.
/// Residuals at or below [`tol::FEAS_ACCEPT`] are feasible, optima at or
/// above [`tol::FEAS_REJECT`] are infeasible, and anything in between is a
/// [`Error::NumericalFailure`].
pub fn solve_feasibility(problem: &FeasibilityProblem) -> Result<Feasibility> {
    let m = problem.rows.len();
    let n = problem.num_vars;
    if m == 0 {
        return Ok(Feasibility::Feasible(vec![0.0; n]));
    }
    let width = n + m + 1;
    let mut tableau = vec![vec![0.0; width]; m];
    for (i, (row, &b)) in problem.rows.iter().zip(&problem.rhs).enumerate() {
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        for (j, &a) in row.iter().enumerate() {
            tableau[i][j] = sign * a;
        }
        tableau[i][n + i] = 1.0;
        tableau[i][width - 1] = sign * b;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced costs of the phase-1 objective; the last entry is -objective.
    let mut cost = vec![0.0; width];
    for row in &tableau {
        for j in 0..n {
            cost[j] -= row[j];
        }
        cost[width - 1] -= row[width - 1];
    }

    let mut pivots = 0;
    while let Some(enter) = (0..n + m).find(|&j| cost[j] < -PIVOT_EPS) {
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for (i, row) in tableau.iter().enumerate() {
            let a = row[enter];
            if a > PIVOT_EPS {
                let ratio = row[width - 1] / a;
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[l]),
                };
                if better {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        // Phase 1 is bounded below by zero, so an entering column always has a
        // positive entry unless rounding has corrupted the tableau.
        let Some(leave) = leave else {
            return Err(Error::NumericalFailure("unbounded phase-1 direction".into()));
        };
        pivot(&mut tableau, &mut cost, leave, enter);
        basis[leave] = enter;
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::NumericalFailure(format!("no convergence after {MAX_PIVOTS} pivots")));
        }
    }

    let optimum = -cost[width - 1];
    let mut x = vec![0.0; n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = tableau[i][width - 1].max(0.0);
        }
    }
    let residual = problem.residual(&x);
    if residual <= tol::FEAS_ACCEPT {
        Ok(Feasibility::Feasible(x))
    } else if optimum >= tol::FEAS_REJECT {
        Ok(Feasibility::Infeasible {
            phase_one_optimum: optimum,
        })
    } else {
        Err(Error::NumericalFailure(format!(
            "phase-1 optimum {optimum:e} with residual {residual:e} is in the undecided band"
        )))
    }
}

fn pivot(tableau: &mut [Vec<f64>], cost: &mut [f64], leave: usize, enter: usize) {
    let p = tableau[leave][enter];
    for v in tableau[leave].iter_mut() {
        *v /= p;
    }
    tableau[leave][enter] = 1.0;
    let pivot_row = tableau[leave].clone();
    for (i, row) in tableau.iter_mut().enumerate() {
        if i == leave {
            continue;
        }
        let factor = row[enter];
        if factor != 0.0 {
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            row[enter] = 0.0;
        }
    }
    let factor = cost[enter];
    if factor != 0.0 {
        for (v, pv) in cost.iter_mut().zip(&pivot_row) {
            *v -= factor * pv;
        }
        cost[enter] = 0.0;
    }
}
