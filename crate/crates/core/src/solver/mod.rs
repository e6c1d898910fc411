//! The embedded exact solver: simplex relaxations under branch and bound,
//! plus an independent feasibility auditor for finished solutions.

mod branch_bound;
mod heuristic;
mod simplex;

pub use branch_bound::{
    solve_lp, solve_milp, MipResult, MipStatus, NodeLogRow, SolveError, SolverConfig, INT_TOL,
};
pub use simplex::{LpSolution, LpStatus, COST_TOL, FEAS_TOL};

use crate::model::{MilpModel, Sense, VarKind};

/// One discrepancy found by [`check_solution`].
#[derive(Debug, Clone, PartialEq)]
pub enum CheckViolation {
    /// Row `row` is off by `amount` beyond the tolerance.
    Row { row: usize, name: String, amount: f64 },
    /// Column below its lower bound by `amount`.
    LowerBound { col: usize, name: String, amount: f64 },
    /// Column above its upper bound by `amount`.
    UpperBound { col: usize, name: String, amount: f64 },
    /// Integer column away from the nearest integer by `amount`.
    Integrality { col: usize, name: String, amount: f64 },
}

impl std::fmt::Display for CheckViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckViolation::Row { row, name, amount } => {
                write!(f, "row {row} ({name}) violated by {amount:.3e}")
            }
            CheckViolation::LowerBound { col, name, amount } => {
                write!(f, "column {col} ({name}) below lower bound by {amount:.3e}")
            }
            CheckViolation::UpperBound { col, name, amount } => {
                write!(f, "column {col} ({name}) above upper bound by {amount:.3e}")
            }
            CheckViolation::Integrality { col, name, amount } => {
                write!(f, "column {col} ({name}) breaks integrality by {amount:.3e}")
            }
        }
    }
}

/// Audit a solution vector against every row, bound, and integrality
/// requirement of the model. Returns every violation beyond `tol`; an empty
/// result certifies feasibility independently of the solver's own state.
pub fn check_solution(model: &MilpModel, values: &[f64], tol: f64) -> Vec<CheckViolation> {
    let mut out = Vec::new();
    if values.len() != model.columns.len() {
        // Dimensions disagree: report it as a violation of every missing
        // column rather than panicking in an auditing routine.
        out.push(CheckViolation::Row {
            row: usize::MAX,
            name: format!(
                "vector length {} != column count {}",
                values.len(),
                model.columns.len()
            ),
            amount: f64::INFINITY,
        });
        return out;
    }
    for (col, column) in model.columns.iter().enumerate() {
        let v = values[col];
        if v < column.lower - tol {
            out.push(CheckViolation::LowerBound {
                col,
                name: column.name.clone(),
                amount: column.lower - v,
            });
        }
        if v > column.upper + tol {
            out.push(CheckViolation::UpperBound {
                col,
                name: column.name.clone(),
                amount: v - column.upper,
            });
        }
        if column.kind != VarKind::Continuous {
            let frac = (v - v.round()).abs();
            if frac > tol {
                out.push(CheckViolation::Integrality {
                    col,
                    name: column.name.clone(),
                    amount: frac,
                });
            }
        }
    }
    for (r, row) in model.rows.iter().enumerate() {
        let lhs: f64 = row.terms.iter().map(|&(c, a)| a * values[c]).sum();
        let violation = match row.sense {
            Sense::Le => lhs - row.rhs,
            Sense::Ge => row.rhs - lhs,
            Sense::Eq => (lhs - row.rhs).abs(),
        };
        if violation > tol {
            out.push(CheckViolation::Row {
                row: r,
                name: row.name.clone(),
                amount: violation,
            });
        }
    }
    out
}
