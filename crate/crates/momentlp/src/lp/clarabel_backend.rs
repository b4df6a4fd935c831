//! Interior-point backend.
//!
//! Maps the moment program onto a conic form `Ax + s = b, s ∈ K`: equality
//! rows land in the zero cone, inequality rows (as `≤`) and the variable
//! bounds `x ≥ 0` in the nonnegative cone.  The production default — the
//! dense simplex remains available for cross-checks via `MOMENTLP_SOLVER`.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use crate::error::{Error, Result};
use crate::lp::solver::{LpSolver, SolveOutcome, SolveStatus, SolverProblem};
use crate::lp::{RowOp, Sense};

/// Interior-point LP backend.
#[derive(Debug, Clone, Default)]
pub struct ClarabelSolver {
    _private: (),
}

impl ClarabelSolver {
    pub fn new() -> Self {
        ClarabelSolver::default()
    }
}

impl LpSolver for ClarabelSolver {
    fn name(&self) -> &'static str {
        "clarabel"
    }

    fn solve(&self, problem: &SolverProblem<'_>) -> Result<SolveOutcome> {
        let n = problem.var_count;

        // Rows in cone order: equalities first (zero cone), then all
        // inequalities rewritten as `a·x ≤ rhs`, then `-x ≤ 0` bounds.
        let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
        let mut rhs: Vec<f64> = Vec::new();
        let push_row = |triplets: &mut Vec<(usize, usize, f64)>,
                            rhs: &mut Vec<f64>,
                            terms: &[(usize, f64)],
                            flip: bool,
                            b: f64|
         -> Result<()> {
            let r = rhs.len();
            for &(var, c) in terms {
                if var >= n {
                    return Err(Error::Dimension(format!(
                        "row {r} references variable {var} but the problem has {n}"
                    )));
                }
                triplets.push((r, var, if flip { -c } else { c }));
            }
            rhs.push(if flip { -b } else { b });
            Ok(())
        };

        for row in problem.equalities {
            push_row(&mut triplets, &mut rhs, row.expr.terms(), false, row.rhs)?;
        }
        let n_eq = rhs.len();
        for row in problem.inequalities {
            match row.op {
                RowOp::Le => {
                    push_row(&mut triplets, &mut rhs, row.expr.terms(), false, row.rhs)?
                }
                RowOp::Ge => {
                    push_row(&mut triplets, &mut rhs, row.expr.terms(), true, row.rhs)?
                }
                RowOp::Eq => {
                    return Err(Error::config(format!(
                        "equality row '{}' passed in the inequality block",
                        row.label
                    )))
                }
            }
        }
        for var in 0..n {
            let r = rhs.len();
            triplets.push((r, var, -1.0));
            rhs.push(0.0);
        }
        let m = rhs.len();
        let n_ineq = m - n_eq;

        let a = csc_from_triplets(m, n, &mut triplets);
        let p = CscMatrix::zeros((n, n));
        let mut q = vec![0.0; n];
        for &(var, c) in problem.objective.terms() {
            q[var] += match problem.sense {
                Sense::Min => c,
                Sense::Max => -c,
            };
        }

        let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
        if n_eq > 0 {
            cones.push(SupportedConeT::ZeroConeT(n_eq));
        }
        if n_ineq > 0 {
            cones.push(SupportedConeT::NonnegativeConeT(n_ineq));
        }

        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            .tol_gap_abs(1e-12)
            .tol_gap_rel(1e-12)
            .tol_feas(1e-12)
            .build()
            .map_err(|e| Error::Solver(format!("settings rejected: {e:?}")))?;

        let mut solver = DefaultSolver::new(&p, &q, &a, &rhs, &cones, settings)
            .map_err(|e| Error::Solver(format!("problem rejected: {e:?}")))?;
        solver.solve();

        let solution = &solver.solution;
        let signed = |v: f64| match problem.sense {
            Sense::Min => v,
            Sense::Max => -v,
        };
        let diagnostics = format!(
            "status {:?}, {} iterations",
            solution.status, solution.iterations
        );
        let outcome = match solution.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => SolveOutcome {
                status: SolveStatus::Optimal,
                objective: Some(signed(solution.obj_val)),
                solution: Some(solution.x.clone()),
                diagnostics,
            },
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                SolveOutcome {
                    status: SolveStatus::Infeasible,
                    objective: None,
                    solution: None,
                    diagnostics,
                }
            }
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => SolveOutcome {
                status: SolveStatus::Unbounded,
                objective: None,
                solution: None,
                diagnostics,
            },
            _ => SolveOutcome::failure(diagnostics),
        };
        Ok(outcome)
    }
}

/// Assemble a compressed sparse column matrix from (row, col, value)
/// triplets, summing duplicates.
fn csc_from_triplets(m: usize, n: usize, triplets: &mut [(usize, usize, f64)]) -> CscMatrix<f64> {
    triplets.sort_unstable_by_key(|&(r, c, _)| (c, r));
    let mut colptr = vec![0usize; n + 1];
    let mut rowval: Vec<usize> = Vec::with_capacity(triplets.len());
    let mut nzval: Vec<f64> = Vec::with_capacity(triplets.len());
    let mut tail: Option<(usize, usize)> = None;
    for &(r, c, v) in triplets.iter() {
        if tail == Some((c, r)) {
            *nzval.last_mut().expect("tail implies an entry") += v;
        } else {
            rowval.push(r);
            nzval.push(v);
            tail = Some((c, r));
        }
        colptr[c + 1] = rowval.len();
    }
    // Columns without entries still hold 0; carry the running offset across.
    for c in 0..n {
        if colptr[c + 1] < colptr[c] {
            colptr[c + 1] = colptr[c];
        }
    }
    CscMatrix::new(m, n, colptr, rowval, nzval)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LinExpr, LpRow};

    #[test]
    fn csc_assembly_matches_dense() {
        let mut t = vec![
            (0usize, 0usize, 1.0),
            (1, 0, 2.0),
            (0, 2, 3.0),
            (2, 2, 4.0),
            (2, 2, 0.5),
        ];
        let a = csc_from_triplets(3, 3, &mut t);
        assert_eq!(a.colptr, vec![0, 2, 2, 4]);
        assert_eq!(a.rowval, vec![0, 1, 0, 2]);
        assert_eq!(a.nzval, vec![1.0, 2.0, 3.0, 4.5]);
    }

    #[test]
    fn solves_small_program() {
        // max x + 2y s.t. x + y <= 4, y <= 3 -> 7 at (1, 3).
        let ineqs = vec![
            LpRow::new(
                {
                    let mut e = LinExpr::new();
                    e.add_term(0, 1.0);
                    e.add_term(1, 1.0);
                    e
                },
                RowOp::Le,
                4.0,
                "r0",
            ),
            LpRow::new(LinExpr::single(1, 1.0), RowOp::Le, 3.0, "r1"),
        ];
        let mut obj = LinExpr::new();
        obj.add_term(0, 1.0);
        obj.add_term(1, 2.0);
        let problem = SolverProblem {
            var_count: 2,
            equalities: &[],
            inequalities: &ineqs,
            objective: &obj,
            sense: Sense::Max,
        };
        let out = ClarabelSolver::new().solve(&problem).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert!((out.objective.unwrap() - 7.0).abs() < 1e-6);
        let x = out.solution.unwrap();
        assert!((x[0] - 1.0).abs() < 1e-5 && (x[1] - 3.0).abs() < 1e-5);
    }

    #[test]
    fn detects_infeasibility() {
        let eqs = vec![
            LpRow::new(LinExpr::single(0, 1.0), RowOp::Eq, 1.0, "a"),
            LpRow::new(LinExpr::single(0, 1.0), RowOp::Eq, 2.0, "b"),
        ];
        let obj = LinExpr::single(0, 1.0);
        let problem = SolverProblem {
            var_count: 1,
            equalities: &eqs,
            inequalities: &[],
            objective: &obj,
            sense: Sense::Min,
        };
        let out = ClarabelSolver::new().solve(&problem).unwrap();
        assert_eq!(out.status, SolveStatus::Infeasible);
    }
}
