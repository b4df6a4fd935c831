//! Adapter boundary between the moment programs and concrete LP solvers.
//!
//! A backend receives the program in the builder's native shape — sparse
//! rows over nonnegative variables plus a linear objective — and reports a
//! status, the optimum, and the primal solution.  Everything downstream
//! (bound extraction, certificates, feasibility replay) works off this
//! interface, so swapping solvers cannot change problem semantics.

use std::fmt;

use crate::error::{Error, Result};
use crate::lp::{LinExpr, LpRow, Sense};

/// Environment variable selecting the default backend (`clarabel` or
/// `simplex`).
pub const SOLVER_ENV_VAR: &str = "MOMENTLP_SOLVER";

/// A moment LP in solver-facing form.
///
/// All variables carry the implicit bound `x >= 0` (scaled moments are
/// nonnegative); backends must enforce it natively or via added rows.
#[derive(Debug, Clone, Copy)]
pub struct SolverProblem<'a> {
    pub var_count: usize,
    pub equalities: &'a [LpRow],
    pub inequalities: &'a [LpRow],
    pub objective: &'a LinExpr,
    pub sense: Sense,
}

impl SolverProblem<'_> {
    pub fn row_count(&self) -> usize {
        self.equalities.len() + self.inequalities.len()
    }
}

/// Terminal status of a single solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::NumericalFailure => "numerical-failure",
        };
        f.write_str(name)
    }
}

/// Outcome of one solve: status, optimum in the *requested* sense, and the
/// primal point when one is available.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub solution: Option<Vec<f64>>,
    /// Backend condition notes (iteration counts, residuals, failure detail).
    pub diagnostics: String,
}

impl SolveOutcome {
    pub fn failure(diagnostics: impl Into<String>) -> Self {
        SolveOutcome {
            status: SolveStatus::NumericalFailure,
            objective: None,
            solution: None,
            diagnostics: diagnostics.into(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// A concrete LP backend.
///
/// Implementations must be usable from multiple threads: `solve` takes
/// `&self` and per-solve state lives on the stack.
pub trait LpSolver: Send + Sync {
    fn name(&self) -> &'static str;

    fn solve(&self, problem: &SolverProblem<'_>) -> Result<SolveOutcome>;
}

/// Construct a backend by name; the empty string means the default
/// interior-point backend.
pub fn solver_by_name(name: &str) -> Result<Box<dyn LpSolver>> {
    match name.trim() {
        "" | "clarabel" => Ok(Box::new(crate::lp::ClarabelSolver::new())),
        "simplex" => Ok(Box::new(crate::lp::DenseSimplex::new())),
        other => Err(Error::config(format!(
            "unknown solver '{other}' (expected 'clarabel' or 'simplex')"
        ))),
    }
}

/// Construct the backend named by `MOMENTLP_SOLVER`, defaulting to the
/// interior-point backend when the variable is unset or empty.
pub fn default_solver() -> Result<Box<dyn LpSolver>> {
    let choice = std::env::var(SOLVER_ENV_VAR).unwrap_or_default();
    solver_by_name(&choice).map_err(|e| {
        Error::config(format!("${SOLVER_ENV_VAR}: {e}"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_display_names() {
        assert_eq!(SolveStatus::Optimal.to_string(), "optimal");
        assert_eq!(SolveStatus::NumericalFailure.to_string(), "numerical-failure");
    }

    #[test]
    fn default_solver_is_available() {
        // Ignores the environment on purpose: the test asserts only that some
        // backend can be constructed when the variable is unset or sane.
        let solver = default_solver();
        if let Ok(s) = solver {
            assert!(!s.name().is_empty());
        }
    }
}
