//! Assembly and solution of the moment linear programs.
//!
//! Variables are *scaled* moments of each measure piece on unit boxes (see
//! [`vars`]); equality rows encode the adjoint identity between exit and
//! occupation moments; inequality rows are Hausdorff moment conditions plus
//! explicit box and mass-bound rows.  Solving the same program with both
//! senses brackets the true price.

pub mod adjoint;
pub mod build;
pub mod certificates;
pub mod clarabel_backend;
pub mod hausdorff;
pub mod mps;
pub mod simplex;
pub mod solver;
pub mod vars;

pub use adjoint::{adjoint_rows, AdjointSystem};
pub use build::{build_lp, build_lp_pair, solve_bounds, BoundsResult, MomentLP};
pub use certificates::{
    localizing_matrix_1d, moment_matrix_1d, moment_matrix_2d, psd_certificate,
};
pub use clarabel_backend::ClarabelSolver;
pub use hausdorff::{hausdorff_rows_1d, hausdorff_rows_2d};
pub use simplex::DenseSimplex;
pub use solver::{default_solver, solver_by_name, LpSolver, SolveOutcome, SolveStatus};
pub use vars::VarRegistry;

/// Sparse linear expression over the global LP variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    terms: Vec<(usize, f64)>,
}

impl LinExpr {
    pub fn new() -> Self {
        LinExpr::default()
    }

    pub fn single(var: usize, coeff: f64) -> Self {
        LinExpr {
            terms: vec![(var, coeff)],
        }
    }

    pub fn add_term(&mut self, var: usize, coeff: f64) {
        if coeff != 0.0 {
            self.terms.push((var, coeff));
        }
    }

    pub fn add_expr(&mut self, other: &LinExpr, weight: f64) {
        if weight == 0.0 {
            return;
        }
        for &(v, c) in &other.terms {
            self.add_term(v, weight * c);
        }
    }

    /// Merge duplicate variables and drop exact zeros.
    pub fn compact(&mut self) {
        self.terms.sort_unstable_by_key(|&(v, _)| v);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(self.terms.len());
        for &(v, c) in &self.terms {
            match out.last_mut() {
                Some((lv, lc)) if *lv == v => *lc += c,
                _ => out.push((v, c)),
            }
        }
        out.retain(|&(_, c)| c != 0.0);
        self.terms = out;
    }

    pub fn terms(&self) -> &[(usize, f64)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, &(_, c)| m.max(c.abs()))
    }

    pub fn scale(&mut self, factor: f64) {
        for (_, c) in &mut self.terms {
            *c *= factor;
        }
    }

    /// Evaluate on a full assignment of the variables.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * x[v]).sum()
    }
}

/// Relational operator of an LP row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowOp {
    Eq,
    Le,
    Ge,
}

/// One LP constraint `expr (op) rhs` with a human-readable label.
#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub expr: LinExpr,
    pub op: RowOp,
    pub rhs: f64,
    pub label: String,
}

impl LpRow {
    pub fn new(expr: LinExpr, op: RowOp, rhs: f64, label: impl Into<String>) -> Self {
        LpRow {
            expr,
            op,
            rhs,
            label: label.into(),
        }
    }

    /// Scale the row (both sides) so its largest coefficient has magnitude 1.
    pub fn normalize(&mut self) {
        let max = self.expr.max_abs_coeff().max(self.rhs.abs());
        if max > 0.0 {
            let inv = 1.0 / max;
            self.expr.scale(inv);
            self.rhs *= inv;
        }
    }

    /// Signed violation of the row on an assignment: positive means violated
    /// by that amount (equalities report the absolute residual).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let v = self.expr.eval(x);
        match self.op {
            RowOp::Eq => (v - self.rhs).abs(),
            RowOp::Le => v - self.rhs,
            RowOp::Ge => self.rhs - v,
        }
    }
}

/// Optimization sense of one LP of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}
