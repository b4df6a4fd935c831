//! Dense two-phase primal simplex, applied to the dual program.
//!
//! The built-in fallback backend.  Moment programs are short and wide in
//! the wrong sense for a tableau method: hundreds of inequality rows, most
//! with zero right-hand side, over a few dozen variables.  A textbook
//! simplex on that shape stalls — nearly every vertex is degenerate and
//! phase 1 can wander for hundreds of thousands of pivots.  Dualizing
//! flips the shape: the basis dimension becomes the (small) variable
//! count and the right-hand side becomes the objective vector, which is
//! mostly nonzero, so the degeneracy largely disappears.  The primal
//! optimum is read back from the dual reduced costs.
//!
//! Two numerical safeguards on the tableau walk are load-bearing: after a
//! run of degenerate pivots the pivot selection switches to Bland's rule,
//! and the tableau is refactorized from the original data at a fixed
//! cadence and before any terminal verdict, so incremental-update error on
//! ill-conditioned bases cannot corrupt the walk or the reported optimum.
//! Intended for moderate programs and solver cross-checks; the
//! interior-point backend is the production default.

use crate::error::{Error, Result};
use crate::lp::solver::{LpSolver, SolveOutcome, SolveStatus, SolverProblem};
use crate::lp::{RowOp, Sense};

/// Reduced-cost / feasibility tolerance.
const TOL: f64 = 1e-9;
/// Minimum magnitude accepted as a pivot element.
const PIVOT_TOL: f64 = 1e-10;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const STALL_LIMIT: usize = 200;
/// Minimum iterations between refactorizations of the tableau from
/// original data; tall tableaus refactor once per basis dimension instead
/// so the dense solves stay amortized against the pivot work.
const REFRESH_INTERVAL: usize = 128;
/// Ruiz equilibration sweeps applied before building the tableau.
const RUIZ_PASSES: usize = 8;
/// Row-count ceiling for refactorization; above it the dense solve would
/// dominate the walk and the tableau relies on incremental updates alone.
const REFACTOR_MAX_ROWS: usize = 600;
/// Relative size of the anti-degeneracy perturbation of the dual
/// right-hand side.  It steers the walk past zero-step pivots only:
/// reduced costs — and with them the optimality test and the recovered
/// primal point — do not depend on the right-hand side.
const PERTURB_EPS: f64 = 1e-9;

/// Dense two-phase simplex backend.
#[derive(Debug, Clone, Default)]
pub struct DenseSimplex {
    _private: (),
}

impl DenseSimplex {
    pub fn new() -> Self {
        DenseSimplex::default()
    }
}

impl LpSolver for DenseSimplex {
    fn name(&self) -> &'static str {
        "simplex"
    }

    fn solve(&self, problem: &SolverProblem<'_>) -> Result<SolveOutcome> {
        let primal = MinProgram::from_problem(problem)?;
        let mut dual = primal.dual();
        let row_mul = dual.equilibrate();
        // Deterministic tiny relaxation of the dual constraints: variables
        // outside the objective give the dual a degenerate right-hand side
        // on which the walk can stall for ages.  The perturbation steers
        // the pivot path only; the matrix and the primal data stay exact,
        // and the reported optimum is re-priced with pristine costs.
        for (j, (_, _, rhs)) in dual.rows.iter_mut().enumerate() {
            let weight = ((j as f64) * 0.618_033_988_749_895).fract() + 0.5;
            *rhs += PERTURB_EPS * (1.0 + rhs.abs()) * weight;
        }
        let mut tableau = Tableau::build(&dual);
        Ok(match tableau.run_two_phase() {
            TableauEnd::Optimal => {
                // Strong duality: each primal variable is the dual of its
                // dual constraint — the reduced cost of that row's
                // slack/surplus column, un-scaled — and the recovered
                // vertex is primal-feasible, so pricing it with the
                // original costs gives the honest optimum.
                let (reduced, _) = tableau.recompute_reduced(&tableau.cost.clone());
                let x: Vec<f64> = tableau
                    .row_cols
                    .iter()
                    .zip(&row_mul)
                    .map(|(&col, &mul)| (mul * reduced[col]).max(0.0))
                    .collect();
                let value: f64 = primal.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
                let objective = match problem.sense {
                    Sense::Min => value,
                    Sense::Max => -value,
                };
                SolveOutcome {
                    status: SolveStatus::Optimal,
                    objective: Some(objective),
                    solution: Some(x),
                    diagnostics: format!("{} iterations", tableau.iterations),
                }
            }
            TableauEnd::Unbounded => {
                // An unbounded dual certifies primal infeasibility — but an
                // ill-conditioned basis can fake the certificate, so demand
                // a confirming primal phase 1 before reporting it.
                let mut primal = primal;
                primal.equilibrate();
                match Tableau::build(&primal).feasibility() {
                    Feasibility::Infeasible(gap) => SolveOutcome {
                        status: SolveStatus::Infeasible,
                        objective: None,
                        solution: None,
                        diagnostics: format!(
                            "dual unbounded; phase-1 infeasibility {gap:.3e}"
                        ),
                    },
                    Feasibility::Feasible => SolveOutcome::failure(
                        "dual claims an unbounded ray but the primal is feasible; \
                         basis conditioning exhausted",
                    ),
                    Feasibility::Failure(msg) => SolveOutcome::failure(msg),
                }
            }
            TableauEnd::Infeasible { gap } => {
                // An infeasible dual leaves primal-infeasible and
                // primal-unbounded possible; a primal phase 1 separates them.
                let mut primal = primal;
                primal.equilibrate();
                match Tableau::build(&primal).feasibility() {
                    Feasibility::Feasible => SolveOutcome {
                        status: SolveStatus::Unbounded,
                        objective: None,
                        solution: None,
                        diagnostics: format!("dual infeasible ({gap:.3e}), primal feasible"),
                    },
                    Feasibility::Infeasible(primal_gap) => SolveOutcome {
                        status: SolveStatus::Infeasible,
                        objective: None,
                        solution: None,
                        diagnostics: format!("phase-1 infeasibility {primal_gap:.3e}"),
                    },
                    Feasibility::Failure(msg) => SolveOutcome::failure(msg),
                }
            }
            TableauEnd::Failure(msg) => SolveOutcome::failure(msg),
        })
    }
}

/// A linear program normalized to `min c'x` over `x >= 0` with `Eq`/`Ge`/`Le`
/// rows, stored densely.
struct MinProgram {
    ncols: usize,
    cost: Vec<f64>,
    rows: Vec<(Vec<f64>, RowOp, f64)>,
}

impl MinProgram {
    fn from_problem(problem: &SolverProblem<'_>) -> Result<Self> {
        let n = problem.var_count;
        let mut cost = vec![0.0; n];
        for &(var, c) in problem.objective.terms() {
            if var >= n {
                return Err(Error::Dimension(format!(
                    "objective references variable {var} but the problem has {n}"
                )));
            }
            cost[var] += match problem.sense {
                Sense::Min => c,
                Sense::Max => -c,
            };
        }
        let mut rows = Vec::with_capacity(problem.row_count());
        for row in problem.equalities.iter().chain(problem.inequalities) {
            let mut coeffs = vec![0.0; n];
            for &(var, c) in row.expr.terms() {
                if var >= n {
                    return Err(Error::Dimension(format!(
                        "row '{}' references variable {var} but the problem has {n}",
                        row.label
                    )));
                }
                coeffs[var] += c;
            }
            rows.push((coeffs, row.op, row.rhs));
        }
        Ok(MinProgram { ncols: n, cost, rows })
    }

    /// The dual, itself in `min` form: for `min c'x` with rows
    /// `E x = f`, `G x >= h` (Le rows are negated into Ge first), the dual
    /// is `max f'u + h'w` over free `u`, `w >= 0`, subject to one
    /// constraint `E_j'u + G_j'w <= c_j` per primal variable.  Free duals
    /// are split into nonnegative pairs and the objective is negated.
    fn dual(&self) -> MinProgram {
        let n_eq = self
            .rows
            .iter()
            .filter(|(_, op, _)| matches!(op, RowOp::Eq))
            .count();
        let n_ineq = self.rows.len() - n_eq;
        let ncols = 2 * n_eq + n_ineq;

        let mut cost = vec![0.0; ncols];
        let mut columns: Vec<Vec<f64>> = vec![vec![0.0; ncols]; self.ncols];
        let mut next_eq = 0;
        let mut next_ineq = 2 * n_eq;
        for (coeffs, op, rhs) in &self.rows {
            match op {
                RowOp::Eq => {
                    cost[next_eq] = -rhs;
                    cost[next_eq + 1] = *rhs;
                    for (j, &a) in coeffs.iter().enumerate() {
                        columns[j][next_eq] = a;
                        columns[j][next_eq + 1] = -a;
                    }
                    next_eq += 2;
                }
                RowOp::Ge | RowOp::Le => {
                    let sign = if matches!(op, RowOp::Ge) { 1.0 } else { -1.0 };
                    cost[next_ineq] = -sign * rhs;
                    for (j, &a) in coeffs.iter().enumerate() {
                        columns[j][next_ineq] = sign * a;
                    }
                    next_ineq += 1;
                }
            }
        }

        let rows = columns
            .into_iter()
            .zip(&self.cost)
            .map(|(coeffs, &c)| (coeffs, RowOp::Le, c))
            .collect();
        MinProgram { ncols, cost, rows }
    }

    /// Ruiz equilibration: repeatedly scale rows and columns by the inverse
    /// square root of their largest entry, driving the matrix toward unit
    /// infinity norms.  Moment rows carry binomial coefficients spanning
    /// many orders of magnitude, and an unscaled tableau loses the optimum
    /// to roundoff.  Neither scaling changes the optimal value; the
    /// returned per-row multipliers convert scaled-row duals back to duals
    /// of the original rows.
    fn equilibrate(&mut self) -> Vec<f64> {
        let mut row_mul = vec![1.0; self.rows.len()];
        for _ in 0..RUIZ_PASSES {
            for (i, (coeffs, _, rhs)) in self.rows.iter_mut().enumerate() {
                let max = coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
                if max > 0.0 {
                    let s = 1.0 / max.sqrt();
                    for a in coeffs.iter_mut() {
                        *a *= s;
                    }
                    *rhs *= s;
                    row_mul[i] *= s;
                }
            }
            for j in 0..self.ncols {
                let max = self
                    .rows
                    .iter()
                    .fold(0.0f64, |m, (coeffs, _, _)| m.max(coeffs[j].abs()));
                if max > 0.0 {
                    let t = 1.0 / max.sqrt();
                    for (coeffs, _, _) in &mut self.rows {
                        coeffs[j] *= t;
                    }
                    self.cost[j] *= t;
                }
            }
        }
        row_mul
    }
}

enum TableauEnd {
    Optimal,
    Infeasible { gap: f64 },
    Unbounded,
    Failure(String),
}

enum Feasibility {
    Feasible,
    Infeasible(f64),
    Failure(String),
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    IterationLimit,
}

struct Tableau {
    /// Constraint rows, `m x ncols`.
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    /// Basic column per row.
    basis: Vec<usize>,
    ncols: usize,
    /// Columns at or beyond this index are phase-1 artificials.
    first_artificial: usize,
    /// Structural objective (minimization sense), padded to `ncols`.
    cost: Vec<f64>,
    /// Slack or surplus column added for each input row, in input order;
    /// reduced costs under these columns carry the row duals.
    row_cols: Vec<usize>,
    /// Pristine copy of the constraint matrix and right-hand side;
    /// refactorization re-derives the tableau from it.
    orig_rows: Vec<Vec<f64>>,
    orig_rhs: Vec<f64>,
    /// Original row index behind each current row.
    orig_idx: Vec<usize>,
    iterations: usize,
}

impl Tableau {
    fn build(program: &MinProgram) -> Self {
        let n = program.ncols;
        // Normalize to nonnegative right-hand sides.
        let mut dense: Vec<(Vec<f64>, RowOp, f64)> = Vec::with_capacity(program.rows.len());
        for (coeffs, op, rhs) in &program.rows {
            let mut coeffs = coeffs.clone();
            let mut op = *op;
            let mut rhs = *rhs;
            if rhs < 0.0 {
                for c in &mut coeffs {
                    *c = -*c;
                }
                rhs = -rhs;
                op = match op {
                    RowOp::Eq => RowOp::Eq,
                    RowOp::Le => RowOp::Ge,
                    RowOp::Ge => RowOp::Le,
                };
            }
            dense.push((coeffs, op, rhs));
        }

        let n_slack = dense
            .iter()
            .filter(|(_, op, _)| matches!(op, RowOp::Le | RowOp::Ge))
            .count();
        let n_art = dense
            .iter()
            .filter(|(_, op, _)| matches!(op, RowOp::Eq | RowOp::Ge))
            .count();
        let first_artificial = n + n_slack;
        let ncols = first_artificial + n_art;

        let mut rows = Vec::with_capacity(dense.len());
        let mut rhs = Vec::with_capacity(dense.len());
        let mut basis = Vec::with_capacity(dense.len());
        let mut row_cols = Vec::with_capacity(dense.len());
        let mut next_slack = n;
        let mut next_art = first_artificial;
        for (coeffs, op, b) in dense {
            let mut full = vec![0.0; ncols];
            full[..n].copy_from_slice(&coeffs);
            match op {
                RowOp::Le => {
                    full[next_slack] = 1.0;
                    basis.push(next_slack);
                    row_cols.push(next_slack);
                    next_slack += 1;
                }
                RowOp::Ge => {
                    full[next_slack] = -1.0;
                    row_cols.push(next_slack);
                    next_slack += 1;
                    full[next_art] = 1.0;
                    basis.push(next_art);
                    next_art += 1;
                }
                RowOp::Eq => {
                    full[next_art] = 1.0;
                    basis.push(next_art);
                    row_cols.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(full);
            rhs.push(b);
        }

        let mut cost = vec![0.0; ncols];
        cost[..n].copy_from_slice(&program.cost);
        Tableau {
            orig_rows: rows.clone(),
            orig_rhs: rhs.clone(),
            orig_idx: (0..rows.len()).collect(),
            rows,
            rhs,
            basis,
            ncols,
            first_artificial,
            cost,
            row_cols,
            iterations: 0,
        }
    }

    /// Rebuild the tableau as `B^{-1} [A | b]` from the pristine data by
    /// Gaussian elimination with partial pivoting on the current basis
    /// matrix.  Incremental pivoting accumulates error on the
    /// ill-conditioned bases moment programs produce; refactorization
    /// resets the tableau to solve accuracy.  Skipped for very tall
    /// tableaus, where the dense solve would dominate the walk, and when
    /// the basis matrix is numerically singular.
    fn refactor(&mut self) {
        let m = self.rows.len();
        if m == 0 || m > REFACTOR_MAX_ROWS {
            return;
        }
        // Augmented rows [B | A | b] over the surviving original rows.
        let width = m + self.ncols + 1;
        let mut aug: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let src = &self.orig_rows[self.orig_idx[i]];
                let mut row = Vec::with_capacity(width);
                row.extend(self.basis.iter().map(|&k| src[k]));
                row.extend_from_slice(src);
                row.push(self.orig_rhs[self.orig_idx[i]]);
                row
            })
            .collect();

        for col in 0..m {
            let pivot_row = (col..m)
                .max_by(|&r, &s| aug[r][col].abs().total_cmp(&aug[s][col].abs()))
                .expect("non-empty pivot range");
            if aug[pivot_row][col].abs() < f64::MIN_POSITIVE {
                // Numerically singular basis; keep the incremental tableau.
                return;
            }
            aug.swap(col, pivot_row);
            let (head, tail) = aug.split_at_mut(col + 1);
            let pivot = &head[col];
            let inv = 1.0 / pivot[col];
            for row in tail {
                let factor = row[col] * inv;
                if factor != 0.0 {
                    for j in col..width {
                        row[j] -= factor * pivot[j];
                    }
                }
            }
        }
        for col in (0..m).rev() {
            let inv = 1.0 / aug[col][col];
            for j in m..width {
                aug[col][j] *= inv;
            }
            let (head, tail) = aug.split_at_mut(col);
            let pivot = &tail[0];
            for row in head {
                let factor = row[col];
                if factor != 0.0 {
                    for j in m..width {
                        row[j] -= factor * pivot[j];
                    }
                }
            }
        }

        for (i, row) in aug.into_iter().enumerate() {
            self.rows[i].copy_from_slice(&row[m..m + self.ncols]);
            self.rhs[i] = row[width - 1].max(0.0);
        }
        // Basis columns are exactly unit vectors by construction.
        for (i, &col) in self.basis.iter().enumerate() {
            for r in 0..m {
                self.rows[r][col] = if r == i { 1.0 } else { 0.0 };
            }
        }
    }

    fn iteration_cap(&self) -> usize {
        20_000 + 200 * self.rows.len() + 5 * self.ncols
    }

    /// Phase 1 then phase 2; returns the optimum of the structural cost.
    fn run_two_phase(&mut self) -> TableauEnd {
        let cap = self.iteration_cap();
        match self.phase1(cap) {
            Feasibility::Feasible => {}
            Feasibility::Infeasible(gap) => return TableauEnd::Infeasible { gap },
            Feasibility::Failure(msg) => return TableauEnd::Failure(msg),
        }
        self.evict_artificials();

        let phase2_cost = self.cost.clone();
        let (end, _) = self.minimize(&phase2_cost, false, cap);
        match end {
            PhaseEnd::Optimal => TableauEnd::Optimal,
            PhaseEnd::Unbounded => TableauEnd::Unbounded,
            PhaseEnd::IterationLimit => {
                TableauEnd::Failure(format!("phase 2 exceeded {cap} iterations"))
            }
        }
    }

    /// Phase 1 alone: drive the artificials to zero.
    fn feasibility(&mut self) -> Feasibility {
        let cap = self.iteration_cap();
        self.phase1(cap)
    }

    fn phase1(&mut self, cap: usize) -> Feasibility {
        let phase1_cost: Vec<f64> = (0..self.ncols)
            .map(|j| if j >= self.first_artificial { 1.0 } else { 0.0 })
            .collect();
        let (end, infeasibility) = self.minimize(&phase1_cost, true, cap);
        match end {
            PhaseEnd::Optimal => {}
            PhaseEnd::Unbounded => {
                return Feasibility::Failure(
                    "phase 1 reported an unbounded direction (sum of artificials is bounded below)"
                        .to_string(),
                );
            }
            PhaseEnd::IterationLimit => {
                return Feasibility::Failure(format!("phase 1 exceeded {cap} iterations"));
            }
        }
        if infeasibility > TOL * (1.0 + self.rhs.iter().map(|b| b.abs()).sum::<f64>()) {
            Feasibility::Infeasible(infeasibility)
        } else {
            Feasibility::Feasible
        }
    }

    /// Reduced costs `r_j = c_j - c_B B^{-1} A_j` and value
    /// `z = c_B B^{-1} b`, computed exactly from the current tableau.
    fn recompute_reduced(&self, cost: &[f64]) -> (Vec<f64>, f64) {
        let mut reduced = cost.to_vec();
        let mut z = 0.0;
        for (i, &col) in self.basis.iter().enumerate() {
            let cb = cost[col];
            if cb != 0.0 {
                z += cb * self.rhs[i];
                for j in 0..self.ncols {
                    reduced[j] -= cb * self.rows[i][j];
                }
            }
        }
        for &col in &self.basis {
            reduced[col] = 0.0;
        }
        (reduced, z)
    }

    /// Primal simplex on the current tableau for the given cost vector.
    /// Returns the phase end state and the attained objective value.
    fn minimize(&mut self, cost: &[f64], phase1: bool, cap: usize) -> (PhaseEnd, f64) {
        self.refactor();
        let (mut reduced, mut z) = self.recompute_reduced(cost);
        let mut stalled = 0usize;
        let mut since_refresh = 0usize;
        loop {
            if self.iterations >= cap {
                return (PhaseEnd::IterationLimit, z);
            }
            if since_refresh >= REFRESH_INTERVAL.max(self.rows.len()) {
                self.refactor();
                (reduced, z) = self.recompute_reduced(cost);
                since_refresh = 0;
            }
            let bland = stalled >= STALL_LIMIT;
            let Some(entering) = self.pick_entering(&reduced, phase1, bland) else {
                // Entering columns seen near the threshold may be incremental
                // drift; accept optimality only on a fresh tableau.
                if since_refresh == 0 {
                    return (PhaseEnd::Optimal, z);
                }
                self.refactor();
                (reduced, z) = self.recompute_reduced(cost);
                since_refresh = 0;
                continue;
            };
            let Some(leaving) = self.pick_leaving(entering, bland) else {
                // An apparent ray may be accumulated drift; confirm it
                // against a fresh tableau before giving up.
                if since_refresh != 0 {
                    self.refactor();
                    (reduced, z) = self.recompute_reduced(cost);
                    since_refresh = 0;
                    if reduced[entering] >= -TOL {
                        continue;
                    }
                }
                return (PhaseEnd::Unbounded, z);
            };

            let pivot_rhs = self.rhs[leaving];
            stalled = if pivot_rhs.abs() <= TOL { stalled + 1 } else { 0 };

            self.pivot(leaving, entering);
            let delta = reduced[entering];
            if delta != 0.0 {
                z += delta * self.rhs[leaving];
                let pivot_row = &self.rows[leaving];
                for j in 0..self.ncols {
                    reduced[j] -= delta * pivot_row[j];
                }
                // Clear roundoff on the entering column exactly.
                reduced[entering] = 0.0;
            }
            self.iterations += 1;
            since_refresh += 1;
        }
    }

    fn pick_entering(&self, reduced: &[f64], phase1: bool, bland: bool) -> Option<usize> {
        let limit = if phase1 { self.ncols } else { self.first_artificial };
        if bland {
            (0..limit).find(|&j| reduced[j] < -TOL)
        } else {
            let mut best = None;
            let mut best_val = -TOL;
            for (j, &r) in reduced.iter().enumerate().take(limit) {
                if r < best_val {
                    best_val = r;
                    best = Some(j);
                }
            }
            best
        }
    }

    /// Ratio test.  The default is Harris' two-pass rule: bound the step by
    /// the minimum ratio under a relaxed feasibility tolerance, then take
    /// the numerically largest pivot within that bound, so near-parallel
    /// rows cannot force the walk onto a tiny pivot.  Under Bland's rule
    /// the exact minimum ratio is used with the smallest basic column
    /// breaking ties.
    fn pick_leaving(&self, entering: usize, bland: bool) -> Option<usize> {
        if bland {
            let mut best: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.rows.len() {
                let a = self.rows[i][entering];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs[i] / a;
                let better = match best {
                    None => true,
                    Some(bi) => {
                        if ratio + TOL < best_ratio {
                            true
                        } else if ratio > best_ratio + TOL {
                            false
                        } else {
                            self.basis[i] < self.basis[bi]
                        }
                    }
                };
                if better {
                    best = Some(i);
                    best_ratio = best_ratio.min(ratio);
                }
            }
            return best;
        }

        let mut bound = f64::INFINITY;
        for i in 0..self.rows.len() {
            let a = self.rows[i][entering];
            if a > PIVOT_TOL {
                bound = bound.min((self.rhs[i] + TOL) / a);
            }
        }
        if bound.is_infinite() {
            return None;
        }
        let mut best: Option<usize> = None;
        for i in 0..self.rows.len() {
            let a = self.rows[i][entering];
            if a > PIVOT_TOL
                && self.rhs[i] / a <= bound
                && best.is_none_or(|bi| a > self.rows[bi][entering])
            {
                best = Some(i);
            }
        }
        best
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col];
        let inv = 1.0 / pivot;
        for v in &mut self.rows[row] {
            *v *= inv;
        }
        self.rows[row][col] = 1.0;
        self.rhs[row] *= inv;

        let pivot_row = std::mem::take(&mut self.rows[row]);
        let pivot_rhs = self.rhs[row];
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col];
            if factor != 0.0 {
                for j in 0..self.ncols {
                    self.rows[i][j] -= factor * pivot_row[j];
                }
                self.rows[i][col] = 0.0;
                self.rhs[i] -= factor * pivot_rhs;
            }
        }
        self.rows[row] = pivot_row;
        self.basis[row] = col;
    }

    /// After phase 1, pivot basic artificials onto structural columns where
    /// possible and drop rows that turned out redundant.
    fn evict_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            // Degenerate basic artificial: a zero-step pivot onto the
            // largest non-artificial entry keeps the row scale intact.
            let col = (0..self.first_artificial)
                .max_by(|&a, &b| {
                    self.rows[i][a]
                        .abs()
                        .total_cmp(&self.rows[i][b].abs())
                })
                .filter(|&j| self.rows[i][j].abs() > PIVOT_TOL);
            match col {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    // Row is zero on all structural columns: redundant.
                    self.rows.swap_remove(i);
                    self.rhs.swap_remove(i);
                    self.basis.swap_remove(i);
                    self.orig_idx.swap_remove(i);
                }
            }
        }
    }
}
