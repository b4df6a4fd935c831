//! Assembly of the finite moment programs and bound extraction.
//!
//! For a truncation level `N` the program has one scaled-moment variable per
//! piece and total degree `≤ N`, the adjoint equality rows, Hausdorff
//! inequality rows per piece, explicit box rows `m̃ ≤ m̃_mass`, and a mass
//! bound on the occupation measure.  Solving with both senses produces the
//! price bracket `[v⁽ᴺ⁾₋, v⁽ᴺ⁾₊]`.

use std::time::Instant;

use crate::contracts::MomentObjective;
use crate::error::{Error, Result};
use crate::lp::adjoint::adjoint_rows;
use crate::lp::hausdorff::nonnegativity_rows;
use crate::lp::solver::{LpSolver, SolveOutcome, SolveStatus, SolverProblem};
use crate::lp::vars::VarRegistry;
use crate::lp::{LinExpr, LpRow, RowOp, Sense};
use crate::model::PolynomialModel;
use crate::support::{MeasurePiece, SupportSet};

/// Slack allowed before a lower/upper crossing is treated as a solver
/// failure, relative to `max(1, |upper|)`.
const CROSSING_TOL: f64 = 1e-9;

/// A fully assembled finite moment program.
#[derive(Debug, Clone)]
pub struct MomentLP {
    registry: VarRegistry,
    pub equalities: Vec<LpRow>,
    pub inequalities: Vec<LpRow>,
    pub objective: LinExpr,
    pub sense: Sense,
    pub n: u32,
    /// Adjoint rows omitted because the generator overflowed the degree cap.
    pub dropped_rows: Vec<(u32, u32)>,
}

impl MomentLP {
    pub fn registry(&self) -> &VarRegistry {
        &self.registry
    }

    pub fn var_count(&self) -> usize {
        self.registry.var_count()
    }

    pub fn as_problem(&self) -> SolverProblem<'_> {
        SolverProblem {
            var_count: self.registry.var_count(),
            equalities: &self.equalities,
            inequalities: &self.inequalities,
            objective: &self.objective,
            sense: self.sense,
        }
    }

    /// Largest violation of any row at `x`, with the offending row's label.
    pub fn max_violation(&self, x: &[f64]) -> (f64, String) {
        let mut worst = (0.0f64, String::new());
        for row in self.equalities.iter().chain(&self.inequalities) {
            let v = row.violation(x);
            if v > worst.0 {
                worst = (v, row.label.clone());
            }
        }
        worst
    }
}

/// Price bracket at one truncation level.
#[derive(Debug, Clone)]
pub struct BoundsResult {
    pub n: u32,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub lower_status: SolveStatus,
    pub upper_status: SolveStatus,
    pub wall_seconds: f64,
}

impl BoundsResult {
    pub fn both_optimal(&self) -> bool {
        self.lower_status == SolveStatus::Optimal && self.upper_status == SolveStatus::Optimal
    }

    /// Scale both bounds by a positive external discount factor.
    pub fn scaled(mut self, factor: f64) -> Self {
        debug_assert!(factor > 0.0);
        self.lower = self.lower.map(|v| v * factor);
        self.upper = self.upper.map(|v| v * factor);
        self
    }
}

/// Build the moment program for one sense.
pub fn build_lp(
    model: &PolynomialModel,
    exit_pieces: &[MeasurePiece],
    occupation: &MeasurePiece,
    objective: &MomentObjective,
    n: u32,
    sense: Sense,
) -> Result<MomentLP> {
    let registry = VarRegistry::new(exit_pieces, occupation, n)?;
    let adjoint = adjoint_rows(model, &registry)?;

    let mut inequalities = Vec::new();
    for piece in registry.refs() {
        inequalities.extend(nonnegativity_rows(&registry, piece)?);
    }
    inequalities.extend(box_rows(&registry)?);
    inequalities.push(occupation_mass_row(&registry, occupation)?);

    let objective_expr = objective.to_expr(&registry)?;
    if objective_expr.is_empty() {
        log::warn!("objective lowered to the zero functional; bounds will be (0, 0)");
    }

    let mut equalities = adjoint.rows;
    for row in equalities.iter_mut().chain(inequalities.iter_mut()) {
        row.normalize();
    }

    Ok(MomentLP {
        registry,
        equalities,
        inequalities,
        objective: objective_expr,
        sense,
        n,
        dropped_rows: adjoint.dropped,
    })
}

/// Build the (min, max) pair sharing one row assembly.
pub fn build_lp_pair(
    model: &PolynomialModel,
    exit_pieces: &[MeasurePiece],
    occupation: &MeasurePiece,
    objective: &MomentObjective,
    n: u32,
) -> Result<(MomentLP, MomentLP)> {
    let min = build_lp(model, exit_pieces, occupation, objective, n, Sense::Min)?;
    let mut max = min.clone();
    max.sense = Sense::Max;
    Ok((min, max))
}

/// Solve both programs and assemble the bracket.  The bounds are never
/// swapped; a crossing beyond tolerance demotes both statuses to
/// numerical failure.
pub fn solve_bounds(
    min_lp: &MomentLP,
    max_lp: &MomentLP,
    solver: &dyn LpSolver,
) -> Result<BoundsResult> {
    if min_lp.sense != Sense::Min || max_lp.sense != Sense::Max {
        return Err(Error::config(
            "solve_bounds expects a (min, max) pair in that order",
        ));
    }
    if min_lp.n != max_lp.n {
        return Err(Error::config(format!(
            "mismatched truncation levels {} and {}",
            min_lp.n, max_lp.n
        )));
    }
    let start = Instant::now();
    let (lo_out, hi_out) = rayon::join(
        || solver.solve(&min_lp.as_problem()),
        || solver.solve(&max_lp.as_problem()),
    );
    let wall_seconds = start.elapsed().as_secs_f64();
    let lo = lo_out?;
    let hi = hi_out?;

    let mut result = BoundsResult {
        n: min_lp.n,
        lower: extract(&lo),
        upper: extract(&hi),
        lower_status: lo.status,
        upper_status: hi.status,
        wall_seconds,
    };
    if let (Some(l), Some(u)) = (result.lower, result.upper) {
        if result.both_optimal() && l > u + CROSSING_TOL * u.abs().max(1.0) {
            log::warn!(
                "lower bound {l:.9} crosses upper bound {u:.9} at N={}; \
                 reporting numerical failure ({} / {})",
                result.n,
                lo.diagnostics,
                hi.diagnostics
            );
            result.lower_status = SolveStatus::NumericalFailure;
            result.upper_status = SolveStatus::NumericalFailure;
        }
    }
    Ok(result)
}

fn extract(outcome: &SolveOutcome) -> Option<f64> {
    if outcome.is_optimal() {
        outcome.objective
    } else {
        None
    }
}

/// Rows `m̃_mass − m̃_v ≥ 0` for every non-mass variable.  Implied by the
/// full Hausdorff family, but kept explicit as a cheap guard against
/// unboundedness at small `N`.
fn box_rows(registry: &VarRegistry) -> Result<Vec<LpRow>> {
    let mut rows = Vec::new();
    for piece in registry.refs() {
        let mass = registry.mass_var(piece)?;
        let label = registry.piece(piece)?.label.clone();
        for (var, key) in registry.vars_of(piece)? {
            if var == mass {
                continue;
            }
            let mut expr = LinExpr::single(mass, 1.0);
            expr.add_term(var, -1.0);
            rows.push(LpRow::new(
                expr,
                RowOp::Ge,
                0.0,
                format!("box[{label}] {key:?}"),
            ));
        }
    }
    Ok(rows)
}

/// The occupation mass cannot exceed the (undiscounted) time the process can
/// spend in the box: `m̃₀₀ ≤ t_hi − t_lo`.
fn occupation_mass_row(registry: &VarRegistry, occupation: &MeasurePiece) -> Result<LpRow> {
    let t_len = match &occupation.support {
        SupportSet::Rectangle { t, .. } => t.len(),
        SupportSet::HSegment { t, .. } => t.len(),
        SupportSet::VSegment { .. } => 0.0,
    };
    let mass = registry.mass_var(crate::support::PieceRef::Occupation)?;
    Ok(LpRow::new(
        LinExpr::single(mass, 1.0),
        RowOp::Le,
        t_len,
        "mass[occupation]",
    ))
}
