//! Equality rows linking exit-location and occupation moments.
//!
//! For every monomial `f = t^i x^j` the basic adjoint identity reads
//! `Σ_pieces ν_{i,j} - Σ_{k,l} c_{k,l}(i,j) μ_{k,l} = t0^i x0^j`, where the
//! `c_{k,l}` are the coefficients of the generator polynomial `(A - r) f`.
//! Rows whose generator polynomial references occupation moments beyond the
//! truncation degree are dropped (the finite program only knows `k + l <= N`),
//! which keeps the system a valid relaxation.

use crate::error::{Error, Result};
use crate::model::PolynomialModel;
use crate::support::PieceRef;

use super::vars::VarRegistry;
use super::{LinExpr, LpRow, RowOp};

/// Adjoint equality rows plus the bookkeeping of dropped rows.
#[derive(Debug, Clone)]
pub struct AdjointSystem {
    pub rows: Vec<LpRow>,
    /// Monomial indices `(i, j)` whose rows were dropped because the
    /// generator polynomial outgrew the truncation degree.
    pub dropped: Vec<(u32, u32)>,
}

/// Build one equality row per monomial `t^i x^j`, `i + j <= N`.
pub fn adjoint_rows(model: &PolynomialModel, registry: &VarRegistry) -> Result<AdjointSystem> {
    let n = registry.n();
    let mut rows = Vec::new();
    let mut dropped = Vec::new();
    let mut has_mass_row = false;

    for d in 0..=n {
        for i in 0..=d {
            let j = d - i;
            let gen = model.apply_generator(i, j)?;
            let fits = gen
                .poly
                .terms()
                .all(|((k, l), _)| registry.raw_moment_available(PieceRef::Occupation, k, l));
            if !fits {
                dropped.push((i, j));
                continue;
            }
            let mut expr = LinExpr::new();
            for p in 0..registry.exit_count() {
                let nu = registry.raw_moment(PieceRef::Exit(p), i, j)?;
                expr.add_expr(&nu, 1.0);
            }
            for ((k, l), c) in gen.poly.terms() {
                let mu = registry.raw_moment(PieceRef::Occupation, k, l)?;
                expr.add_expr(&mu, -c);
            }
            expr.compact();
            let rhs = model.t0.powi(i as i32) * model.x0.powi(j as i32);
            rows.push(LpRow::new(expr, RowOp::Eq, rhs, format!("adjoint[{i},{j}]")));
            if (i, j) == (0, 0) {
                has_mass_row = true;
            }
        }
    }

    if rows.is_empty() {
        return Err(Error::config(format!(
            "every adjoint row was dropped at truncation degree {n}; \
             the model polynomials are too high-degree for this N"
        )));
    }
    if !has_mass_row {
        return Err(Error::config(format!(
            "the mass-balance row (0,0) was dropped at truncation degree {n}; \
             increase N beyond the discount-rate degree"
        )));
    }
    Ok(AdjointSystem { rows, dropped })
}
