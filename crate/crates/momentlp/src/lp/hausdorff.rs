//! Hausdorff moment conditions on the scaled variables.
//!
//! A sequence is the moment sequence of a nonnegative measure on the unit
//! interval/box iff all iterated differences are nonnegative.  Truncated at
//! total index `N`, the conditions become finitely many linear inequalities:
//!
//! - 1D, for `n + k <= N`:    `Σ_{j<=n} C(n,j) (-1)^j m̃_{j+k} >= 0`
//! - 2D, for `m+n+k+l <= N`:  `Σ_{i<=m} Σ_{j<=n} C(m,i) C(n,j) (-1)^{i+j}
//!   m̃_{i+l, j+k} >= 0`
//!
//! which are the moments of `s^l (1-s)^m y^k (1-y)^n` — nonnegative on the
//! box — against the measure.

use crate::error::Result;
use crate::poly::binomial;
use crate::support::PieceRef;

use super::vars::VarRegistry;
use super::{LinExpr, LpRow, RowOp};

/// Hausdorff rows for a 1D (segment) piece.
pub fn hausdorff_rows_1d(registry: &VarRegistry, piece: PieceRef) -> Result<Vec<LpRow>> {
    let n_max = registry.n();
    let base = registry.mass_var(piece)?;
    let label = &registry.piece(piece)?.label;
    let mut rows = Vec::new();
    for n in 0..=n_max {
        for k in 0..=(n_max - n) {
            let mut expr = LinExpr::new();
            for j in 0..=n {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                expr.add_term(base + (j + k) as usize, sign * binomial(n, j));
            }
            expr.compact();
            rows.push(LpRow::new(
                expr,
                RowOp::Ge,
                0.0,
                format!("H1[{label}] n={n} k={k}"),
            ));
        }
    }
    Ok(rows)
}

/// Hausdorff rows for a 2D (rectangle) piece.
pub fn hausdorff_rows_2d(registry: &VarRegistry, piece: PieceRef) -> Result<Vec<LpRow>> {
    let n_max = registry.n();
    let base = registry.mass_var(piece)?;
    let label = &registry.piece(piece)?.label;
    let idx = |i: u32, j: u32| -> usize {
        let d = i + j;
        base + (d * (d + 1) / 2 + i) as usize
    };
    let mut rows = Vec::new();
    for m in 0..=n_max {
        for n in 0..=(n_max - m) {
            for l in 0..=(n_max - m - n) {
                for k in 0..=(n_max - m - n - l) {
                    let mut expr = LinExpr::new();
                    for i in 0..=m {
                        for j in 0..=n {
                            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                            expr.add_term(
                                idx(i + l, j + k),
                                sign * binomial(m, i) * binomial(n, j),
                            );
                        }
                    }
                    expr.compact();
                    rows.push(LpRow::new(
                        expr,
                        RowOp::Ge,
                        0.0,
                        format!("H2[{label}] m={m} n={n} k={k} l={l}"),
                    ));
                }
            }
        }
    }
    Ok(rows)
}

/// All Hausdorff-type rows of a piece, dispatching on its dimensionality.
/// Point pieces get the single row `mass >= 0`.
pub fn nonnegativity_rows(registry: &VarRegistry, piece: PieceRef) -> Result<Vec<LpRow>> {
    match registry.piece(piece)?.dim() {
        0 => {
            let label = &registry.piece(piece)?.label;
            let expr = LinExpr::single(registry.mass_var(piece)?, 1.0);
            Ok(vec![LpRow::new(
                expr,
                RowOp::Ge,
                0.0,
                format!("H0[{label}]"),
            )])
        }
        1 => hausdorff_rows_1d(registry, piece),
        _ => hausdorff_rows_2d(registry, piece),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::{MeasurePiece, SupportSet};

    fn unit_1d_registry(n: u32) -> VarRegistry {
        let exits = vec![MeasurePiece::new(
            "nu",
            SupportSet::v_segment(1.0, (0.0, 1.0)).unwrap(),
        )];
        let occ = MeasurePiece::new("mu", SupportSet::rectangle((0.0, 1.0), (0.0, 1.0)).unwrap());
        VarRegistry::new(&exits, &occ, n).unwrap()
    }

    fn row<'a>(rows: &'a [LpRow], label: &str) -> &'a LpRow {
        rows.iter().find(|r| r.label == label).unwrap_or_else(|| {
            panic!("row {label} not found");
        })
    }

    #[test]
    fn row_count_matches_truncation() {
        let reg = unit_1d_registry(4);
        let rows = hausdorff_rows_1d(&reg, PieceRef::Exit(0)).unwrap();
        // pairs (n, k) with n + k <= 4: 15
        assert_eq!(rows.len(), 15);
        let rows2 = hausdorff_rows_2d(&reg, PieceRef::Occupation).unwrap();
        // quadruples with m+n+k+l <= 4: C(8,4) = 70
        assert_eq!(rows2.len(), 70);
    }

    #[test]
    fn dirac_and_uniform_sequences_are_feasible() {
        let n = 4u32;
        let reg = unit_1d_registry(n);
        let rows = hausdorff_rows_1d(&reg, PieceRef::Exit(0)).unwrap();
        let mut vals = vec![0.0; reg.var_count()];

        // Dirac at 0.5: m̃_k = 0.5^k; the (n=1,k=0) row evaluates to 0.5.
        for k in 0..=n {
            vals[k as usize] = 0.5f64.powi(k as i32);
        }
        for r in &rows {
            assert!(r.violation(&vals) <= 1e-14, "violated {}", r.label);
        }
        assert!((row(&rows, "H1[nu] n=1 k=0").expr.eval(&vals) - 0.5).abs() < 1e-14);

        // Uniform: m̃_k = 1/(k+1); the (n=2,k=0) row evaluates to 1/3.
        for k in 0..=n {
            vals[k as usize] = 1.0 / (k as f64 + 1.0);
        }
        for r in &rows {
            assert!(r.violation(&vals) <= 1e-14, "violated {}", r.label);
        }
        let v = row(&rows, "H1[nu] n=2 k=0").expr.eval(&vals);
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn non_moment_sequences_are_excluded() {
        let reg = unit_1d_registry(2);
        let rows = hausdorff_rows_1d(&reg, PieceRef::Exit(0)).unwrap();
        let mut vals = vec![0.0; reg.var_count()];

        // (1, 0.9, 0.9) is feasible (boundary case included).
        vals[..3].copy_from_slice(&[1.0, 0.9, 0.9]);
        for r in &rows {
            assert!(r.violation(&vals) <= 1e-14, "violated {}", r.label);
        }
        assert!((row(&rows, "H1[nu] n=1 k=0").expr.eval(&vals) - 0.1).abs() < 1e-14);
        assert!(row(&rows, "H1[nu] n=1 k=1").expr.eval(&vals).abs() < 1e-14);
        assert!((row(&rows, "H1[nu] n=2 k=0").expr.eval(&vals) - 0.1).abs() < 1e-14);

        // m̃_1 > m̃_0 violates the mass bound row (n=1, k=0).
        vals[..3].copy_from_slice(&[1.0, 1.1, 1.0]);
        assert!(row(&rows, "H1[nu] n=1 k=0").violation(&vals) > 0.09);
    }

    #[test]
    fn two_dimensional_rows_on_product_measures() {
        let n = 4u32;
        let reg = unit_1d_registry(n);
        let rows = hausdorff_rows_2d(&reg, PieceRef::Occupation).unwrap();
        let base = reg.mass_var(PieceRef::Occupation).unwrap();
        let idx = |i: u32, j: u32| base + ((i + j) * (i + j + 1) / 2 + i) as usize;
        let mut vals = vec![0.0; reg.var_count()];

        // Product of Diracs at (0.5, 0.5): every row is a product of
        // nonnegative one-dimensional factors.
        for d in 0..=n {
            for i in 0..=d {
                vals[idx(i, d - i)] = 0.5f64.powi(d as i32);
            }
        }
        for r in &rows {
            assert!(r.violation(&vals) <= 1e-14, "violated {}", r.label);
        }

        // Uniform on the unit square: m̃_{i,j} = 1/((i+1)(j+1)); the
        // (m=n=1, k=l=0) row evaluates to (1 - 1/2)^2 = 1/4.
        for d in 0..=n {
            for i in 0..=d {
                let j = d - i;
                vals[idx(i, j)] = 1.0 / ((i as f64 + 1.0) * (j as f64 + 1.0));
            }
        }
        for r in &rows {
            assert!(r.violation(&vals) <= 1e-14, "violated {}", r.label);
        }
        let v = row(&rows, "H2[mu] m=1 n=1 k=0 l=0").expr.eval(&vals);
        assert!((v - 0.25).abs() < 1e-14);
    }

    #[test]
    fn marginal_violations_propagate_to_two_dimensions() {
        let reg = unit_1d_registry(2);
        let rows = hausdorff_rows_2d(&reg, PieceRef::Occupation).unwrap();
        let base = reg.mass_var(PieceRef::Occupation).unwrap();
        let idx = |i: u32, j: u32| base + ((i + j) * (i + j + 1) / 2 + i) as usize;
        let mut vals = vec![0.0; reg.var_count()];
        // t-marginal sequence (1, 1.1): violates (m=1, n=0, k=0, l=0).
        vals[idx(0, 0)] = 1.0;
        vals[idx(1, 0)] = 1.1;
        let r = row(&rows, "H2[mu] m=1 n=0 k=0 l=0");
        assert!(r.violation(&vals) > 0.09);
    }
}
