//! Free-format MPS export of the assembled moment programs.
//!
//! One file per (example, N, sense) allows cross-checking the bounds with
//! external LP solvers.  Generated row/column names are short and
//! parser-safe; the original labels are preserved in comment lines.

use std::io::{self, Write};

use crate::lp::{MomentLP, RowOp, Sense};

/// Render the program as a free-format MPS document.
pub fn mps_string(lp: &MomentLP, name: &str) -> String {
    let mut buf = Vec::new();
    write_mps(lp, name, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("MPS output is ASCII")
}

/// Write the program in free-format MPS.  Variables use their implicit
/// default bound `0 ≤ x`, so no BOUNDS section is emitted.
pub fn write_mps(lp: &MomentLP, name: &str, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "* moment LP export: {} variables, {} rows",
        lp.var_count(),
        lp.equalities.len() + lp.inequalities.len()
    )?;
    for (i, row) in lp.equalities.iter().enumerate() {
        writeln!(out, "* e{i} = {}", row.label)?;
    }
    for (i, row) in lp.inequalities.iter().enumerate() {
        writeln!(out, "* i{i} = {}", row.label)?;
    }
    for var in 0..lp.var_count() {
        writeln!(out, "* x{var} = {}", lp.registry().var_label(var))?;
    }

    writeln!(out, "NAME {name}")?;
    if lp.sense == Sense::Max {
        writeln!(out, "OBJSENSE")?;
        writeln!(out, "    MAX")?;
    }

    writeln!(out, "ROWS")?;
    writeln!(out, " N OBJ")?;
    for (i, row) in lp.equalities.iter().enumerate() {
        debug_assert!(matches!(row.op, RowOp::Eq));
        writeln!(out, " E e{i}")?;
    }
    for (i, row) in lp.inequalities.iter().enumerate() {
        let tag = match row.op {
            RowOp::Le => 'L',
            RowOp::Ge => 'G',
            RowOp::Eq => 'E',
        };
        writeln!(out, " {tag} i{i}")?;
    }

    // Column-major coefficient lists.
    let mut columns: Vec<Vec<(String, f64)>> = vec![Vec::new(); lp.var_count()];
    for &(var, c) in lp.objective.terms() {
        columns[var].push(("OBJ".to_string(), c));
    }
    for (i, row) in lp.equalities.iter().enumerate() {
        for &(var, c) in row.expr.terms() {
            columns[var].push((format!("e{i}"), c));
        }
    }
    for (i, row) in lp.inequalities.iter().enumerate() {
        for &(var, c) in row.expr.terms() {
            columns[var].push((format!("i{i}"), c));
        }
    }

    writeln!(out, "COLUMNS")?;
    for (var, entries) in columns.iter().enumerate() {
        for (row_name, c) in entries {
            writeln!(out, "    x{var} {row_name} {c:.16e}")?;
        }
    }

    writeln!(out, "RHS")?;
    for (i, row) in lp.equalities.iter().enumerate() {
        if row.rhs != 0.0 {
            writeln!(out, "    RHS e{i} {:.16e}", row.rhs)?;
        }
    }
    for (i, row) in lp.inequalities.iter().enumerate() {
        if row.rhs != 0.0 {
            writeln!(out, "    RHS i{i} {:.16e}", row.rhs)?;
        }
    }
    writeln!(out, "ENDATA")?;
    Ok(())
}
