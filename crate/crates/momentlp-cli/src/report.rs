//! Ladder execution and report assembly.
//!
//! A run solves the bound pair at every truncation degree in the configured
//! range, attaches oracle references and relative errors, and renders one
//! table plus a monotonicity verdict.  Individual degrees may fail (solver
//! breakdown at high degree) without aborting the run; failed rows are
//! marked and the process exit code distinguishes full from partial success.

use std::fmt::Write as _;

use rayon::prelude::*;

use momentlp::contracts::ProblemSetup;
use momentlp::lp::{BoundsResult, LpSolver};
use momentlp::oracles::{mc_price, McResult};
use momentlp::Result;

use crate::config::{OracleKind, OutputFormat, RunConfig};

/// Slack for the monotonicity and sandwich checks, covering solver
/// tolerance at adjacent degrees.
pub const MONOTONE_SLACK: f64 = 1e-7;

/// Reference price the table's relative errors are computed against.
#[derive(Debug, Clone, Copy)]
pub enum Reference {
    /// Closed-form value; per-bound relative errors apply.
    Exact(f64),
    /// Simulation estimate; the midpoint relative error applies.
    Mc(McResult),
}

impl Reference {
    pub fn value(&self) -> f64 {
        match self {
            Reference::Exact(v) => *v,
            Reference::Mc(r) => r.estimate,
        }
    }
}

/// One table row: the bound pair at a degree, or the failure that replaced it.
#[derive(Debug)]
pub struct Row {
    pub n: u32,
    pub outcome: Result<BoundsResult>,
}

impl Row {
    /// Bounds when both senses solved to optimality.
    fn bracket(&self) -> Option<(f64, f64)> {
        match &self.outcome {
            Ok(b) if b.both_optimal() => Some((b.lower?, b.upper?)),
            _ => None,
        }
    }

    fn failure_note(&self) -> Option<String> {
        match &self.outcome {
            Ok(b) if b.both_optimal() => None,
            Ok(b) => Some(format!(
                "lower {}, upper {}",
                b.lower_status, b.upper_status
            )),
            Err(e) => Some(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(String),
    NotAssessed(String),
}

/// Completed run: configuration echo, reference, rows in degree order.
pub struct Report {
    pub config: RunConfig,
    pub problem_name: String,
    pub solver_name: String,
    pub p_star: Option<f64>,
    pub reference: Option<Reference>,
    pub rows: Vec<Row>,
    pub verdict: Verdict,
}

/// Solve the configured ladder.  Degrees are dispatched concurrently; rows
/// come back ordered by degree regardless of completion order.
pub fn run_ladder(config: &RunConfig, solver: &dyn LpSolver) -> Result<Report> {
    config.validate()?;
    let problem = config.build_problem()?;
    let reference = resolve_reference(config, &problem)?;
    let p_star = config.p_star()?;

    let mut rows: Vec<Row> = config
        .n_values()
        .par_iter()
        .map(|&n| Row {
            n,
            outcome: problem.bounds_at(n, solver),
        })
        .collect();
    rows.sort_by_key(|row| row.n);
    let verdict = assess_monotonicity(&rows);

    Ok(Report {
        config: config.clone(),
        problem_name: problem.name.clone(),
        solver_name: solver.name().to_string(),
        p_star,
        reference,
        rows,
        verdict,
    })
}

/// Run only the oracle side of a configuration.
pub fn resolve_reference(
    config: &RunConfig,
    problem: &ProblemSetup,
) -> Result<Option<Reference>> {
    match config.run.oracle {
        OracleKind::None => Ok(None),
        OracleKind::Exact => config.exact_reference().map(|v| Some(Reference::Exact(v))),
        OracleKind::Mc => {
            let result = mc_price(&problem.mc_model, &problem.contract, &config.mc)?;
            Ok(Some(Reference::Mc(result)))
        }
    }
}

/// Lower bounds must be non-decreasing, upper bounds non-increasing, and
/// every bracket must satisfy `lower <= upper`, all within
/// [`MONOTONE_SLACK`].  Failed rows are skipped; the checks run on the
/// successful rows in degree order.
pub fn assess_monotonicity(rows: &[Row]) -> Verdict {
    let brackets: Vec<(u32, f64, f64)> = rows
        .iter()
        .filter_map(|row| row.bracket().map(|(lo, up)| (row.n, lo, up)))
        .collect();
    if brackets.is_empty() {
        return Verdict::NotAssessed("no successful rows".to_string());
    }
    for &(n, lo, up) in &brackets {
        if lo > up + MONOTONE_SLACK {
            return Verdict::Fail(format!("bounds cross at N = {n}: {lo} > {up}"));
        }
    }
    for pair in brackets.windows(2) {
        let (n0, lo0, up0) = pair[0];
        let (n1, lo1, up1) = pair[1];
        if lo1 < lo0 - MONOTONE_SLACK {
            return Verdict::Fail(format!(
                "lower bound decreases from N = {n0} to N = {n1}: {lo0} -> {lo1}"
            ));
        }
        if up1 > up0 + MONOTONE_SLACK {
            return Verdict::Fail(format!(
                "upper bound increases from N = {n0} to N = {n1}: {up0} -> {up1}"
            ));
        }
    }
    Verdict::Pass
}

impl Report {
    pub fn all_rows_succeeded(&self) -> bool {
        self.rows.iter().all(|row| row.bracket().is_some())
    }

    pub fn render(&self) -> String {
        match self.config.run.output {
            OutputFormat::Text => self.render_text(),
            OutputFormat::Csv => self.render_csv(),
        }
    }

    /// Relative error columns present under the configured oracle:
    /// per-bound errors need an exact reference, the midpoint error any
    /// reference.
    fn per_bound_errors(&self) -> bool {
        matches!(self.reference, Some(Reference::Exact(_)))
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let run = &self.config.run;
        let _ = writeln!(out, "example      : {}", self.problem_name);
        let _ = writeln!(out, "solver       : {}", self.solver_name);
        let _ = writeln!(out, "N range      : {}..{}", run.n_min, run.n_max);
        let discounting = if run.p_star_shortcut {
            "p* factor outside the LP"
        } else {
            "killed (big-jump rate in the LP rows)"
        };
        if let Some(p_star) = self.p_star {
            let _ = writeln!(out, "discounting  : {discounting}");
            let _ = writeln!(out, "p*           : {p_star:.4}");
        }
        match self.reference {
            Some(Reference::Exact(v)) => {
                let _ = writeln!(out, "oracle       : exact {v:.6}");
            }
            Some(Reference::Mc(r)) => {
                let _ = writeln!(
                    out,
                    "oracle       : mc {:.6}  (std error {:.6}, paths {})",
                    r.estimate, r.std_error, r.paths_used
                );
            }
            None => {
                let _ = writeln!(out, "oracle       : none");
            }
        }
        let _ = writeln!(out);

        let mut header = format!("{:>4}  {:>12}  {:>12}", "N", "lower", "upper");
        if self.per_bound_errors() {
            let _ = write!(header, "  {:>12}  {:>12}", "rel.err(lo)", "rel.err(up)");
        }
        if self.reference.is_some() {
            let _ = write!(header, "  {:>12}", "rel.err(mid)");
        }
        let _ = write!(header, "  {:>8}", "time(s)");
        let _ = writeln!(out, "{header}");

        for row in &self.rows {
            let _ = write!(out, "{:>4}", row.n);
            match row.bracket() {
                Some((lo, up)) => {
                    let _ = write!(out, "  {lo:>12.6}  {up:>12.6}");
                    if self.per_bound_errors() {
                        let (elo, eup) = self.bound_errors(lo, up);
                        let _ = write!(
                            out,
                            "  {:>12}  {:>12}",
                            format_percent(elo),
                            format_percent(eup)
                        );
                    }
                    if self.reference.is_some() {
                        let _ = write!(
                            out,
                            "  {:>12}",
                            format_percent(self.midpoint_error(lo, up))
                        );
                    }
                }
                None => {
                    let _ = write!(out, "  {:>12}  {:>12}", "failed", "failed");
                    if self.per_bound_errors() {
                        let _ = write!(out, "  {:>12}  {:>12}", "-", "-");
                    }
                    if self.reference.is_some() {
                        let _ = write!(out, "  {:>12}", "-");
                    }
                }
            }
            if let Ok(b) = &row.outcome {
                let _ = write!(out, "  {:>8.2}", b.wall_seconds);
            } else {
                let _ = write!(out, "  {:>8}", "-");
            }
            if let Some(note) = row.failure_note() {
                let _ = write!(out, "  [{note}]");
            }
            let _ = writeln!(out);
        }

        let _ = writeln!(out);
        let verdict = match &self.verdict {
            Verdict::Pass => format!(
                "PASS (lower non-decreasing, upper non-increasing, lower <= upper; slack {MONOTONE_SLACK:.0e})"
            ),
            Verdict::Fail(reason) => format!("FAIL ({reason})"),
            Verdict::NotAssessed(reason) => format!("not assessed ({reason})"),
        };
        let _ = writeln!(out, "monotonicity : {verdict}");
        out
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# example: {}", self.problem_name);
        let _ = writeln!(out, "# solver: {}", self.solver_name);
        if let Some(p_star) = self.p_star {
            let _ = writeln!(out, "# p_star: {p_star}");
        }
        match self.reference {
            Some(Reference::Exact(v)) => {
                let _ = writeln!(out, "# oracle: exact,{v}");
            }
            Some(Reference::Mc(r)) => {
                let _ = writeln!(
                    out,
                    "# oracle: mc,{},{},{}",
                    r.estimate, r.std_error, r.paths_used
                );
            }
            None => {}
        }
        let _ = writeln!(
            out,
            "n,lower,upper,rel_err_lower,rel_err_upper,rel_err_mid,wall_seconds,status"
        );
        for row in &self.rows {
            let _ = write!(out, "{},", row.n);
            match row.bracket() {
                Some((lo, up)) => {
                    let _ = write!(out, "{lo},{up},");
                    if self.per_bound_errors() {
                        let (elo, eup) = self.bound_errors(lo, up);
                        let _ = write!(out, "{elo},{eup},");
                    } else {
                        let _ = write!(out, ",,");
                    }
                    if self.reference.is_some() {
                        let _ = write!(out, "{},", self.midpoint_error(lo, up));
                    } else {
                        let _ = write!(out, ",");
                    }
                }
                None => {
                    let _ = write!(out, ",,,,,");
                }
            }
            match &row.outcome {
                Ok(b) => {
                    let status = if b.both_optimal() {
                        "ok".to_string()
                    } else {
                        format!("{}/{}", b.lower_status, b.upper_status)
                    };
                    let _ = writeln!(out, "{},{status}", b.wall_seconds);
                }
                Err(e) => {
                    let _ = writeln!(out, ",error: {}", csv_safe(&e.to_string()));
                }
            }
        }
        let verdict = match &self.verdict {
            Verdict::Pass => "pass".to_string(),
            Verdict::Fail(reason) => format!("fail: {}", csv_safe(reason)),
            Verdict::NotAssessed(reason) => format!("not assessed: {}", csv_safe(reason)),
        };
        let _ = writeln!(out, "# monotonicity: {verdict}");
        out
    }

    fn bound_errors(&self, lo: f64, up: f64) -> (f64, f64) {
        let reference = self.reference.as_ref().expect("caller checked").value();
        (
            relative_error(lo, reference),
            relative_error(up, reference),
        )
    }

    fn midpoint_error(&self, lo: f64, up: f64) -> f64 {
        let reference = self.reference.as_ref().expect("caller checked").value();
        relative_error(0.5 * (lo + up), reference)
    }
}

fn relative_error(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs()
}

fn format_percent(rel: f64) -> String {
    format!("{:.4}%", 100.0 * rel)
}

fn csv_safe(text: &str) -> String {
    text.replace([',', '\n'], ";")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExampleKind;
    use momentlp::lp::{solver_by_name, SolveStatus};

    fn bracket_row(n: u32, lower: f64, upper: f64) -> Row {
        Row {
            n,
            outcome: Ok(BoundsResult {
                n,
                lower: Some(lower),
                upper: Some(upper),
                lower_status: SolveStatus::Optimal,
                upper_status: SolveStatus::Optimal,
                wall_seconds: 0.0,
            }),
        }
    }

    #[test]
    fn verdict_detects_each_violation_kind() {
        let rows = vec![bracket_row(4, 0.1, 0.9), bracket_row(5, 0.2, 0.8)];
        assert_eq!(assess_monotonicity(&rows), Verdict::Pass);

        let rows = vec![bracket_row(4, 0.1, 0.9), bracket_row(5, 0.05, 0.8)];
        assert!(matches!(assess_monotonicity(&rows), Verdict::Fail(_)));

        let rows = vec![bracket_row(4, 0.1, 0.9), bracket_row(5, 0.2, 0.95)];
        assert!(matches!(assess_monotonicity(&rows), Verdict::Fail(_)));

        let rows = vec![bracket_row(4, 0.9, 0.1)];
        assert!(matches!(assess_monotonicity(&rows), Verdict::Fail(_)));

        assert!(matches!(
            assess_monotonicity(&[]),
            Verdict::NotAssessed(_)
        ));
    }

    #[test]
    fn slack_absorbs_solver_noise() {
        let rows = vec![
            bracket_row(4, 0.1, 0.9),
            bracket_row(5, 0.1 - 0.5 * MONOTONE_SLACK, 0.9 + 0.5 * MONOTONE_SLACK),
        ];
        assert_eq!(assess_monotonicity(&rows), Verdict::Pass);
    }

    #[test]
    fn gbm_ladder_report_is_deterministic() {
        let mut config = RunConfig::example_default(ExampleKind::GbmDko).unwrap();
        config.run.n_min = 4;
        config.run.n_max = 6;
        config.run.oracle = OracleKind::Exact;
        let solver = solver_by_name("clarabel").unwrap();

        let report = run_ladder(&config, solver.as_ref()).unwrap();
        assert_eq!(report.rows.len(), 3);
        assert!(report.all_rows_succeeded());
        assert_eq!(report.verdict, Verdict::Pass);
        assert!(report.p_star.is_none());

        // Same configuration, same table (timing columns excluded).
        let again = run_ladder(&config, solver.as_ref()).unwrap();
        let strip_timing = |r: &Report| {
            r.rows
                .iter()
                .map(|row| (row.n, row.bracket()))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip_timing(&report), strip_timing(&again));

        // Round-tripping the configuration reproduces the run.
        let round_tripped =
            RunConfig::from_toml_str(&config.to_toml_string().unwrap()).unwrap();
        let replay = run_ladder(&round_tripped, solver.as_ref()).unwrap();
        assert_eq!(strip_timing(&report), strip_timing(&replay));
    }

    #[test]
    fn csv_report_has_one_line_per_degree() {
        let mut config = RunConfig::example_default(ExampleKind::GbmDko).unwrap();
        config.run.n_min = 4;
        config.run.n_max = 5;
        config.run.output = OutputFormat::Csv;
        let solver = solver_by_name("clarabel").unwrap();
        let report = run_ladder(&config, solver.as_ref()).unwrap();
        let rendered = report.render();
        let data_lines = rendered
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with('n'))
            .count();
        assert_eq!(data_lines, 2);
        assert!(rendered.contains("# monotonicity: pass"));
    }
}
