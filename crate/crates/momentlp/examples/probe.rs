use momentlp::contracts::{vg_double_knockout, DiscountMode, VgDkoParams};
use momentlp::lp::{build_lp_pair, solver_by_name};

fn main() {
    let setup = vg_double_knockout(&VgDkoParams::default(), DiscountMode::Killed).unwrap();
    let clarabel = solver_by_name("clarabel").unwrap();
    let simplex = solver_by_name("simplex").unwrap();
    for n in [8u32] {
        let (min_lp, max_lp) = build_lp_pair(
            &setup.model,
            &setup.exit_pieces,
            &setup.occupation,
            &setup.objective,
            n,
        )
        .unwrap();
        for (lp, name) in [(&min_lp, "min"), (&max_lp, "max")] {
            for (solver, sname) in [(&clarabel, "clarabel"), (&simplex, "simplex")] {
                let out = solver.solve(&lp.as_problem()).unwrap();
                let (viol, label) = match &out.solution {
                    Some(x) => lp.max_violation(x),
                    None => (f64::NAN, "none".to_string()),
                };
                println!(
                    "N={n} {name} {sname:9} status={:?} obj={:?} maxviol={viol:.3e} at {label}",
                    out.status, out.objective
                );
            }
        }
    }
}
