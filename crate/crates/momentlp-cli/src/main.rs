//! `momentlp`: price-bound ladders for double-barrier contracts under
//! polynomial jump-diffusions.
//!
//! Verbs: `price` solves the LP ladder of a run configuration and prints
//! the convergence table; `oracle` runs only the reference price (Monte
//! Carlo or closed form); `export-lp` writes the assembled programs as MPS
//! files for external solvers; `selftest` runs the built-in invariant
//! suite.
//!
//! Exit codes: 0 on full success, 1 when the run completed but some rows or
//! checks failed, 2 when the run could not start (bad configuration or
//! arguments).  The `MOMENTLP_SOLVER` environment variable picks the LP
//! backend (`clarabel` or `simplex`); `--solver` overrides it.

mod config;
mod report;
mod selftest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use momentlp::lp::mps::mps_string;
use momentlp::lp::{build_lp_pair, default_solver, solver_by_name, LpSolver};
use momentlp::{Error, Result};

use crate::config::{ExampleKind, OracleKind, OutputFormat, RunConfig};
use crate::report::Reference;

#[derive(Parser)]
#[command(
    name = "momentlp",
    version,
    about = "Guaranteed price bounds for double-barrier options via moment linear programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the bound ladder of a configuration and print the convergence
    /// table.
    Price(RunArgs),
    /// Run only the oracle (Monte Carlo or closed form) of a configuration.
    Oracle(RunArgs),
    /// Write the LP pair at every degree in the range as MPS files.
    ExportLp {
        #[command(flatten)]
        args: RunArgs,
        /// Output directory for the .mps files.
        #[arg(long, default_value = "lp-export")]
        out_dir: PathBuf,
    },
    /// Run the built-in invariant suite.
    Selftest,
}

/// Run description; every flag overrides the corresponding configuration
/// file entry.
#[derive(Args)]
struct RunArgs {
    /// Configuration file (TOML).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Built-in example to run (defaults apply when no --config is given).
    #[arg(long, value_enum)]
    example: Option<ExampleKind>,
    /// Smallest truncation degree of the ladder.
    #[arg(long)]
    n_min: Option<u32>,
    /// Largest truncation degree of the ladder.
    #[arg(long)]
    n_max: Option<u32>,
    /// Reference price the table's relative errors are computed against.
    #[arg(long, value_enum)]
    oracle: Option<OracleKind>,
    /// Table format.
    #[arg(long, value_enum)]
    output: Option<OutputFormat>,
    /// Jump knockouts: discount by the constant factor e^{-lambda* T}
    /// outside the LP instead of killing inside it.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    p_star_shortcut: Option<bool>,
    /// Override one [params] entry, e.g. --set sigma=0.3 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Monte Carlo path count.
    #[arg(long)]
    paths: Option<u64>,
    /// Monte Carlo grid resolution.
    #[arg(long)]
    steps_per_year: Option<u32>,
    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo antithetic pairing.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    antithetic: Option<bool>,
    /// LP backend (clarabel | simplex); overrides $MOMENTLP_SOLVER.
    #[arg(long)]
    solver: Option<String>,
    /// Write the effective configuration (defaults merged with overrides)
    /// to a file before running.
    #[arg(long, value_name = "FILE")]
    emit_config: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Price(args) => price(args),
        Command::Oracle(args) => oracle(args),
        Command::ExportLp { args, out_dir } => export_lp(args, out_dir),
        Command::Selftest => Ok(run_selftest()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn resolve_config(args: &RunArgs) -> Result<RunConfig> {
    let mut config = match (&args.config, args.example) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(example)) => RunConfig::example_default(example)?,
        (None, None) => return Err(Error::config("need --config FILE or --example NAME")),
    };
    if let Some(example) = args.example {
        config.run.example = example;
    }
    if let Some(n) = args.n_min {
        config.run.n_min = n;
    }
    if let Some(n) = args.n_max {
        config.run.n_max = n;
    }
    if let Some(oracle) = args.oracle {
        config.run.oracle = oracle;
    }
    if let Some(output) = args.output {
        config.run.output = output;
    }
    if let Some(flag) = args.p_star_shortcut {
        config.run.p_star_shortcut = flag;
    }
    if let Some(paths) = args.paths {
        config.mc.paths = paths;
    }
    if let Some(steps) = args.steps_per_year {
        config.mc.steps_per_year = steps;
    }
    if let Some(seed) = args.seed {
        config.mc.seed = seed;
    }
    if let Some(flag) = args.antithetic {
        config.mc.antithetic = flag;
    }
    for assignment in &args.set {
        config.set_param(assignment)?;
    }
    config.validate()?;
    Ok(config)
}

fn resolve_solver(args: &RunArgs) -> Result<Box<dyn LpSolver>> {
    match &args.solver {
        Some(name) => solver_by_name(name),
        None => default_solver(),
    }
}

fn emit_config_if_requested(args: &RunArgs, config: &RunConfig) -> Result<()> {
    if let Some(path) = &args.emit_config {
        fs::write(path, config.to_toml_string()?)
            .map_err(|e| Error::config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn price(args: &RunArgs) -> Result<ExitCode> {
    let config = resolve_config(args)?;
    emit_config_if_requested(args, &config)?;
    let solver = resolve_solver(args)?;
    let report = report::run_ladder(&config, solver.as_ref())?;
    print!("{}", report.render());
    Ok(if report.all_rows_succeeded() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn oracle(args: &RunArgs) -> Result<ExitCode> {
    let config = resolve_config(args)?;
    emit_config_if_requested(args, &config)?;
    if config.run.oracle == OracleKind::None {
        return Err(Error::config(
            "the oracle verb needs oracle = \"mc\" or \"exact\" (set it or pass --oracle)",
        ));
    }
    let problem = config.build_problem()?;
    let reference = report::resolve_reference(&config, &problem)?
        .expect("oracle kind checked above");
    println!("example : {}", problem.name);
    match reference {
        Reference::Exact(value) => println!("exact   : {value:.6}"),
        Reference::Mc(mc) => {
            println!("mc      : {:.6}", mc.estimate);
            println!("std err : {:.6}", mc.std_error);
            println!("paths   : {}", mc.paths_used);
            // Show the gap in SE units when a closed form also exists.
            if let Ok(exact) = config.exact_reference() {
                let gap = (mc.estimate - exact).abs();
                println!(
                    "exact   : {exact:.6}  (|diff| = {gap:.6}, {:.2} SE)",
                    gap / mc.std_error
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn export_lp(args: &RunArgs, out_dir: &Path) -> Result<ExitCode> {
    let config = resolve_config(args)?;
    emit_config_if_requested(args, &config)?;
    let problem = config.build_problem()?;
    fs::create_dir_all(out_dir)
        .map_err(|e| Error::config(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut failures = 0usize;
    for n in config.n_values() {
        match build_lp_pair(
            &problem.model,
            &problem.exit_pieces,
            &problem.occupation,
            &problem.objective,
            n,
        ) {
            Ok((min, max)) => {
                for (lp, sense) in [(&min, "min"), (&max, "max")] {
                    let name = format!("{}-n{n:02}-{sense}", problem.name);
                    let path = out_dir.join(format!("{name}.mps"));
                    fs::write(&path, mps_string(lp, &name)).map_err(|e| {
                        Error::config(format!("cannot write {}: {e}", path.display()))
                    })?;
                    println!("wrote {}", path.display());
                }
            }
            Err(e) => {
                eprintln!("N = {n}: {e}");
                failures += 1;
            }
        }
    }
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_selftest() -> ExitCode {
    let checks = selftest::run_all();
    let mut failed = 0usize;
    for check in &checks {
        match &check.outcome {
            Ok(detail) => println!("ok      {}: {detail}", check.name),
            Err(e) => {
                failed += 1;
                println!("FAILED  {}: {e}", check.name);
            }
        }
    }
    println!("{} checks, {failed} failed", checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
