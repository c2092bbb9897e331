use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ter_core::benchmarks::{FunctionId, ShiftSource};
use ter_core::controller::{
    exploration_bounds, solve_hyperparameters, DEFAULT_TAU, DEFAULT_WINDOW,
};
use ter_core::harness::{
    build_report, load_records, run_experiment, write_report, AlignmentScoring, BudgetRule,
    ComparisonReport, ExperimentConfig, FileConfig, PolicySpec, ProblemSpec, DEFAULT_BUDGET_FACTOR,
};
use ter_core::heuristics::HEURISTIC_NAMES;
use ter_core::resource::ResourceKind;

/// Windowed-efficiency heuristic selection for blackbox optimization.
#[derive(Debug, Parser)]
#[command(name = "ter", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run seeded experiments on the benchmark functions.
    Run(Box<RunArgs>),
    /// Exploration-probability bounds for a policy setting.
    Bounds {
        #[arg(long)]
        actions: usize,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        window: usize,
    },
    /// Integer <tau, window> settings meeting an exploitation target.
    SolveHparams {
        #[arg(long)]
        pmin: f64,
        #[arg(long)]
        pmax: f64,
        #[arg(long)]
        actions: usize,
    },
    /// Rebuild the report from persisted run records.
    Report {
        #[arg(long = "in", value_name = "DIR")]
        input: PathBuf,
        /// Alignment scoring and other settings.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Benchmark functions (`f1`..`f6` or names), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    problem: Vec<FunctionId>,
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "100")]
    dim: Vec<usize>,
    /// Budget of `factor * D` evaluations.
    #[arg(long, conflicts_with = "budget")]
    budget_factor: Option<f64>,
    /// Absolute budget, overriding the per-dimension rule.
    #[arg(long)]
    budget: Option<f64>,
    /// Policies (`ter`, `random`, `single:<heuristic>`, or `all`), comma separated.
    #[arg(long, value_delimiter = ',', default_value = "ter")]
    policy: Vec<String>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    window: Option<usize>,
    /// Heuristic set, in order, comma separated.
    #[arg(long, value_delimiter = ',')]
    heuristics: Option<Vec<String>>,
    /// Per-initiation allowance; defaults to 25 evaluations per dimension.
    #[arg(long)]
    per_initiation: Option<f64>,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Base seed; run `i` uses `seed + i`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    shift_seed: u64,
    /// Shift vector file, one value per line; overrides `--shift-seed`.
    #[arg(long)]
    shift_file: Option<PathBuf>,
    /// Meter wall-clock milliseconds instead of evaluations.
    #[arg(long)]
    wall_time: bool,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// TOML or JSON file with tau, window, heuristics and per-heuristic sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (also read from TER_WORKERS).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

fn parse_policies(raw: &[String], heuristics: &[String]) -> Result<Vec<PolicySpec>> {
    let mut out = Vec::new();
    for p in raw {
        if p == "all" {
            out.extend(PolicySpec::standard_set(heuristics));
        } else {
            out.push(p.parse::<PolicySpec>()?);
        }
    }
    out.dedup();
    Ok(out)
}

fn experiment_config(args: Box<RunArgs>) -> Result<ExperimentConfig> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => FileConfig::default(),
    };
    let heuristics = args
        .heuristics
        .or(file.heuristics)
        .unwrap_or_else(|| HEURISTIC_NAMES.iter().map(|s| s.to_string()).collect());
    let policies = parse_policies(&args.policy, &heuristics)?;
    let budget = match (args.budget, args.budget_factor) {
        (Some(b), _) => BudgetRule::Absolute(b),
        (None, f) => BudgetRule::PerDimension(f.unwrap_or(DEFAULT_BUDGET_FACTOR)),
    };
    if args.dim.is_empty() {
        bail!("--dim needs at least one value");
    }
    let problems = args
        .problem
        .iter()
        .flat_map(|&f| args.dim.iter().map(move |&d| ProblemSpec::new(f, d)))
        .collect();
    Ok(ExperimentConfig {
        problems,
        policies,
        tau: args.tau.or(file.tau).unwrap_or(DEFAULT_TAU),
        window: args.window.or(file.window).unwrap_or(DEFAULT_WINDOW),
        heuristics,
        settings: file.settings,
        budget,
        resource: if args.wall_time {
            ResourceKind::WallTimeMilliseconds
        } else {
            ResourceKind::EvaluationCount
        },
        per_initiation: args.per_initiation,
        runs: args.runs,
        base_seed: args.seed,
        shift: match args.shift_file {
            Some(p) => ShiftSource::File(p),
            None => ShiftSource::Seed(args.shift_seed),
        },
        out_dir: args.out,
        workers: args.workers,
        scoring: file.alignment.unwrap_or_default(),
        alpha: args.alpha,
    })
}

fn print_report(report: &ComparisonReport) {
    println!(
        "{:<14} {:>5} {:<12} {:>4} {:>12} {:>12} {:>7}",
        "problem", "dim", "policy", "runs", "mean", "std", "length"
    );
    for c in &report.cells {
        println!(
            "{:<14} {:>5} {:<12} {:>4} {:>12.4e} {:>12.4e} {:>7.1}",
            c.problem, c.dimension, c.policy, c.runs, c.mean, c.std, c.mean_sequence_length
        );
    }
    for cmp in &report.comparisons {
        if !cmp.cells.is_empty() {
            println!(
                "t-test {} vs {}: {} (</~/>)",
                cmp.first, cmp.second, cmp.summary
            );
        }
    }
    if let Some(f) = &report.friedman {
        let ranks: Vec<String> = f
            .policies
            .iter()
            .zip(&f.mean_ranks)
            .map(|(p, r)| format!("{p}={r:.2}"))
            .collect();
        println!(
            "friedman chi2={:.4} p={:.4e} ranks: {}",
            f.statistic,
            f.p_value,
            ranks.join(" ")
        );
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let config = experiment_config(args)?;
            let out = run_experiment(&config)?;
            print_report(&out.report);
            if let Some(dir) = &config.out_dir {
                println!(
                    "wrote {} run records and report to {}",
                    out.records.len(),
                    dir.display()
                );
            }
        }
        Command::Bounds {
            actions,
            tau,
            window,
        } => {
            let b = exploration_bounds(actions, window, tau)?;
            println!("actions={actions} tau={tau} window={window}");
            println!("lower            {:.10}", b.lower);
            println!("upper            {:.10}", b.upper);
            println!("complement_lower {:.10}", b.complement_lower);
            println!(
                "{}",
                json!({
                    "actions": actions, "tau": tau, "window": window,
                    "lower": b.lower, "upper": b.upper, "complement_lower": b.complement_lower,
                })
            );
        }
        Command::SolveHparams {
            pmin,
            pmax,
            actions,
        } => {
            let sols = solve_hyperparameters(pmin, pmax, actions);
            if sols.is_empty() {
                println!("no integer <tau, window> setting meets [{pmin}, {pmax}] with {actions} actions");
            }
            for s in &sols {
                println!(
                    "tau=1/{} window={} exploitation_ceiling={:.6} exploration_floor={:.6}",
                    s.inverse_tau, s.window, s.exploitation_ceiling, s.exploration_floor
                );
            }
            let list: Vec<_> = sols
                .iter()
                .map(|s| {
                    json!({
                        "tau": s.tau, "inverse_tau": s.inverse_tau, "window": s.window,
                        "exploitation_ceiling": s.exploitation_ceiling,
                        "exploration_floor": s.exploration_floor,
                    })
                })
                .collect();
            println!(
                "{}",
                json!({ "pmin": pmin, "pmax": pmax, "actions": actions, "solutions": list })
            );
        }
        Command::Report {
            input,
            config,
            alpha,
        } => {
            let scoring = match config {
                Some(p) => FileConfig::load(&p)?.alignment.unwrap_or_default(),
                None => AlignmentScoring::default(),
            };
            let records = load_records(&input)?;
            let report = build_report(&records, &scoring, alpha)?;
            write_report(&input, &report, &records)?;
            print_report(&report);
            println!(
                "wrote report for {} run records to {}",
                records.len(),
                input.join("report").display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
