//! Seeded experiment grid: problems x policies x runs.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::align::AlignmentScoring;
use super::report::{build_report, write_report, ComparisonReport};
use crate::benchmarks::{make_problem, FunctionId, ShiftSource};
use crate::contract::{Objective, SolutionState};
use crate::controller::{
    run_policy, FixedPolicy, PolicyConfig, RandomPolicy, SelectionPolicy, TerPolicy, DEFAULT_TAU,
    DEFAULT_WINDOW,
};
use crate::error::{Error, Result};
use crate::heuristics::{
    build_portfolio, HeuristicSettings, EVALUATIONS_PER_DIMENSION, HEURISTIC_NAMES,
};
use crate::record::RunRecord;
use crate::resource::{ResourceKind, ResourceMeter};

/// Environment variable holding the worker count for parallel runs.
pub const WORKERS_ENV: &str = "TER_WORKERS";

/// Default `c` in a budget of `c * D` evaluations.
pub const DEFAULT_BUDGET_FACTOR: f64 = 5000.0;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicySpec {
    Ter,
    Random,
    Single(String),
}

impl PolicySpec {
    /// The baselines plus one single-heuristic policy per name.
    pub fn standard_set<S: AsRef<str>>(heuristics: &[S]) -> Vec<PolicySpec> {
        let mut v = vec![PolicySpec::Ter, PolicySpec::Random];
        v.extend(
            heuristics
                .iter()
                .map(|h| PolicySpec::Single(h.as_ref().to_owned())),
        );
        v
    }

    /// Path-safe form, e.g. `single-ls1`.
    pub fn slug(&self) -> String {
        self.to_string().replace(':', "-")
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpec::Ter => f.write_str("ter"),
            PolicySpec::Random => f.write_str("random"),
            PolicySpec::Single(h) => write!(f, "single:{h}"),
        }
    }
}

impl FromStr for PolicySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ter" => Ok(PolicySpec::Ter),
            "random" | "ran" => Ok(PolicySpec::Random),
            other => match other.split_once(':') {
                Some(("single", h)) if HEURISTIC_NAMES.contains(&h) => {
                    Ok(PolicySpec::Single(h.to_owned()))
                }
                _ => Err(Error::InvalidArgument(format!(
                    "unknown policy `{other}` (expected ter, random or single:<{}>)",
                    HEURISTIC_NAMES.join("|")
                ))),
            },
        }
    }
}

impl TryFrom<String> for PolicySpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PolicySpec> for String {
    fn from(p: PolicySpec) -> String {
        p.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetRule {
    /// `c * D` units.
    PerDimension(f64),
    Absolute(f64),
}

impl Default for BudgetRule {
    fn default() -> Self {
        BudgetRule::PerDimension(DEFAULT_BUDGET_FACTOR)
    }
}

impl BudgetRule {
    pub fn resolve(self, dimension: usize) -> f64 {
        match self {
            BudgetRule::PerDimension(c) => c * dimension as f64,
            BudgetRule::Absolute(b) => b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub function: FunctionId,
    pub dimension: usize,
}

impl ProblemSpec {
    pub fn new(function: FunctionId, dimension: usize) -> Self {
        Self {
            function,
            dimension,
        }
    }

    /// Directory name, e.g. `sphere-d100`.
    pub fn slug(&self) -> String {
        format!("{}-d{}", self.function, self.dimension)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problems: Vec<ProblemSpec>,
    pub policies: Vec<PolicySpec>,
    pub tau: f64,
    pub window: usize,
    /// Action set, in order.
    pub heuristics: Vec<String>,
    pub settings: HeuristicSettings,
    pub budget: BudgetRule,
    pub resource: ResourceKind,
    /// Default per-initiation allowance; `None` means 25 evaluations per
    /// dimension. Per-heuristic `budget` settings take precedence.
    pub per_initiation: Option<f64>,
    pub runs: usize,
    pub base_seed: u64,
    pub shift: ShiftSource,
    pub out_dir: Option<PathBuf>,
    /// Worker threads; `None` defers to `TER_WORKERS`, then to rayon.
    pub workers: Option<usize>,
    pub scoring: AlignmentScoring,
    pub alpha: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problems: Vec::new(),
            policies: vec![PolicySpec::Ter],
            tau: DEFAULT_TAU,
            window: DEFAULT_WINDOW,
            heuristics: HEURISTIC_NAMES.iter().map(|s| s.to_string()).collect(),
            settings: HeuristicSettings::default(),
            budget: BudgetRule::default(),
            resource: ResourceKind::EvaluationCount,
            per_initiation: None,
            runs: 1,
            base_seed: 0,
            shift: ShiftSource::Seed(0),
            out_dir: None,
            workers: None,
            scoring: AlignmentScoring::default(),
            alpha: 0.05,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() {
            return Err(Error::InvalidArgument("no problems configured".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::InvalidArgument("no policies configured".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidArgument("runs must be at least 1".into()));
        }
        if self.heuristics.is_empty() {
            return Err(Error::InvalidArgument("the heuristic set is empty".into()));
        }
        if let Some(h) = self
            .heuristics
            .iter()
            .find(|h| !HEURISTIC_NAMES.contains(&h.as_str()))
        {
            return Err(Error::InvalidArgument(format!("unknown heuristic `{h}`")));
        }
        if self.problems.iter().any(|p| p.dimension == 0) {
            return Err(Error::InvalidArgument(
                "dimension must be at least 1".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if let Some(p) = self.per_initiation {
            if p.is_nan() || p <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "per-initiation allowance must be positive, got {p}"
                )));
            }
        }
        self.scoring.validate()?;
        for p in &self.policies {
            if p == &PolicySpec::Ter {
                PolicyConfig::new(self.tau, self.window, self.heuristics.len())?;
            }
        }
        Ok(())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.runs as u64).map(|i| self.base_seed.wrapping_add(i))
    }
}

/// Everything `run_experiment` produced.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub records: Vec<RunRecord>,
    pub report: ComparisonReport,
}

/// Starting point for a run: uniform in the box, drawn from a stream that
/// depends only on the seed, so every policy starts from the same `x0`.
pub fn initial_point(objective: &dyn Objective, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5851_f42d_4c95_7f2d);
    objective
        .bounds()
        .iter()
        .map(|b| rng.random_range(b.lower..=b.upper))
        .collect()
}

/// One seeded run of one policy on one problem.
pub fn run_single(
    config: &ExperimentConfig,
    problem: ProblemSpec,
    policy: &PolicySpec,
    seed: u64,
) -> Result<RunRecord> {
    let mut objective = make_problem(problem.function, problem.dimension, &config.shift)?;
    let budget = config.budget.resolve(problem.dimension);
    let mut meter = ResourceMeter::new(budget, config.resource)?;
    let default_budget = config
        .per_initiation
        .unwrap_or(EVALUATIONS_PER_DIMENSION * problem.dimension as f64);

    let x0 = initial_point(&objective, seed);
    let started = Instant::now();
    let init = SolutionState::evaluated(&mut objective, x0);
    meter.consume(match config.resource {
        ResourceKind::EvaluationCount => 1.0,
        ResourceKind::WallTimeMilliseconds => started.elapsed().as_secs_f64() * 1e3,
    });

    let names: Vec<String> = match policy {
        PolicySpec::Single(h) => vec![h.clone()],
        _ => config.heuristics.clone(),
    };
    let mut portfolio = build_portfolio(
        &names,
        objective.bounds(),
        &config.settings,
        default_budget,
        seed,
    )?;
    let mut selector: Box<dyn SelectionPolicy> = match policy {
        PolicySpec::Ter => Box::new(TerPolicy::new(PolicyConfig::new(
            config.tau,
            config.window,
            names.len(),
        )?)?),
        PolicySpec::Random => Box::new(RandomPolicy {
            action_count: names.len(),
        }),
        PolicySpec::Single(h) => Box::new(FixedPolicy {
            action: 0,
            name: h.clone(),
        }),
    };

    let (_, mut record) = run_policy(
        &mut objective,
        &mut portfolio,
        selector.as_mut(),
        &mut meter,
        init,
        seed,
    )?;
    record.config.problem = Some(problem.function.name().to_owned());
    Ok(record)
}

/// `runs/<problem>-d<D>/<policy>/run-<seed>.{json,csv}` under `root`.
pub fn record_path(root: &Path, record: &RunRecord) -> PathBuf {
    let problem = record.config.problem.as_deref().unwrap_or("problem");
    root.join("runs")
        .join(format!("{problem}-d{}", record.config.dimension))
        .join(record.config.policy.replace(':', "-"))
        .join(format!("run-{}.json", record.seed))
}

pub fn persist_record(root: &Path, record: &RunRecord) -> Result<()> {
    let path = record_path(root, record);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    record.write_json(&path)?;
    record.write_curve_csv(&path.with_extension("csv"))
}

/// Loads every persisted run record under `root/runs`.
pub fn load_records(root: &Path) -> Result<Vec<RunRecord>> {
    fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
        let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        entries.sort();
        for path in entries {
            if path.is_dir() {
                walk(&path, out)?;
            } else if path.extension().is_some_and(|e| e == "json") {
                out.push(path);
            }
        }
        Ok(())
    }
    let runs = root.join("runs");
    if !runs.is_dir() {
        return Err(Error::Format(format!(
            "{} holds no run records",
            root.display()
        )));
    }
    let mut paths = Vec::new();
    walk(&runs, &mut paths)?;
    paths.iter().map(|p| RunRecord::read_json(p)).collect()
}

/// Fails with an I/O error unless `dir` can be created and written to.
fn check_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let probe = dir.join(".ter-write-probe");
    fs::write(&probe, b"")?;
    fs::remove_file(&probe)?;
    Ok(())
}

fn worker_count(config: &ExperimentConfig) -> Result<Option<usize>> {
    if let Some(n) = config.workers {
        return Ok(Some(n.max(1)));
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|n| Some(n.max(1)))
            .map_err(|_| {
                Error::InvalidArgument(format!("{WORKERS_ENV} must be an integer, got `{v}`"))
            }),
        Err(_) => Ok(None),
    }
}

/// Runs every (problem, policy, seed) cell, persists the records when an
/// output directory is set, and builds the comparison report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    if let Some(dir) = &config.out_dir {
        check_writable(dir)?;
    }

    let jobs: Vec<(ProblemSpec, &PolicySpec, u64)> = config
        .problems
        .iter()
        .flat_map(|&p| {
            config
                .policies
                .iter()
                .flat_map(move |pol| config.seeds().map(move |s| (p, pol, s)))
        })
        .collect();

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count(config)? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    let records: Vec<RunRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, pol, seed)| run_single(config, p, pol, seed))
            .collect::<Result<_>>()
    })?;

    let report = build_report(&records, &config.scoring, config.alpha)?;
    if let Some(dir) = &config.out_dir {
        for r in &records {
            persist_record(dir, r)?;
        }
        write_report(dir, &report, &records)?;
    }
    Ok(ExperimentOutcome { records, report })
}
