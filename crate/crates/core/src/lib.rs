//! Resource-metered blackbox optimization with a windowed-efficiency bandit
//! that picks among heuristics, plus a benchmark harness.
//!
//! ```
//! use ter_core::{exploration_bounds};
//!
//! let b = exploration_bounds(3, 5, 0.2).unwrap();
//! assert!((b.complement_lower - 0.013297).abs() < 1e-6);
//! ```

pub mod benchmarks;
pub mod contract;
pub mod controller;
pub mod error;
pub mod harness;
pub mod heuristics;
pub mod record;
pub mod resource;

pub use benchmarks::{make_problem, BenchmarkProblem, FunctionId, ShiftSource};
pub use contract::{Bounds, EvalContext, FnObjective, Heuristic, Objective, SolutionState};
pub use controller::{
    exploration_bounds, run_policy, solve_hyperparameters, ter_optimize, ExplorationBounds,
    HyperparameterCandidate, PolicyConfig,
};
pub use error::{Error, Result};
pub use record::{EfficiencyRecord, RunConfig, RunRecord};
pub use resource::{ResourceKind, ResourceMeter};
