//! The main resource-metered loop.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::policy::{PolicyConfig, SelectionPolicy, TerPolicy};
use crate::contract::{EvalContext, Heuristic, Objective, SolutionState};
use crate::error::{Error, Result};
use crate::record::{EfficiencyRecord, RunConfig, RunRecord};
use crate::resource::ResourceMeter;

/// Runs the bandit-controlled portfolio until the meter is exhausted.
///
/// `init` must already be evaluated and its cost charged to `meter`. The
/// controller's random stream is derived from `seed`; heuristics carry their
/// own streams.
pub fn ter_optimize(
    objective: &mut dyn Objective,
    heuristics: &mut [Box<dyn Heuristic>],
    meter: &mut ResourceMeter,
    config: PolicyConfig,
    init: SolutionState,
    seed: u64,
) -> Result<(SolutionState, RunRecord)> {
    if heuristics.len() != config.action_count {
        return Err(Error::InvalidArgument(format!(
            "policy expects {} actions but {} heuristics were given",
            config.action_count,
            heuristics.len()
        )));
    }
    let mut policy = TerPolicy::new(config)?;
    run_policy(objective, heuristics, &mut policy, meter, init, seed)
}

/// The loop shared by every policy: select, initiate with
/// `min(Δt_a, remaining)`, record the efficiency, repeat while budget remains.
pub fn run_policy(
    objective: &mut dyn Objective,
    heuristics: &mut [Box<dyn Heuristic>],
    policy: &mut dyn SelectionPolicy,
    meter: &mut ResourceMeter,
    init: SolutionState,
    seed: u64,
) -> Result<(SolutionState, RunRecord)> {
    if heuristics.is_empty() {
        return Err(Error::InvalidArgument(
            "no heuristics to choose from".into(),
        ));
    }
    if init.x_best.len() != objective.dimension() {
        return Err(Error::InvalidArgument(format!(
            "initial point has dimension {}, objective expects {}",
            init.x_best.len(),
            objective.dimension()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = meter.kind();
    let initial_value = init.y_best;
    let mut incumbent = init;

    let mut action_sequence = Vec::new();
    let mut initiations = Vec::new();
    let mut curve = vec![(meter.consumed(), incumbent.y_best)];

    while !meter.is_exhausted() {
        let action = policy.select(&mut rng);
        let heuristic = heuristics.get_mut(action).ok_or_else(|| {
            Error::ContractViolation(format!("policy chose unknown action {action}"))
        })?;
        let allowance = meter.allowance(heuristic.per_initiation_budget());
        if allowance <= 0.0 {
            // Fractional remainder of an evaluation budget.
            break;
        }

        let y_before = incumbent.y_best;
        let mut ctx = EvalContext::new(objective, &mut incumbent, kind, allowance);
        heuristic.apply(&mut ctx);
        let cost = ctx.consumed();
        if cost.is_nan() || cost <= 0.0 {
            return Err(Error::ZeroConsumption {
                action,
                name: heuristic.name().to_owned(),
            });
        }
        meter.consume(cost);

        let record = EfficiencyRecord::new(action, y_before - incumbent.y_best, cost)?;
        policy.observe(&record);
        action_sequence.push(action);
        initiations.push(record);
        curve.push((meter.consumed(), incumbent.y_best));
    }

    let knobs = policy.knobs();
    let overall_improvement = initial_value - incumbent.y_best;
    let record = RunRecord {
        action_sequence,
        curve,
        initiations,
        initial_value,
        final_value: incumbent.y_best,
        overall_improvement,
        overall_efficiency: overall_improvement / meter.consumed(),
        consumed: meter.consumed(),
        seed,
        config: RunConfig {
            policy: policy.label(),
            tau: knobs.map(|k| k.0),
            window: knobs.map(|k| k.1),
            heuristics: heuristics.iter().map(|h| h.name().to_owned()).collect(),
            budget: meter.budget(),
            resource: kind,
            problem: None,
            dimension: objective.dimension(),
        },
    };
    Ok((incumbent, record))
}
