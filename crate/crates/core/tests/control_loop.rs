use ter_core::contract::{Bounds, EvalContext, FnObjective, Heuristic, Objective, SolutionState};
use ter_core::controller::{run_policy, ter_optimize, FixedPolicy, PolicyConfig, RandomPolicy};
use ter_core::heuristics::{build_portfolio, HeuristicSettings};
use ter_core::resource::{ResourceKind, ResourceMeter};
use ter_core::{Error, RunRecord};

fn bowl() -> FnObjective<impl FnMut(&[f64]) -> f64> {
    FnObjective::uniform(4, Bounds::new(-5.0, 5.0), |x: &[f64]| {
        x.iter().map(|v| v * v).sum()
    })
}

fn portfolio(names: &[&str], seed: u64) -> Vec<Box<dyn Heuristic>> {
    let b = vec![Bounds::new(-5.0, 5.0); 4];
    build_portfolio(names, &b, &HeuristicSettings::default(), 100.0, seed).unwrap()
}

fn start(f: &mut dyn Objective, meter: &mut ResourceMeter) -> SolutionState {
    meter.consume(1.0);
    SolutionState::evaluated(f, vec![3.0, -2.0, 1.0, 4.0])
}

fn ter_run(names: &[&str], budget: u64, seed: u64) -> RunRecord {
    let mut f = bowl();
    let mut meter = ResourceMeter::evaluations(budget).unwrap();
    let init = start(&mut f, &mut meter);
    let mut hs = portfolio(names, seed);
    let cfg = PolicyConfig::new(0.2, 5, names.len()).unwrap();
    ter_optimize(&mut f, &mut hs, &mut meter, cfg, init, seed)
        .unwrap()
        .1
}

#[test]
fn single_action_matches_fixed_policy() {
    let a = ter_run(&["gs"], 3000, 4);
    let mut f = bowl();
    let mut meter = ResourceMeter::evaluations(3000).unwrap();
    let init = start(&mut f, &mut meter);
    let mut hs = portfolio(&["gs"], 4);
    let mut policy = FixedPolicy {
        action: 0,
        name: "gs".into(),
    };
    let b = run_policy(&mut f, &mut hs, &mut policy, &mut meter, init, 4)
        .unwrap()
        .1;
    assert_eq!(a.curve, b.curve);
    assert_eq!(a.initiations, b.initiations);
    assert!(a.action_sequence.iter().all(|&x| x == 0));
}

#[test]
fn small_budget_gives_one_initiation() {
    let r = ter_run(&["ls1", "cc", "gs"], 40, 1);
    assert_eq!(r.action_sequence.len(), 1);
    assert_eq!(r.consumed, 40.0);
}

#[test]
fn runs_are_deterministic() {
    assert_eq!(
        ter_run(&["ls1", "cc", "gs"], 4000, 9),
        ter_run(&["ls1", "cc", "gs"], 4000, 9)
    );
    assert_ne!(
        ter_run(&["ls1", "cc", "gs"], 4000, 9).action_sequence,
        ter_run(&["ls1", "cc", "gs"], 4000, 10).action_sequence
    );
}

#[test]
fn first_three_cover_all_actions() {
    for seed in 0..50 {
        let r = ter_run(&["ls1", "cc", "gs"], 2000, seed);
        let mut first: Vec<usize> = r.action_sequence[..3].to_vec();
        first.sort();
        assert_eq!(first, vec![0, 1, 2]);
    }
}

struct Idle;

impl Heuristic for Idle {
    fn name(&self) -> &str {
        "idle"
    }

    fn per_initiation_budget(&self) -> f64 {
        10.0
    }

    fn apply(&mut self, _ctx: &mut EvalContext<'_>) {}
}

#[test]
fn idle_heuristic_is_an_error() {
    let mut f = bowl();
    let mut meter = ResourceMeter::evaluations(100).unwrap();
    let init = start(&mut f, &mut meter);
    let mut hs: Vec<Box<dyn Heuristic>> = vec![Box::new(Idle)];
    let err = ter_optimize(
        &mut f,
        &mut hs,
        &mut meter,
        PolicyConfig::new(0.2, 5, 1).unwrap(),
        init,
        0,
    )
    .unwrap_err();
    assert!(
        matches!(err, Error::ZeroConsumption { action: 0, .. }),
        "{err}"
    );
}

#[test]
fn action_count_mismatch_is_rejected() {
    let mut f = bowl();
    let mut meter = ResourceMeter::evaluations(100).unwrap();
    let init = start(&mut f, &mut meter);
    let mut hs = portfolio(&["ls1", "cc"], 0);
    assert!(ter_optimize(
        &mut f,
        &mut hs,
        &mut meter,
        PolicyConfig::new(0.2, 5, 3).unwrap(),
        init,
        0
    )
    .is_err());
}

#[test]
fn random_policy_uses_every_action() {
    let mut f = bowl();
    let mut meter = ResourceMeter::evaluations(5000).unwrap();
    let init = start(&mut f, &mut meter);
    let mut hs = portfolio(&["ls1", "cc", "gs"], 2);
    let mut policy = RandomPolicy { action_count: 3 };
    let (_, r) = run_policy(&mut f, &mut hs, &mut policy, &mut meter, init, 2).unwrap();
    for a in 0..3 {
        assert!(r.action_sequence.contains(&a));
    }
    assert_eq!(r.config.policy, "random");
}

#[test]
fn wall_time_budget_terminates() {
    let mut f = bowl();
    let mut meter = ResourceMeter::new(30.0, ResourceKind::WallTimeMilliseconds).unwrap();
    let init = SolutionState::evaluated(&mut f, vec![1.0; 4]);
    let b = vec![Bounds::new(-5.0, 5.0); 4];
    let settings: HeuristicSettings = HeuristicSettings {
        ls1: ter_core::heuristics::Ls1Config {
            budget: Some(5.0),
            ..Default::default()
        },
        cc: ter_core::heuristics::CcConfig {
            budget: Some(5.0),
            ..Default::default()
        },
        gs: ter_core::heuristics::GsConfig {
            budget: Some(5.0),
            ..Default::default()
        },
    };
    let mut hs = build_portfolio(&["ls1", "cc", "gs"], &b, &settings, 5.0, 0).unwrap();
    let (_, r) = ter_optimize(
        &mut f,
        &mut hs,
        &mut meter,
        PolicyConfig::new(0.2, 5, 3).unwrap(),
        init,
        0,
    )
    .unwrap();
    assert!(r.consumed >= 30.0);
    assert!(!r.action_sequence.is_empty());
    assert!(r.initiations.iter().all(|i| i.cost > 0.0));
}
