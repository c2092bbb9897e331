use proptest::prelude::*;

use ter_core::benchmarks::{BenchmarkProblem, FunctionId};
use ter_core::controller::{
    action_means, action_probabilities, normalize_window, softmax, PolicyConfig, WindowMemory,
};
use ter_core::harness::{
    build_report, run_single, similarity_matrix, smith_waterman, AlignmentScoring, BudgetRule,
    ExperimentConfig, PolicySpec, ProblemSpec,
};
use ter_core::heuristics::{build_portfolio, HeuristicSettings};
use ter_core::record::EfficiencyRecord;
use ter_core::{ter_optimize, Bounds, FnObjective, Objective, ResourceMeter, SolutionState};

fn function() -> impl Strategy<Value = FunctionId> {
    prop::sample::select(FunctionId::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn functions_are_nonnegative(f in function(), z in prop::collection::vec(-1.0f64..1.0, 1..30), scale in 0.0f64..1.0) {
        let z: Vec<f64> = z.iter().map(|v| v * scale * f.half_width()).collect();
        prop_assert!(f.value(&z) >= 0.0);
    }

    #[test]
    fn translation_is_exact(
        f in function(),
        // Dyadic values keep x - o exact in binary floating point.
        x in prop::collection::vec(-64i32..64, 1..12),
        o in prop::collection::vec(-64i32..64, 12),
        d in prop::collection::vec(-64i32..64, 12),
    ) {
        let n = x.len();
        let q = |v: i32| f64::from(v) / 8.0;
        let x: Vec<f64> = x.iter().map(|&v| q(v)).collect();
        let o: Vec<f64> = o[..n].iter().map(|&v| q(v)).collect();
        let d: Vec<f64> = d[..n].iter().map(|&v| q(v)).collect();
        let mut a = BenchmarkProblem::with_shift(f, o.clone()).unwrap();
        let mut b = BenchmarkProblem::with_shift(f, o.iter().zip(&d).map(|(u, v)| u + v).collect()).unwrap();
        let xd: Vec<f64> = x.iter().zip(&d).map(|(u, v)| u + v).collect();
        prop_assert_eq!(a.evaluate(&x).unwrap(), b.evaluate(&xd).unwrap());
    }

    #[test]
    fn counter_is_exact(f in function(), n in 0usize..50) {
        let mut p = BenchmarkProblem::with_shift(f, vec![0.0; 3]).unwrap();
        for _ in 0..n {
            p.evaluate(&[0.5, 0.5, 0.5]).unwrap();
        }
        prop_assert_eq!(p.evaluations(), n as u64);
    }

    #[test]
    fn softmax_is_permutation_equivariant(
        means in prop::collection::vec(0.0f64..=1.0, 2..8),
        tau in 0.05f64..5.0,
        rot in 0usize..8,
    ) {
        let p = softmax(&means, tau);
        let k = rot % means.len();
        let mut rotated = means.clone();
        rotated.rotate_left(k);
        let mut expect = p.clone();
        expect.rotate_left(k);
        for (a, b) in softmax(&rotated, tau).iter().zip(&expect) {
            prop_assert!((a - b).abs() < 1e-15);
        }
        let arg = (0..means.len()).max_by(|&i, &j| means[i].total_cmp(&means[j])).unwrap();
        let distinct = means.iter().filter(|&&m| m == means[arg]).count() == 1;
        if distinct {
            prop_assert!((0..means.len()).all(|i| i == arg || p[i] < p[arg]));
        }
    }

    #[test]
    fn infinite_means_are_explored_first(
        finite in prop::collection::vec(0.0f64..=1.0, 1..5),
        missing in prop::collection::vec(any::<bool>(), 5),
    ) {
        let means: Vec<f64> = finite
            .iter()
            .zip(&missing)
            .map(|(&m, &gone)| if gone { f64::INFINITY } else { m })
            .collect();
        let p = action_probabilities(&means, 0.2);
        let infinite = means.iter().filter(|m| m.is_infinite()).count();
        for (m, pi) in means.iter().zip(&p) {
            if infinite > 0 {
                let expect = if m.is_infinite() { 1.0 / infinite as f64 } else { 0.0 };
                prop_assert!((pi - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn means_come_from_the_window_only(
        recs in prop::collection::vec((0usize..3, 0.0f64..10.0), 1..30),
        w in 1usize..10,
    ) {
        let mut m = WindowMemory::new(w).unwrap();
        for &(a, e) in &recs {
            m.push(EfficiencyRecord::new(a, e, 1.0).unwrap());
        }
        let means = action_means(&normalize_window(&m), 3);
        for (a, mean) in means.iter().enumerate() {
            let present = m.iter().any(|r| r.action == a);
            prop_assert_eq!(present, mean.is_finite());
        }
    }

    #[test]
    fn alignment_is_symmetric_and_bounded(
        a in prop::collection::vec(0usize..3, 0..25),
        b in prop::collection::vec(0usize..3, 0..25),
    ) {
        let s = AlignmentScoring::default();
        let ab = smith_waterman(&a, &b, &s);
        prop_assert_eq!(ab, smith_waterman(&b, &a, &s));
        prop_assert!(ab >= 0.0 && ab <= 2.0 * a.len().min(b.len()) as f64);
        let m = similarity_matrix(&[vec![a.clone()], vec![b.clone()]], &s).unwrap();
        prop_assert_eq!(m.raw[0][1], m.raw[1][0]);
    }
}

/// Quadratic with integer-valued efficiencies that exercises the loop cheaply.
fn bowl(d: usize) -> FnObjective<impl FnMut(&[f64]) -> f64> {
    FnObjective::uniform(d, Bounds::new(-10.0, 10.0), |x: &[f64]| {
        x.iter().map(|v| (v - 1.5).powi(2)).sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn run_records_are_consistent(seed in any::<u64>(), budget in 50u64..3000, tau in 0.05f64..1.0, w in 1usize..9) {
        let mut f = bowl(3);
        let settings = HeuristicSettings::default();
        let mut hs = build_portfolio(&["ls1", "cc", "gs"], f.bounds(), &settings, 75.0, seed).unwrap();
        let mut meter = ResourceMeter::evaluations(budget).unwrap();
        let init = SolutionState::evaluated(&mut f, vec![9.0, -9.0, 4.0]);
        meter.consume(1.0);
        let (inc, rec) = ter_optimize(&mut f, &mut hs, &mut meter, PolicyConfig::new(tau, w, 3).unwrap(), init, seed).unwrap();

        // Telescoping.
        let total: f64 = rec.initiations.iter().map(|r| r.improvement).sum();
        prop_assert!((total - rec.overall_improvement).abs() <= 1e-9 * rec.initial_value.abs().max(1.0));
        // Efficiency times resources.
        prop_assert!((rec.overall_efficiency * rec.consumed - rec.overall_improvement).abs() <= 1e-9 * rec.overall_improvement.max(1.0));
        // Monotone curve ending at the final value.
        prop_assert!(rec.curve.windows(2).all(|p| p[1].1 <= p[0].1 && p[1].0 > p[0].0));
        prop_assert_eq!(rec.curve.last().unwrap().1, rec.final_value);
        prop_assert_eq!(inc.y_best, rec.final_value);
        // Overshoot bounded by one allotment.
        prop_assert!(rec.consumed >= budget as f64 && rec.consumed <= budget as f64 + 75.0);
        prop_assert_eq!(rec.action_sequence.len(), rec.initiations.len());
    }
}

#[test]
fn report_recomputes_from_records() {
    let config = ExperimentConfig {
        problems: vec![ProblemSpec::new(FunctionId::Griewank, 5)],
        policies: vec![PolicySpec::Ter, PolicySpec::Random],
        budget: BudgetRule::Absolute(1500.0),
        runs: 4,
        ..ExperimentConfig::default()
    };
    let recs: Vec<_> = config
        .policies
        .iter()
        .flat_map(|p| {
            config
                .seeds()
                .map(|s| run_single(&config, config.problems[0], p, s).unwrap())
                .collect::<Vec<_>>()
        })
        .collect();
    let report = build_report(&recs, &AlignmentScoring::default(), 0.05).unwrap();
    for pol in ["ter", "random"] {
        let finals: Vec<f64> = recs
            .iter()
            .filter(|r| r.config.policy == pol)
            .map(|r| r.final_value)
            .collect();
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        let cell = report.cell("griewank", 5, pol).unwrap();
        assert!((cell.mean - mean).abs() <= 1e-15 * mean.abs().max(1.0));
        assert!(recs
            .iter()
            .all(|r| r.curve.last().unwrap().1 == r.final_value));
    }
}
