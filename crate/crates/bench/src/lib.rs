//! Fixtures shared by the benchmarks.

use ter_core::controller::{PolicyConfig, SelectionPolicy, TerPolicy};
use ter_core::record::EfficiencyRecord;

/// A policy that has already observed `history` initiations.
pub fn warmed_policy(window: usize, actions: usize, history: usize) -> TerPolicy {
    let mut p = TerPolicy::new(PolicyConfig::new(0.2, window, actions).unwrap()).unwrap();
    for i in 0..history {
        let improvement = ((i * 7919) % 101) as f64;
        p.observe(&EfficiencyRecord::new(i % actions, improvement, 1.0 + (i % 3) as f64).unwrap());
    }
    p
}

/// Deterministic pseudo-random action sequence.
pub fn sequence(len: usize, actions: usize, salt: usize) -> Vec<usize> {
    (0..len)
        .map(|i| (i.wrapping_mul(2_654_435_761).wrapping_add(salt) >> 7) % actions)
        .collect()
}
