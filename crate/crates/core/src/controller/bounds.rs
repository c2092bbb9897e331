//! Closed-form behavior bounds of the Boltzmann window policy and the
//! inverse problem of picking `(tau, window)` from a target exploitation
//! interval.
//!
//! With every action holding at least one record, normalization pins the
//! best record at 1 and the worst at 0. The greediest window puts a lone 1
//! on the best action and zeros everywhere else, which gives the exploitation
//! ceiling `e^(1/tau) / (|A| - 1 + e^(1/tau))`; its complement is the
//! exploration floor.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::policy::sample_action;
use super::window::{action_means, normalize_records};
use crate::error::{Error, Result};
use crate::record::EfficiencyRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplorationBounds {
    /// `e^(1/tau) / (|A| - 1 + e^(1/tau))`, the left end of the published
    /// interval. Numerically this is the exploitation ceiling.
    pub lower: f64,
    /// `(|A| - 1) / ((|A| - 1) e^(1/tau) + e^((w - |A|) / (tau (w - |A| + 1))))`,
    /// the right end of the published interval, as printed.
    pub upper: f64,
    /// `1 - lower = (|A| - 1) / (|A| - 1 + e^(1/tau))`, the exploration floor.
    pub complement_lower: f64,
}

pub fn exploration_bounds(
    action_count: usize,
    window: usize,
    tau: f64,
) -> Result<ExplorationBounds> {
    if action_count < 2 {
        return Err(Error::InvalidArgument(format!(
            "bounds need at least two actions, got {action_count}"
        )));
    }
    if window < action_count {
        return Err(Error::InvalidArgument(format!(
            "window {window} is smaller than the action count {action_count}"
        )));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tau must be positive, got {tau}"
        )));
    }
    let others = (action_count - 1) as f64;
    let spare = (window - action_count) as f64;
    let e1 = (1.0 / tau).exp();
    let lower = e1 / (others + e1);
    let upper = others / (others * e1 + (spare / (tau * (spare + 1.0))).exp());
    let complement_lower = others / (others + e1);
    Ok(ExplorationBounds {
        lower,
        upper,
        complement_lower,
    })
}

/// Exploitation ceiling `e^k / (|A| - 1 + e^k)` at `tau = 1/k`.
fn exploitation_ceiling(inverse_tau: f64, action_count: usize) -> f64 {
    let others = (action_count - 1) as f64;
    1.0 / (1.0 + others * (-inverse_tau).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperparameterCandidate {
    pub tau: f64,
    /// `1 / tau`; candidates are restricted to integer values.
    pub inverse_tau: u32,
    pub window: usize,
    pub exploitation_ceiling: f64,
    pub exploration_floor: f64,
}

/// Inverts the exploitation ceiling to find temperatures of the form
/// `tau = 1/k` compatible with `(p_exploit_min, p_exploit_max)`.
///
/// The first candidate is the largest `k` whose ceiling does not exceed
/// `p_exploit_max`. Greedier candidates follow while their exploration floor
/// stays within a factor ten of the requested floor `1 - p_exploit_max`.
/// Candidates whose ceiling falls short of `p_exploit_min` are dropped. Each
/// temperature is paired with the window `w = max(|A| + 1, k)`, so one
/// window length spans `1/tau` initiations.
///
/// For `(0.5, 0.99)` with three actions this yields `<1/5, 5>`, `<1/6, 6>`
/// and `<1/7, 7>`.
pub fn solve_hyperparameters(
    p_exploit_min: f64,
    p_exploit_max: f64,
    action_count: usize,
) -> Vec<HyperparameterCandidate> {
    if !(0.0 < p_exploit_min && p_exploit_min < p_exploit_max && p_exploit_max < 1.0)
        || action_count < 2
    {
        return Vec::new();
    }
    let others = (action_count - 1) as f64;
    // Solves e^k / (others + e^k) = p_exploit_max for k.
    let k_exact = (others * p_exploit_max / (1.0 - p_exploit_max)).ln();
    if k_exact < 1.0 {
        return Vec::new();
    }
    let first = k_exact.floor() as u32;
    let floor_limit = (1.0 - p_exploit_max) / 10.0;

    let mut out = Vec::new();
    let mut k = first;
    loop {
        let ceiling = exploitation_ceiling(k as f64, action_count);
        let exploration_floor = 1.0 - ceiling;
        if exploration_floor <= floor_limit {
            break;
        }
        if ceiling >= p_exploit_min {
            out.push(HyperparameterCandidate {
                tau: 1.0 / k as f64,
                inverse_tau: k,
                window: (action_count + 1).max(k as usize),
                exploitation_ceiling: ceiling,
                exploration_floor,
            });
        }
        k += 1;
    }
    out
}

/// Monte-Carlo frequency of drawing an action other than the one with the
/// highest windowed mean (the first one on ties).
pub fn empirical_exploration_rate<R: Rng + ?Sized>(
    tau: f64,
    action_count: usize,
    window_contents: &[EfficiencyRecord],
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    let means = action_means(&normalize_records(window_contents), action_count);
    if means.iter().any(|m| m.is_infinite()) {
        return Err(Error::InvalidArgument(
            "every action needs at least one record in the window".into(),
        ));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let best = means
        .iter()
        .enumerate()
        .fold(0, |best, (i, &m)| if m > means[best] { i } else { best });
    let explored = (0..trials)
        .filter(|_| sample_action(&means, tau, rng) != best)
        .count();
    Ok(explored as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bounds_at_default_setting() {
        // Reference values evaluated with 30-digit arithmetic.
        let b = exploration_bounds(3, 5, 0.2).unwrap();
        assert!((b.lower - 0.986_703_291_042_268).abs() < 1e-12);
        assert!((b.upper - 0.006_156_537_164_881_083).abs() < 1e-12);
        assert!((b.complement_lower - 0.013_296_708_957_732).abs() < 1e-12);
    }

    #[test]
    fn bounds_reject_short_window() {
        assert!(exploration_bounds(3, 2, 0.2).is_err());
        assert!(exploration_bounds(1, 5, 0.2).is_err());
        assert!(exploration_bounds(3, 5, -1.0).is_err());
    }

    #[test]
    fn solver_reproduces_published_candidates() {
        let c = solve_hyperparameters(0.5, 0.99, 3);
        let pairs: Vec<(u32, usize)> = c.iter().map(|c| (c.inverse_tau, c.window)).collect();
        assert_eq!(pairs, vec![(5, 5), (6, 6), (7, 7)]);
    }

    #[test]
    fn greedier_target_gives_smaller_tau() {
        let c = solve_hyperparameters(0.5, 0.9999, 3);
        assert!(c[0].tau <= 0.2);
        assert!(c.windows(2).all(|p| p[0].inverse_tau < p[1].inverse_tau));
    }

    #[test]
    fn degenerate_intervals_are_empty() {
        assert!(solve_hyperparameters(0.5, 0.5, 3).is_empty());
        assert!(solve_hyperparameters(0.9, 0.5, 3).is_empty());
        assert!(solve_hyperparameters(0.0, 0.5, 3).is_empty());
        // Even tau = 1 is greedier than this ceiling.
        assert!(solve_hyperparameters(0.1, 0.3, 3).is_empty());
    }

    #[test]
    fn solver_windows_respect_minimum() {
        for c in solve_hyperparameters(0.2, 0.9, 4) {
            assert!(c.window >= 5);
        }
    }

    fn records(effs: &[f64]) -> Vec<EfficiencyRecord> {
        effs.iter()
            .enumerate()
            .map(|(a, &e)| EfficiencyRecord::new(a, e, 1.0).unwrap())
            .collect()
    }

    #[test]
    fn empirical_rate_equal_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = empirical_exploration_rate(0.2, 3, &records(&[1.0, 1.0, 1.0]), 200_000, &mut rng)
            .unwrap();
        assert!((r - 2.0 / 3.0).abs() < 0.005);
    }

    #[test]
    fn empirical_rate_cold_temperature() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let r = empirical_exploration_rate(0.02, 3, &records(&[1.0, 0.0, 0.0]), 100_000, &mut rng)
            .unwrap();
        assert!(r < 1e-6);
    }

    #[test]
    fn empirical_rate_requires_full_coverage() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(empirical_exploration_rate(0.2, 3, &records(&[1.0, 0.0]), 10, &mut rng).is_err());
    }
}
