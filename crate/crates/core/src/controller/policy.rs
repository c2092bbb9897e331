//! Action-selection policies: Boltzmann exploration over windowed means
//! (with strict exploration of unseen actions), uniform random, and fixed.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::window::{action_means, normalize_window, WindowMemory};
use crate::error::{Error, Result};
use crate::record::EfficiencyRecord;

pub const DEFAULT_TAU: f64 = 0.2;
pub const DEFAULT_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub tau: f64,
    pub window: usize,
    pub action_count: usize,
}

impl PolicyConfig {
    pub fn new(tau: f64, window: usize, action_count: usize) -> Result<Self> {
        let c = Self {
            tau,
            window,
            action_count,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if self.window == 0 {
            return Err(Error::InvalidArgument("window must be at least 1".into()));
        }
        if self.action_count == 0 {
            return Err(Error::InvalidArgument(
                "at least one action is required".into(),
            ));
        }
        Ok(())
    }
}

/// `exp(x / tau)` normalized to sum to one. Inputs must be finite.
pub fn softmax(values: &[f64], tau: f64) -> Vec<f64> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = values.iter().map(|v| ((v - max) / tau).exp()).collect();
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    p
}

/// Selection probabilities implied by `means`: uniform over the infinite
/// entries if there are any, softmax otherwise.
pub fn action_probabilities(means: &[f64], tau: f64) -> Vec<f64> {
    let unseen = means.iter().filter(|m| m.is_infinite()).count();
    if unseen > 0 {
        let share = 1.0 / unseen as f64;
        means
            .iter()
            .map(|m| if m.is_infinite() { share } else { 0.0 })
            .collect()
    } else {
        softmax(means, tau)
    }
}

/// Draws an action. Actions with an infinite mean (no record in the window)
/// are taken directly, ties broken uniformly; otherwise the draw follows
/// `softmax(means, tau)`.
pub fn sample_action<R: Rng + ?Sized>(means: &[f64], tau: f64, rng: &mut R) -> usize {
    debug_assert!(!means.is_empty());
    let unseen: Vec<usize> = (0..means.len())
        .filter(|&i| means[i].is_infinite())
        .collect();
    if !unseen.is_empty() {
        return unseen[rng.random_range(0..unseen.len())];
    }
    let probs = softmax(means, tau);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding left `acc` slightly below one.
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}

/// Uniformly random action, the `RAN` baseline.
pub fn random_policy_step<R: Rng + ?Sized>(action_count: usize, rng: &mut R) -> usize {
    rng.random_range(0..action_count)
}

/// Decides which heuristic to initiate next and learns from the outcome.
pub trait SelectionPolicy {
    fn select(&mut self, rng: &mut dyn RngCore) -> usize;

    fn observe(&mut self, _record: &EfficiencyRecord) {}

    /// Short name used in run records, e.g. `ter` or `single:ls1`.
    fn label(&self) -> String;

    /// `(tau, window)` for policies that have them.
    fn knobs(&self) -> Option<(f64, usize)> {
        None
    }
}

/// Windowed-efficiency Boltzmann policy.
#[derive(Debug, Clone)]
pub struct TerPolicy {
    config: PolicyConfig,
    memory: WindowMemory,
}

impl TerPolicy {
    pub fn new(config: PolicyConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            memory: WindowMemory::new(config.window)?,
            config,
        })
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn memory(&self) -> &WindowMemory {
        &self.memory
    }

    pub fn means(&self) -> Vec<f64> {
        action_means(&normalize_window(&self.memory), self.config.action_count)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        action_probabilities(&self.means(), self.config.tau)
    }
}

impl SelectionPolicy for TerPolicy {
    fn select(&mut self, rng: &mut dyn RngCore) -> usize {
        sample_action(&self.means(), self.config.tau, rng)
    }

    fn observe(&mut self, record: &EfficiencyRecord) {
        self.memory.push(*record);
    }

    fn label(&self) -> String {
        "ter".into()
    }

    fn knobs(&self) -> Option<(f64, usize)> {
        Some((self.config.tau, self.config.window))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RandomPolicy {
    pub action_count: usize,
}

impl SelectionPolicy for RandomPolicy {
    fn select(&mut self, rng: &mut dyn RngCore) -> usize {
        random_policy_step(self.action_count, rng)
    }

    fn label(&self) -> String {
        "random".into()
    }
}

/// Always initiates the same action.
#[derive(Debug, Clone)]
pub struct FixedPolicy {
    pub action: usize,
    pub name: String,
}

impl SelectionPolicy for FixedPolicy {
    fn select(&mut self, _rng: &mut dyn RngCore) -> usize {
        self.action
    }

    fn label(&self) -> String {
        format!("single:{}", self.name)
    }
}
