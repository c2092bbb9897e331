//! Resource accounting.
//!
//! A run is given a total budget `T` in some abstract unit. Two units are
//! supported: objective evaluations (exact, integral) and wall-clock
//! milliseconds (measured with a monotonic clock at initiation boundaries).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ResourceKind {
    #[default]
    EvaluationCount,
    WallTimeMilliseconds,
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResourceKind::EvaluationCount => f.write_str("evaluation-count"),
            ResourceKind::WallTimeMilliseconds => f.write_str("wall-time-milliseconds"),
        }
    }
}

impl FromStr for ResourceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "evaluation-count" | "evals" | "fes" => Ok(ResourceKind::EvaluationCount),
            "wall-time-milliseconds" | "ms" | "wall-time" => Ok(ResourceKind::WallTimeMilliseconds),
            other => Err(Error::InvalidArgument(format!(
                "unknown resource kind `{other}`"
            ))),
        }
    }
}

/// Consumed versus total budget.
///
/// `consume` never refuses: detecting exhaustion is the job of the main
/// loop guard (`is_exhausted`), which is checked before every initiation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceMeter {
    consumed: f64,
    budget: f64,
    kind: ResourceKind,
}

impl ResourceMeter {
    pub fn new(budget: f64, kind: ResourceKind) -> Result<Self> {
        if !(budget.is_finite() && budget > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "budget must be positive and finite, got {budget}"
            )));
        }
        Ok(Self {
            consumed: 0.0,
            budget,
            kind,
        })
    }

    pub fn evaluations(budget: u64) -> Result<Self> {
        Self::new(budget as f64, ResourceKind::EvaluationCount)
    }

    pub fn consumed(&self) -> f64 {
        self.consumed
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn kind(&self) -> ResourceKind {
        self.kind
    }

    /// Budget left, floored at zero.
    pub fn remaining(&self) -> f64 {
        (self.budget - self.consumed).max(0.0)
    }

    pub fn is_exhausted(&self) -> bool {
        self.consumed >= self.budget
    }

    /// Adds `amount` to the consumed total. Negative or NaN amounts are
    /// ignored so the counter stays monotone.
    pub fn consume(&mut self, amount: f64) {
        if amount > 0.0 {
            self.consumed += amount;
        }
    }

    /// Allowance for the next initiation: `min(per_initiation, remaining)`.
    /// Evaluation budgets are rounded down to whole evaluations.
    pub fn allowance(&self, per_initiation: f64) -> f64 {
        let a = per_initiation.min(self.remaining());
        match self.kind {
            ResourceKind::EvaluationCount => a.floor(),
            ResourceKind::WallTimeMilliseconds => a,
        }
    }
}
