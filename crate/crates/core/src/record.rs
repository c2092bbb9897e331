//! Per-initiation efficiency records and whole-run records.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::contract::SolutionState;
use crate::error::{Error, Result};
use crate::resource::ResourceKind;

/// Outcome of one heuristic initiation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyRecord {
    pub action: usize,
    /// `y_before - y_after`; never negative under minimization.
    pub improvement: f64,
    pub cost: f64,
    /// `improvement / cost`.
    pub efficiency: f64,
}

impl EfficiencyRecord {
    pub fn new(action: usize, improvement: f64, cost: f64) -> Result<Self> {
        if cost.is_nan() || cost <= 0.0 {
            return Err(Error::ContractViolation(format!(
                "initiation cost must be positive, got {cost}"
            )));
        }
        if improvement.is_nan() || improvement < 0.0 {
            return Err(Error::ContractViolation(format!(
                "improvement must be non-negative, got {improvement}"
            )));
        }
        Ok(Self {
            action,
            improvement,
            cost,
            efficiency: improvement / cost,
        })
    }
}

/// Builds the record for an initiation that moved the incumbent from
/// `before` to `after` at the given cost.
pub fn record_initiation(
    before: &SolutionState,
    after: &SolutionState,
    cost: f64,
    action: usize,
) -> Result<EfficiencyRecord> {
    if after.y_best > before.y_best {
        return Err(Error::ContractViolation(format!(
            "incumbent worsened from {} to {}",
            before.y_best, after.y_best
        )));
    }
    EfficiencyRecord::new(action, before.y_best - after.y_best, cost)
}

/// Settings a run was executed with, stored next to its results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// `ter`, `random`, or `single:<name>`.
    pub policy: String,
    pub tau: Option<f64>,
    pub window: Option<usize>,
    pub heuristics: Vec<String>,
    pub budget: f64,
    pub resource: ResourceKind,
    /// Problem label, e.g. `sphere`, when run by the harness.
    pub problem: Option<String>,
    pub dimension: usize,
}

/// Full trace of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub action_sequence: Vec<usize>,
    /// `(consumed, y_best)` samples; the first is the initial point, then one
    /// per initiation.
    pub curve: Vec<(f64, f64)>,
    pub initiations: Vec<EfficiencyRecord>,
    pub initial_value: f64,
    pub final_value: f64,
    /// `y_0 - y_final`.
    pub overall_improvement: f64,
    /// `overall_improvement / consumed`.
    pub overall_efficiency: f64,
    pub consumed: f64,
    pub seed: u64,
    pub config: RunConfig,
}

impl RunRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Curve as CSV with a `consumed,y` header.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("consumed,y\n");
        for (c, y) in &self.curve {
            out.push_str(&format!("{c},{y}\n"));
        }
        out
    }

    pub fn write_curve_csv(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(self.curve_csv().as_bytes())?;
        Ok(())
    }
}
