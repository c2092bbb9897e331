//! The objective/heuristic contract shared by the controller, the
//! heuristics and the benchmark problems.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::resource::ResourceKind;

/// Closed box constraint for one decision variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub const fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower && v <= self.upper
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lower, self.upper)
    }

    /// Mirrors `v` at the violated bound, then clamps what is still outside.
    pub fn reflect(&self, v: f64) -> f64 {
        let r = if v < self.lower {
            2.0 * self.lower - v
        } else if v > self.upper {
            2.0 * self.upper - v
        } else {
            v
        };
        self.clamp(r)
    }
}

/// A box-constrained scalar function to be minimized.
///
/// This is the plug-in point for external objectives: anything implementing
/// it can be optimized by the controller.
pub trait Objective {
    fn dimension(&self) -> usize;

    fn bounds(&self) -> &[Bounds];

    /// Evaluates `x`, which always has length `dimension()`.
    fn evaluate(&mut self, x: &[f64]) -> f64;
}

/// Adapts a closure into an [`Objective`].
pub struct FnObjective<F> {
    bounds: Vec<Bounds>,
    f: F,
}

impl<F: FnMut(&[f64]) -> f64> FnObjective<F> {
    pub fn new(bounds: Vec<Bounds>, f: F) -> Self {
        Self { bounds, f }
    }

    pub fn uniform(dimension: usize, bounds: Bounds, f: F) -> Self {
        Self::new(vec![bounds; dimension], f)
    }
}

impl<F: FnMut(&[f64]) -> f64> Objective for FnObjective<F> {
    fn dimension(&self) -> usize {
        self.bounds.len()
    }

    fn bounds(&self) -> &[Bounds] {
        &self.bounds
    }

    fn evaluate(&mut self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// The incumbent: best point seen so far and its objective value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionState {
    pub x_best: Vec<f64>,
    pub y_best: f64,
}

impl SolutionState {
    pub fn new(x_best: Vec<f64>, y_best: f64) -> Self {
        Self { x_best, y_best }
    }

    /// Evaluates `x` once and wraps it as the starting incumbent.
    pub fn evaluated(objective: &mut dyn Objective, x: Vec<f64>) -> Self {
        let y = objective.evaluate(&x);
        Self {
            x_best: x,
            y_best: y,
        }
    }

    /// Replaces the incumbent if `y` is strictly better. Returns whether it did.
    pub fn offer(&mut self, x: &[f64], y: f64) -> bool {
        if y < self.y_best {
            self.x_best.clear();
            self.x_best.extend_from_slice(x);
            self.y_best = y;
            true
        } else {
            false
        }
    }
}

/// Metered access to the objective during one heuristic initiation.
///
/// Every evaluation goes through here: the context counts resources, refuses
/// further evaluations once the allowance is spent, and keeps the shared
/// incumbent up to date, so a heuristic can never worsen it.
pub struct EvalContext<'a> {
    objective: &'a mut dyn Objective,
    incumbent: &'a mut SolutionState,
    kind: ResourceKind,
    allowance: f64,
    evaluations: u64,
    started: Instant,
}

impl<'a> EvalContext<'a> {
    pub fn new(
        objective: &'a mut dyn Objective,
        incumbent: &'a mut SolutionState,
        kind: ResourceKind,
        allowance: f64,
    ) -> Self {
        Self {
            objective,
            incumbent,
            kind,
            allowance,
            evaluations: 0,
            started: Instant::now(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.objective.dimension()
    }

    pub fn bounds(&self) -> &[Bounds] {
        self.objective.bounds()
    }

    pub fn incumbent(&self) -> &SolutionState {
        self.incumbent
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn allowance(&self) -> f64 {
        self.allowance
    }

    /// Whole evaluations still allowed, for evaluation-count budgets.
    /// `None` under wall-time budgets.
    pub fn remaining_evaluations(&self) -> Option<u64> {
        match self.kind {
            ResourceKind::EvaluationCount => {
                Some((self.allowance as u64).saturating_sub(self.evaluations))
            }
            ResourceKind::WallTimeMilliseconds => None,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        match self.kind {
            ResourceKind::EvaluationCount => self.evaluations as f64 >= self.allowance,
            // The first evaluation is always granted so every initiation
            // makes progress.
            ResourceKind::WallTimeMilliseconds => {
                self.evaluations > 0 && self.elapsed_ms() >= self.allowance
            }
        }
    }

    /// Evaluates `x` if the allowance permits, updating the incumbent.
    pub fn evaluate(&mut self, x: &[f64]) -> Option<f64> {
        if self.is_exhausted() {
            return None;
        }
        let y = self.objective.evaluate(x);
        self.evaluations += 1;
        self.incumbent.offer(x, y);
        Some(y)
    }

    /// Resources consumed so far in this initiation.
    pub fn consumed(&self) -> f64 {
        match self.kind {
            ResourceKind::EvaluationCount => self.evaluations as f64,
            ResourceKind::WallTimeMilliseconds => self.elapsed_ms(),
        }
    }

    fn elapsed_ms(&self) -> f64 {
        self.started.elapsed().as_secs_f64() * 1e3
    }
}

/// One arm of the portfolio.
///
/// A heuristic owns its private state (including its own random stream) and
/// touches nothing else except the shared incumbent, which it reaches only
/// through the [`EvalContext`].
pub trait Heuristic: Send {
    fn name(&self) -> &str;

    /// Resources granted per initiation (`Δt_a`), before capping by what is
    /// left of the total budget.
    fn per_initiation_budget(&self) -> f64;

    /// Runs one initiation until the context's allowance is exhausted.
    fn apply(&mut self, ctx: &mut EvalContext<'_>);
}

impl Heuristic for Box<dyn Heuristic> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn per_initiation_budget(&self) -> f64 {
        (**self).per_initiation_budget()
    }

    fn apply(&mut self, ctx: &mut EvalContext<'_>) {
        (**self).apply(ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> FnObjective<impl FnMut(&[f64]) -> f64> {
        FnObjective::uniform(2, Bounds::new(-1.0, 1.0), |x: &[f64]| {
            x.iter().map(|v| v * v).sum()
        })
    }

    #[test]
    fn reflect_mirrors_then_clamps() {
        let b = Bounds::new(-1.0, 1.0);
        assert_eq!(b.reflect(0.3), 0.3);
        assert_eq!(b.reflect(1.25), 0.75);
        assert_eq!(b.reflect(-1.5), -0.5);
        assert_eq!(b.reflect(5.0), -1.0);
    }

    #[test]
    fn context_stops_at_allowance_and_tracks_best() {
        let mut f = sphere();
        let mut inc = SolutionState::evaluated(&mut f, vec![1.0, 1.0]);
        let mut ctx = EvalContext::new(&mut f, &mut inc, ResourceKind::EvaluationCount, 3.0);
        assert_eq!(ctx.evaluate(&[0.5, 0.0]), Some(0.25));
        assert_eq!(ctx.evaluate(&[0.9, 0.0]), Some(0.81));
        assert!(ctx.evaluate(&[0.1, 0.0]).is_some());
        assert!(ctx.is_exhausted());
        assert_eq!(ctx.evaluate(&[0.0, 0.0]), None);
        assert_eq!(ctx.consumed(), 3.0);
        assert_eq!(inc.y_best, 0.1 * 0.1);
        assert_eq!(inc.x_best, vec![0.1, 0.0]);
    }

    #[test]
    fn wall_time_context_grants_first_evaluation() {
        let mut f = sphere();
        let mut inc = SolutionState::evaluated(&mut f, vec![1.0, 1.0]);
        let mut ctx = EvalContext::new(&mut f, &mut inc, ResourceKind::WallTimeMilliseconds, 0.0);
        assert!(ctx.evaluate(&[0.0, 0.0]).is_some());
        assert!(ctx.is_exhausted());
        assert!(ctx.consumed() > 0.0);
    }
}
