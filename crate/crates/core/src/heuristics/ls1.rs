//! Coordinate line search in the style of MTS local search 1.
//!
//! Each dimension is probed at `x_i - SR_i`; on failure at `x_i + SR_i / 2`.
//! A full pass without any improvement halves every search range, and a
//! range that collapses below `1e-15` of its box width is reset.

use serde::{Deserialize, Serialize};

use crate::contract::{Bounds, EvalContext, Heuristic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Ls1Config {
    /// Initial search range as a fraction of each box width.
    pub initial_range: f64,
    /// Per-initiation budget override.
    pub budget: Option<f64>,
}

impl Default for Ls1Config {
    fn default() -> Self {
        Self {
            initial_range: 0.2,
            budget: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Probe {
    Minus,
    Plus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ls1State {
    pub search_range: Vec<f64>,
    /// Dimension the next probe works on; kept across initiations.
    pub cursor: usize,
    pub probe: Probe,
    pub improved_in_pass: bool,
}

#[derive(Debug, Clone)]
pub struct Ls1 {
    bounds: Vec<Bounds>,
    initial_range: Vec<f64>,
    budget: f64,
    state: Ls1State,
}

const RESET_FRACTION: f64 = 1e-15;

impl Ls1 {
    pub fn new(bounds: &[Bounds], config: &Ls1Config, default_budget: f64) -> Self {
        let fraction = config.initial_range.clamp(f64::MIN_POSITIVE, 0.5);
        let initial_range: Vec<f64> = bounds.iter().map(|b| fraction * b.width()).collect();
        Self {
            bounds: bounds.to_vec(),
            budget: config.budget.unwrap_or(default_budget),
            state: Ls1State {
                search_range: initial_range.clone(),
                cursor: 0,
                probe: Probe::Minus,
                improved_in_pass: false,
            },
            initial_range,
        }
    }

    pub fn state(&self) -> &Ls1State {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut Ls1State {
        &mut self.state
    }

    fn advance(&mut self) {
        let s = &mut self.state;
        s.probe = Probe::Minus;
        s.cursor += 1;
        if s.cursor < s.search_range.len() {
            return;
        }
        s.cursor = 0;
        if !s.improved_in_pass {
            for (i, sr) in s.search_range.iter_mut().enumerate() {
                *sr *= 0.5;
                if *sr < RESET_FRACTION * self.bounds[i].width() {
                    *sr = self.initial_range[i];
                }
            }
        }
        s.improved_in_pass = false;
    }
}

impl Heuristic for Ls1 {
    fn name(&self) -> &str {
        "ls1"
    }

    fn per_initiation_budget(&self) -> f64 {
        self.budget
    }

    fn apply(&mut self, ctx: &mut EvalContext<'_>) {
        let mut candidate = ctx.incumbent().x_best.clone();
        while !ctx.is_exhausted() {
            let i = self.state.cursor;
            let current = ctx.incumbent();
            let y = current.y_best;
            candidate.copy_from_slice(&current.x_best);
            let step = match self.state.probe {
                Probe::Minus => -self.state.search_range[i],
                Probe::Plus => 0.5 * self.state.search_range[i],
            };
            candidate[i] = self.bounds[i].clamp(candidate[i] + step);

            let Some(trial) = ctx.evaluate(&candidate) else {
                break;
            };
            if trial < y {
                self.state.improved_in_pass = true;
                self.advance();
            } else {
                match self.state.probe {
                    Probe::Minus => self.state.probe = Probe::Plus,
                    Probe::Plus => self.advance(),
                }
            }
        }
    }
}
