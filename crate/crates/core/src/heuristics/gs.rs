//! Population-based global search: success-history adaptive DE with
//! current-to-pbest/1/bin mutation and an archive of replaced parents.
//!
//! The population lives in private state and persists across initiations.
//! At the start of each initiation, an incumbent better than the whole
//! population replaces the worst member.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::contract::{Bounds, EvalContext, Heuristic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GsConfig {
    pub population: usize,
    /// Fraction of the population eligible as `pbest`.
    pub p_best: f64,
    pub memory_size: usize,
    /// Overrides sampling of the scale factor.
    pub fixed_f: Option<f64>,
    /// Overrides sampling of the crossover rate.
    pub fixed_cr: Option<f64>,
    pub budget: Option<f64>,
}

impl Default for GsConfig {
    fn default() -> Self {
        Self {
            population: 100,
            p_best: 0.1,
            memory_size: 10,
            fixed_f: None,
            fixed_cr: None,
            budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GsState {
    pub population: Vec<Vec<f64>>,
    /// Objective values; `NaN` marks members not yet evaluated.
    pub fitness: Vec<f64>,
    pub memory_f: Vec<f64>,
    pub memory_cr: Vec<f64>,
    pub memory_pos: usize,
    pub archive: Vec<Vec<f64>>,
    rng: ChaCha8Rng,
}

#[derive(Debug, Clone)]
pub struct Gs {
    bounds: Vec<Bounds>,
    config: GsConfig,
    budget: f64,
    state: GsState,
}

struct Trial {
    target: usize,
    x: Vec<f64>,
    y: f64,
    f: f64,
    cr: f64,
}

impl Gs {
    pub fn new(bounds: &[Bounds], config: &GsConfig, default_budget: f64, seed: u64) -> Self {
        let mut config = config.clone();
        config.population = config.population.max(4);
        config.memory_size = config.memory_size.max(1);
        Self {
            bounds: bounds.to_vec(),
            budget: config.budget.unwrap_or(default_budget),
            state: GsState {
                population: Vec::new(),
                fitness: Vec::new(),
                memory_f: vec![0.5; config.memory_size],
                memory_cr: vec![0.5; config.memory_size],
                memory_pos: 0,
                archive: Vec::new(),
                rng: ChaCha8Rng::seed_from_u64(seed),
            },
            config,
        }
    }

    pub fn state(&self) -> &GsState {
        &self.state
    }

    pub fn best_fitness(&self) -> f64 {
        self.state
            .fitness
            .iter()
            .copied()
            .filter(|v| !v.is_nan())
            .fold(f64::INFINITY, f64::min)
    }

    /// Seeds the population around the incumbent; returns `false` if the
    /// allowance ran out before every member was evaluated.
    fn ensure_initialized(&mut self, ctx: &mut EvalContext<'_>) -> bool {
        let np = self.config.population;
        if self.state.population.is_empty() {
            let rng = &mut self.state.rng;
            let mut pop: Vec<Vec<f64>> = (0..np)
                .map(|_| {
                    self.bounds
                        .iter()
                        .map(|b| rng.random_range(b.lower..=b.upper))
                        .collect()
                })
                .collect();
            pop[0] = ctx.incumbent().x_best.clone();
            self.state.population = pop;
            self.state.fitness = vec![f64::NAN; np];
            self.state.fitness[0] = ctx.incumbent().y_best;
        }
        for i in 0..np {
            if self.state.fitness[i].is_nan() {
                match ctx.evaluate(&self.state.population[i]) {
                    Some(y) => self.state.fitness[i] = y,
                    None => return false,
                }
            }
        }
        true
    }

    fn inject_incumbent(&mut self, ctx: &EvalContext<'_>) {
        let inc = ctx.incumbent();
        if inc.y_best < self.best_fitness() {
            let worst = argmax(&self.state.fitness);
            self.state.population[worst] = inc.x_best.clone();
            self.state.fitness[worst] = inc.y_best;
        }
    }

    fn sample_f(&mut self, mean: f64) -> f64 {
        if let Some(f) = self.config.fixed_f {
            return f;
        }
        let cauchy = Cauchy::new(mean, 0.1).expect("valid Cauchy scale");
        loop {
            let f = cauchy.sample(&mut self.state.rng);
            if f > 0.0 {
                return f.min(1.0);
            }
        }
    }

    fn sample_cr(&mut self, mean: f64) -> f64 {
        if let Some(cr) = self.config.fixed_cr {
            return cr;
        }
        let normal = Normal::new(mean, 0.1).expect("valid normal scale");
        normal.sample(&mut self.state.rng).clamp(0.0, 1.0)
    }

    /// Runs one generation; returns `false` if it was cut short.
    fn generation(&mut self, ctx: &mut EvalContext<'_>) -> bool {
        let np = self.config.population;
        let d = self.bounds.len();
        let mut order: Vec<usize> = (0..np).collect();
        order.sort_by(|&a, &b| self.state.fitness[a].total_cmp(&self.state.fitness[b]));
        let top = ((self.config.p_best * np as f64).round() as usize).clamp(2, np);

        let mut trials = Vec::with_capacity(np);
        let mut complete = true;
        for i in 0..np {
            let slot = self.state.rng.random_range(0..self.config.memory_size);
            let f = self.sample_f(self.state.memory_f[slot]);
            let cr = self.sample_cr(self.state.memory_cr[slot]);

            let rng = &mut self.state.rng;
            let pbest = order[rng.random_range(0..top)];
            let r1 = loop {
                let r = rng.random_range(0..np);
                if r != i {
                    break r;
                }
            };
            let archive_len = self.state.archive.len();
            let r2 = loop {
                let r = rng.random_range(0..np + archive_len);
                if r != i && r != r1 {
                    break r;
                }
            };
            let pop = &self.state.population;
            let x2 = if r2 < np {
                &pop[r2]
            } else {
                &self.state.archive[r2 - np]
            };
            let jrand = rng.random_range(0..d);
            let x = &pop[i];
            let trial: Vec<f64> = (0..d)
                .map(|k| {
                    if k == jrand || rng.random::<f64>() < cr {
                        let v = x[k] + f * (pop[pbest][k] - x[k]) + f * (pop[r1][k] - x2[k]);
                        self.bounds[k].reflect(v)
                    } else {
                        x[k]
                    }
                })
                .collect();
            match ctx.evaluate(&trial) {
                Some(y) => trials.push(Trial {
                    target: i,
                    x: trial,
                    y,
                    f,
                    cr,
                }),
                None => {
                    complete = false;
                    break;
                }
            }
        }

        let mut success_f = Vec::new();
        let mut success_cr = Vec::new();
        let mut weights = Vec::new();
        for t in trials {
            let parent = self.state.fitness[t.target];
            if t.y <= parent {
                if t.y < parent {
                    success_f.push(t.f);
                    success_cr.push(t.cr);
                    weights.push(parent - t.y);
                    let old = std::mem::replace(&mut self.state.population[t.target], t.x);
                    self.state.archive.push(old);
                } else {
                    self.state.population[t.target] = t.x;
                }
                self.state.fitness[t.target] = t.y;
            }
        }
        while self.state.archive.len() > np {
            let k = self.state.rng.random_range(0..self.state.archive.len());
            self.state.archive.swap_remove(k);
        }
        if !weights.is_empty() {
            let total: f64 = weights.iter().sum();
            let pos = self.state.memory_pos;
            if total > 0.0 {
                let w: Vec<f64> = weights.iter().map(|v| v / total).collect();
                self.state.memory_cr[pos] = w.iter().zip(&success_cr).map(|(w, c)| w * c).sum();
                let num: f64 = w.iter().zip(&success_f).map(|(w, f)| w * f * f).sum();
                let den: f64 = w.iter().zip(&success_f).map(|(w, f)| w * f).sum();
                if den > 0.0 {
                    self.state.memory_f[pos] = num / den;
                }
            }
            self.state.memory_pos = (pos + 1) % self.config.memory_size;
        }
        complete
    }
}

fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > values[best] { i } else { best })
}

impl Heuristic for Gs {
    fn name(&self) -> &str {
        "gs"
    }

    fn per_initiation_budget(&self) -> f64 {
        self.budget
    }

    fn apply(&mut self, ctx: &mut EvalContext<'_>) {
        if !self.ensure_initialized(ctx) {
            return;
        }
        self.inject_incumbent(ctx);
        while !ctx.is_exhausted() {
            if !self.generation(ctx) {
                break;
            }
        }
    }
}
