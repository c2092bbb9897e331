//! Cooperative coevolution with random grouping.
//!
//! Decision variables are shuffled into disjoint groups of size `s`. Each
//! group in turn is evolved with DE/rand/1/bin while every other coordinate
//! stays frozen at the context vector (the incumbent). When all groups of a
//! decomposition have been visited, a fresh random decomposition is drawn.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::distinct_indices;
use crate::contract::{Bounds, EvalContext, Heuristic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CcConfig {
    /// Group size; `min(100, ceil(D / 2))` when unset.
    pub group_size: Option<usize>,
    pub population: usize,
    pub f: f64,
    pub cr: f64,
    /// DE generations spent on a group before moving to the next one.
    pub generations_per_group: usize,
    pub budget: Option<f64>,
}

impl Default for CcConfig {
    fn default() -> Self {
        Self {
            group_size: None,
            population: 50,
            f: 0.5,
            cr: 0.9,
            generations_per_group: 10,
            budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcState {
    /// Full-dimension population; a group's subpopulation is its columns.
    pub population: Vec<Vec<f64>>,
    pub groups: Vec<Vec<usize>>,
    pub group_cursor: usize,
    pub generation: usize,
    rng: ChaCha8Rng,
}

#[derive(Debug, Clone)]
pub struct Cc {
    bounds: Vec<Bounds>,
    config: CcConfig,
    group_size: usize,
    budget: f64,
    state: CcState,
}

/// Partitions `0..dimension` into random disjoint groups of at most
/// `group_size` indices.
pub fn random_grouping<R: Rng + ?Sized>(
    dimension: usize,
    group_size: usize,
    rng: &mut R,
) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..dimension).collect();
    idx.shuffle(rng);
    idx.chunks(group_size.max(1)).map(|c| c.to_vec()).collect()
}

/// Copy of `context` with `values` written at the `group` indices.
pub fn compose(context: &[f64], group: &[usize], values: &[f64]) -> Vec<f64> {
    let mut out = context.to_vec();
    for (&i, &v) in group.iter().zip(values) {
        out[i] = v;
    }
    out
}

impl Cc {
    pub fn new(bounds: &[Bounds], config: &CcConfig, default_budget: f64, seed: u64) -> Self {
        let d = bounds.len();
        let group_size = config
            .group_size
            .unwrap_or_else(|| 100.min(d.div_ceil(2)))
            .clamp(1, d.max(1));
        let mut config = config.clone();
        config.population = config.population.max(4);
        Self {
            bounds: bounds.to_vec(),
            group_size,
            budget: config.budget.unwrap_or(default_budget),
            config,
            state: CcState {
                population: Vec::new(),
                groups: Vec::new(),
                group_cursor: 0,
                generation: 0,
                rng: ChaCha8Rng::seed_from_u64(seed),
            },
        }
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    pub fn state(&self) -> &CcState {
        &self.state
    }

    fn initialize(&mut self, x_best: &[f64]) {
        let np = self.config.population;
        let rng = &mut self.state.rng;
        let mut pop: Vec<Vec<f64>> = (0..np)
            .map(|_| {
                self.bounds
                    .iter()
                    .map(|b| rng.random_range(b.lower..=b.upper))
                    .collect()
            })
            .collect();
        pop[0] = x_best.to_vec();
        self.state.population = pop;
    }
}

impl Heuristic for Cc {
    fn name(&self) -> &str {
        "cc"
    }

    fn per_initiation_budget(&self) -> f64 {
        self.budget
    }

    fn apply(&mut self, ctx: &mut EvalContext<'_>) {
        if self.state.population.is_empty() {
            self.initialize(&ctx.incumbent().x_best.clone());
        }
        let np = self.config.population;
        let (f, cr) = (self.config.f, self.config.cr);
        let d = self.bounds.len();

        while !ctx.is_exhausted() {
            if self.state.group_cursor >= self.state.groups.len() {
                self.state.groups = random_grouping(d, self.group_size, &mut self.state.rng);
                self.state.group_cursor = 0;
                self.state.generation = 0;
            }
            let group = self.state.groups[self.state.group_cursor].clone();

            // The incumbent's own coordinates always sit in member 0, so its
            // fitness is known without an evaluation.
            let context = ctx.incumbent().x_best.clone();
            for &i in &group {
                self.state.population[0][i] = context[i];
            }
            let mut fitness = vec![ctx.incumbent().y_best; np];
            for (member, fit) in self.state.population.iter().zip(fitness.iter_mut()).skip(1) {
                let values: Vec<f64> = group.iter().map(|&i| member[i]).collect();
                let Some(y) = ctx.evaluate(&compose(&context, &group, &values)) else {
                    return;
                };
                *fit = y;
            }

            while self.state.generation < self.config.generations_per_group {
                for j in 0..np {
                    let rng = &mut self.state.rng;
                    let [r1, r2, r3] = distinct_indices::<3, _>(np, j, rng);
                    let jrand = rng.random_range(0..group.len());
                    let pop = &self.state.population;
                    let trial: Vec<f64> = group
                        .iter()
                        .enumerate()
                        .map(|(k, &i)| {
                            if k == jrand || rng.random::<f64>() < cr {
                                let v = pop[r1][i] + f * (pop[r2][i] - pop[r3][i]);
                                self.bounds[i].reflect(v)
                            } else {
                                pop[j][i]
                            }
                        })
                        .collect();
                    let candidate = compose(&ctx.incumbent().x_best, &group, &trial);
                    let Some(y) = ctx.evaluate(&candidate) else {
                        return;
                    };
                    if y <= fitness[j] {
                        fitness[j] = y;
                        for (&i, &v) in group.iter().zip(&trial) {
                            self.state.population[j][i] = v;
                        }
                    }
                }
                self.state.generation += 1;
            }
            self.state.generation = 0;
            self.state.group_cursor += 1;
        }
    }
}
