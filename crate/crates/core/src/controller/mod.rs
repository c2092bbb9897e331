//! The bandit controller: windowed efficiency estimates, Boltzmann selection
//! and the main optimization loop.

mod bounds;
mod optimize;
mod policy;
mod window;

pub use bounds::{
    empirical_exploration_rate, exploration_bounds, solve_hyperparameters, ExplorationBounds,
    HyperparameterCandidate,
};
pub use optimize::{run_policy, ter_optimize};
pub use policy::{
    action_probabilities, random_policy_step, sample_action, softmax, FixedPolicy, PolicyConfig,
    RandomPolicy, SelectionPolicy, TerPolicy, DEFAULT_TAU, DEFAULT_WINDOW,
};
pub use window::{action_means, normalize_window, WindowMemory};
