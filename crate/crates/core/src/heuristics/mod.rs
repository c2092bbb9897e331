//! The articulated heuristics: `ls1` (coordinate line search), `cc`
//! (cooperative coevolution with random grouping) and `gs` (adaptive DE).

mod cc;
mod gs;
mod ls1;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use cc::{compose, random_grouping, Cc, CcConfig, CcState};
pub use gs::{Gs, GsConfig, GsState};
pub use ls1::{Ls1, Ls1Config, Ls1State, Probe};

use crate::contract::{Bounds, Heuristic};
use crate::error::{Error, Result};

pub const HEURISTIC_NAMES: [&str; 3] = ["ls1", "cc", "gs"];

/// Per-initiation budget in evaluations per decision variable.
pub const EVALUATIONS_PER_DIMENSION: f64 = 25.0;

/// Per-heuristic overrides, one section per heuristic name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeuristicSettings {
    pub ls1: Ls1Config,
    pub cc: CcConfig,
    pub gs: GsConfig,
}

/// Seed of a heuristic's private stream. Depends on the name rather than the
/// position so a heuristic draws the same numbers whatever portfolio it is in.
pub fn heuristic_seed(run_seed: u64, name: &str) -> u64 {
    // FNV-1a over the name, folded into the run seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    (run_seed ^ h).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

pub fn build_heuristic(
    name: &str,
    bounds: &[Bounds],
    settings: &HeuristicSettings,
    default_budget: f64,
    run_seed: u64,
) -> Result<Box<dyn Heuristic>> {
    let seed = heuristic_seed(run_seed, name);
    Ok(match name {
        "ls1" => Box::new(Ls1::new(bounds, &settings.ls1, default_budget)),
        "cc" => Box::new(Cc::new(bounds, &settings.cc, default_budget, seed)),
        "gs" => Box::new(Gs::new(bounds, &settings.gs, default_budget, seed)),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown heuristic `{other}` (expected one of {})",
                HEURISTIC_NAMES.join(", ")
            )))
        }
    })
}

/// Builds the action set in the given order.
pub fn build_portfolio<S: AsRef<str>>(
    names: &[S],
    bounds: &[Bounds],
    settings: &HeuristicSettings,
    default_budget: f64,
    run_seed: u64,
) -> Result<Vec<Box<dyn Heuristic>>> {
    if names.is_empty() {
        return Err(Error::InvalidArgument("the heuristic set is empty".into()));
    }
    names
        .iter()
        .map(|n| build_heuristic(n.as_ref(), bounds, settings, default_budget, run_seed))
        .collect()
}

/// `N` distinct indices from `0..n`, all different from `exclude`.
pub(crate) fn distinct_indices<const N: usize, R: Rng + ?Sized>(
    n: usize,
    exclude: usize,
    rng: &mut R,
) -> [usize; N] {
    debug_assert!(n > N);
    let mut out = [0usize; N];
    for k in 0..N {
        out[k] = loop {
            let r = rng.random_range(0..n);
            if r != exclude && !out[..k].contains(&r) {
                break r;
            }
        };
    }
    out
}
