//! Config files (TOML or JSON, chosen by extension).
//!
//! ```toml
//! tau = 0.2
//! window = 5
//! heuristics = ["ls1", "cc", "gs"]
//!
//! [gs]
//! population = 60
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::align::AlignmentScoring;
use crate::controller::{PolicyConfig, DEFAULT_TAU, DEFAULT_WINDOW};
use crate::error::{Error, Result};
use crate::heuristics::HeuristicSettings;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FileConfig {
    pub tau: Option<f64>,
    pub window: Option<usize>,
    pub heuristics: Option<Vec<String>>,
    pub alignment: Option<AlignmentScoring>,
    #[serde(flatten)]
    pub settings: HeuristicSettings,
}

impl FileConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(format!("config: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("config: {e}")))
    }

    /// `.json` files parse as JSON, anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    /// Policy settings for `action_count` actions, defaults filled in.
    pub fn policy(&self, action_count: usize) -> Result<PolicyConfig> {
        PolicyConfig::new(
            self.tau.unwrap_or(DEFAULT_TAU),
            self.window.unwrap_or(DEFAULT_WINDOW),
            action_count,
        )
    }
}
