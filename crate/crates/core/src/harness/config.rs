use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::decision::{DecisionPolicy, PolicyMode};
use crate::error::{Error, Result};
use crate::model::{LearningParams, ModelSettings, Strategy, SuccessorKeying};
use crate::need::PriorityProfile;
use crate::pingpong::BoardConfig;

/// Priority weights for the four ping-pong needs plus the energy weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub happy: f64,
    pub sad: f64,
    pub novelty: f64,
    pub expectedness: f64,
    #[serde(default)]
    pub energy: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            happy: 1.0,
            sad: 0.25,
            novelty: 0.1,
            expectedness: 0.1,
            energy: 0.0,
        }
    }
}

impl ProfileConfig {
    pub fn priority(&self) -> Result<PriorityProfile<f64>> {
        PriorityProfile::new(
            vec![self.happy, self.sad, self.novelty, self.expectedness],
            self.energy,
        )
        .map_err(|e| Error::config("profile", e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GcConfig {
    /// Records at least this many ticks older than the newest are eligible.
    pub horizon: u64,
    /// Eligible records are dropped while their evidence is below this.
    pub min_trust: u64,
    /// Collection runs every `every` ticks.
    pub every: u64,
}

/// Everything that determines a run. Two runs with equal configs produce
/// identical outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::ticks")]
    pub ticks: u64,
    #[serde(default)]
    pub board: BoardConfig,
    #[serde(default)]
    pub profile: ProfileConfig,
    #[serde(default = "defaults::strategy")]
    pub strategy: Strategy,
    #[serde(default = "defaults::window")]
    pub window: usize,
    #[serde(default)]
    pub keying: SuccessorKeying,
    #[serde(default)]
    pub policy: PolicyMode,
    #[serde(default = "defaults::exploration_rate")]
    pub exploration_rate: f64,
    #[serde(default = "defaults::utility_step")]
    pub utility_step: f64,
    #[serde(default)]
    pub predictability_weight: f64,
    #[serde(default)]
    pub gc: Option<GcConfig>,
    /// Where the CLI writes outputs. Not part of the run's identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

mod defaults {
    use crate::model::Strategy;

    pub fn ticks() -> u64 {
        2_000
    }

    pub fn strategy() -> Strategy {
        Strategy::TransitionMap
    }

    pub fn window() -> usize {
        1
    }

    pub fn exploration_rate() -> f64 {
        0.1
    }

    pub fn utility_step() -> f64 {
        0.25
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = match e.path().to_string() {
                p if p == "." => "<document>".to_string(),
                p => p,
            };
            Error::config(field, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.board.validate()?;
        self.priority()?;
        if self.window == 0 {
            return Err(Error::config("window", "must be at least 1"));
        }
        DecisionPolicy::new(self.policy, self.exploration_rate)?;
        if !(self.utility_step > 0.0 && self.utility_step <= 1.0) {
            return Err(Error::config("utility_step", "must lie in (0, 1]"));
        }
        if self.predictability_weight < 0.0 || !self.predictability_weight.is_finite() {
            return Err(Error::config("predictability_weight", "must be finite and >= 0"));
        }
        if let Some(gc) = &self.gc {
            if gc.every == 0 {
                return Err(Error::config("gc.every", "must be at least 1"));
            }
        }
        Ok(())
    }

    pub fn priority(&self) -> Result<PriorityProfile<f64>> {
        self.profile.priority()
    }

    pub fn learning_params(&self) -> Result<LearningParams<f64>> {
        LearningParams::new(self.priority()?, self.predictability_weight, self.utility_step)
    }

    pub fn model_settings(&self) -> ModelSettings {
        ModelSettings {
            strategy: self.strategy,
            window_size: self.window,
            keying: self.keying,
        }
    }

    pub fn decision_policy(&self) -> Result<DecisionPolicy> {
        DecisionPolicy::new(self.policy, self.exploration_rate)
    }

    /// Sorted-key JSON of the run identity (everything but `out_dir`).
    pub fn canonical_json(&self) -> String {
        let mut identity = self.clone();
        identity.out_dir = None;
        let value: Value = serde_json::to_value(&identity).expect("config serializes");
        let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
        text.push('\n');
        text
    }

    /// SHA-256 of [`canonical_json`](Self::canonical_json), hex encoded.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}
