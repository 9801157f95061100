//! Versioned JSON snapshots of schema, episode log and model tables.
//!
//! Keys are emitted in sorted order so two snapshots of the same content
//! are byte-identical.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::memory::EpisodeLog;
use crate::model::{ModelTables, TransitionModel};
use crate::need::StateSchema;
use crate::scalar::Scalar;

pub const SNAPSHOT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", deny_unknown_fields)]
pub struct MemorySnapshot<S: Scalar> {
    pub version: u64,
    pub schema: StateSchema,
    pub log: EpisodeLog<S>,
    pub model: ModelTables<S>,
    pub config_fingerprint: String,
}

fn load_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Load {
        field: field.into(),
        message: message.into(),
    }
}

impl<S: Scalar> MemorySnapshot<S> {
    pub fn new(
        schema: StateSchema,
        log: EpisodeLog<S>,
        model: ModelTables<S>,
        config_fingerprint: impl Into<String>,
    ) -> Self {
        MemorySnapshot {
            version: SNAPSHOT_VERSION,
            schema,
            log,
            model,
            config_fingerprint: config_fingerprint.into(),
        }
    }

    /// Canonical text: sorted keys, two-space indentation, trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let value = serde_json::to_value(self).map_err(|e| Error::schema(e.to_string()))?;
        let mut text = serde_json::to_string_pretty(&value).map_err(|e| Error::schema(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| load_err("<document>", e.to_string()))?;
        let version = value
            .get("version")
            .ok_or_else(|| load_err("version", "missing"))?
            .as_u64()
            .ok_or_else(|| load_err("version", "not an unsigned integer"))?;
        if version > SNAPSHOT_VERSION {
            return Err(Error::Version {
                found: version,
                supported: SNAPSHOT_VERSION,
            });
        }
        let snap: Self = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            load_err(path, e.into_inner().to_string())
        })?;
        snap.validate()?;
        Ok(snap)
    }

    fn validate(&self) -> Result<()> {
        self.schema
            .validate()
            .map_err(|e| load_err("schema", e.to_string()))?;
        EpisodeLog::from_records(self.log.records().to_vec()).map_err(|e| load_err("log", e.to_string()))?;
        for (i, r) in self.log.records().iter().enumerate() {
            let states = [("state", Some(&r.state)), ("next_state", Some(&r.next_state))];
            for (name, s) in states
                .into_iter()
                .chain([("predicted_next", r.predicted_next.as_ref())])
            {
                if let Some(s) = s {
                    self.schema
                        .check(s)
                        .map_err(|e| load_err(format!("log[{i}].{name}"), e.to_string()))?;
                }
            }
        }
        self.model
            .learning
            .validate()
            .map_err(|e| load_err("model.learning", e.to_string()))?;
        self.schema
            .check_profile(&self.model.learning.priority)
            .map_err(|e| load_err("model.learning.priority", e.to_string()))?;
        Ok(())
    }

    pub fn model(&self) -> Result<TransitionModel<S>> {
        TransitionModel::from_tables(&self.model)
    }

    /// Rebuilds the model from the log and compares it with the stored
    /// tables. Returns the first difference found.
    pub fn verify_replay(&self, tol: S) -> Result<Option<String>> {
        let stored = self.model()?;
        let rebuilt =
            TransitionModel::rebuild_from_log(&self.log, self.model.settings, &self.model.learning)?;
        Ok(rebuilt.difference(&stored, tol))
    }
}

pub fn save_snapshot<S: Scalar>(snapshot: &MemorySnapshot<S>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, snapshot.to_json()?).map_err(|e| Error::io(path, e))
}

pub fn load_snapshot<S: Scalar>(path: impl AsRef<Path>) -> Result<MemorySnapshot<S>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    MemorySnapshot::from_json(&text)
}
