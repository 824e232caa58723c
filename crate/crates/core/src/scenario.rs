//! On-disk scenario format: system parameters plus a task list.

use serde::{Deserialize, Serialize};

use crate::energy::SystemParams;
use crate::error::{Error, Result};
use crate::timeline::TaskSpec;

/// A concrete instance as stored in a scenario JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub params: SystemParams,
    pub tasks: Vec<TaskSpec>,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidParams(format!("scenario parse error: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization cannot fail")
    }
}
