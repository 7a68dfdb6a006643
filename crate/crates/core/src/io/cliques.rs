// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Clique reports.

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::circular::find_missed_cliques;
use crate::polytope::resource_cliques;
use crate::schema::{ConflictClique, ValidSchema};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliqueDocument {
    pub version: u32,
    pub resources: Vec<ResourceCliques>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceCliques {
    pub id: String,
    pub periodic: bool,
    /// Whether the cliques are all maximal cliques of size >= 2. Always true
    /// for linear resources; absent when a periodic resource was too large
    /// to check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete: Option<bool>,
    pub cliques: Vec<CliqueRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub missed: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliqueRecord {
    pub members: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowRecord {
    pub start: String,
    pub end: String,
}

impl From<&ConflictClique> for CliqueRecord {
    fn from(clique: &ConflictClique) -> Self {
        CliqueRecord {
            members: clique.members.clone(),
            window: clique.window.map(|(start, end)| WindowRecord {
                start: start.to_string(),
                end: end.to_string(),
            }),
        }
    }
}

/// Runs the matching sweep on one resource and, for periodic resources
/// within the oracle guard, the completeness check.
pub fn clique_report(schema: &ValidSchema) -> ResourceCliques {
    let cliques = resource_cliques(schema)
        .iter()
        .map(CliqueRecord::from)
        .collect();
    let (complete, missed) = if schema.is_periodic() {
        match find_missed_cliques(schema) {
            Ok(missed) => (Some(missed.is_empty()), missed),
            Err(_) => (None, Vec::new()),
        }
    } else {
        (Some(true), Vec::new())
    };
    ResourceCliques {
        id: schema.resource_id.clone(),
        periodic: schema.is_periodic(),
        complete,
        cliques,
        missed,
    }
}

/// Pretty JSON with a trailing newline; byte-stable for equal input.
pub fn write_cliques(resources: &[ResourceCliques]) -> String {
    let document = CliqueDocument {
        version: super::allocation::FORMAT_VERSION,
        resources: resources.to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&document).expect("serializable");
    text.push('\n');
    text
}

pub fn parse_clique_document(text: &str) -> Result<CliqueDocument, IoError> {
    serde_json::from_str(text).map_err(IoError::syntax)
}
