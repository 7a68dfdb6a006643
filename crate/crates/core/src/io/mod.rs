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

//! File formats: allocation input, clique reports and LP output.

pub mod allocation;
pub mod cliques;
pub mod lp;

use std::io::Read;
use std::path::Path;

use thiserror::Error;

use crate::schema::ValidationError;
use crate::time::TimeParseError;

pub use allocation::{parse_allocation, write_allocation, AllocationFile, ParseOptions};
pub use cliques::{
    clique_report, parse_clique_document, write_cliques, CliqueDocument, ResourceCliques,
};
pub use lp::{write_lp, LpError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown fields: {}", .0.join(", "))]
    UnknownFields(Vec<String>),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("{path}: {source}")]
    Time {
        path: String,
        #[source]
        source: TimeParseError,
    },
    #[error("duplicate resource id {0}")]
    DuplicateResource(String),
    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<ValidationError>),
}

impl IoError {
    fn syntax(err: serde_json::Error) -> Self {
        IoError::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }

    /// Validation failures, as opposed to unreadable or malformed input.
    pub fn is_validation(&self) -> bool {
        matches!(self, IoError::Validation(_) | IoError::DuplicateResource(_))
    }
}

/// Reads a whole file, or stdin for `-`.
pub fn read_input(path: &Path) -> Result<String, IoError> {
    let mut text = String::new();
    let result = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    result.map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    Ok(text)
}
