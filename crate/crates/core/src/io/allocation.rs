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

//! Allocation documents: JSON with decimal-string times.
//!
//! ```json
//! {
//!   "version": 1,
//!   "trains": { "IC1": 2 },
//!   "resources": [
//!     { "id": "switch-12", "period": "3600",
//!       "intervals": [
//!         { "id": "a", "train": "IC1", "assignment": 1, "start": "3550", "end": "120" }
//!       ] }
//!   ]
//! }
//! ```
//!
//! `trains` maps each train to its number of assignments and may be omitted,
//! in which case the largest assignment index seen per train is used.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::schema::{
    validate_schema, AllocationInterval, ResourceSchema, ValidSchema, ValidationError,
};
use crate::time::TimePoint;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationDocument {
    pub version: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub trains: BTreeMap<String, u32>,
    pub resources: Vec<ResourceRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<String>,
    pub intervals: Vec<IntervalRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<u32>,
    pub start: String,
    pub end: String,
}

/// Parsed and validated contents of an allocation document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationFile {
    pub schemas: Vec<ValidSchema>,
    /// Explicit assignment counts from the document, possibly empty.
    pub trains: BTreeMap<String, u32>,
    /// Ignored fields and endpoint normalizations.
    pub warnings: Vec<String>,
}

impl AllocationFile {
    /// Assignment counts per train: the declared ones, else the largest
    /// assignment index each train uses.
    pub fn train_assignments(&self) -> BTreeMap<String, u32> {
        if !self.trains.is_empty() {
            return self.trains.clone();
        }
        let mut counts = BTreeMap::new();
        for interval in self.schemas.iter().flat_map(|s| s.intervals.iter()) {
            if let (Some(train), Some(assignment)) = (&interval.train, interval.assignment) {
                let count = counts.entry(train.clone()).or_insert(0);
                *count = assignment.max(*count);
            }
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseOptions {
    /// Reject unknown fields instead of ignoring them.
    pub strict: bool,
}

/// Parses, normalizes and validates an allocation document.
pub fn parse_allocation(text: &str, options: ParseOptions) -> Result<AllocationFile, IoError> {
    let mut ignored = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let document: AllocationDocument =
        serde_ignored::deserialize(&mut de, |path| ignored.push(path.to_string()))
            .map_err(IoError::syntax)?;
    de.end().map_err(IoError::syntax)?;

    if options.strict && !ignored.is_empty() {
        return Err(IoError::UnknownFields(ignored));
    }
    if document.version != FORMAT_VERSION {
        return Err(IoError::UnsupportedVersion(document.version));
    }
    let mut warnings: Vec<String> = ignored
        .into_iter()
        .map(|p| format!("ignored unknown field {p}"))
        .collect();

    let mut resource_ids = HashSet::new();
    let mut schemas = Vec::with_capacity(document.resources.len());
    let mut invalid: Vec<ValidationError> = Vec::new();
    for (r, record) in document.resources.into_iter().enumerate() {
        if !resource_ids.insert(record.id.clone()) {
            return Err(IoError::DuplicateResource(record.id));
        }
        let schema = resource_schema(r, record, &mut warnings)?;
        match validate_schema(schema) {
            Ok(valid) => schemas.push(valid),
            Err(err) => invalid.push(err),
        }
    }
    if !invalid.is_empty() {
        return Err(IoError::Validation(invalid));
    }
    Ok(AllocationFile {
        schemas,
        trains: document.trains,
        warnings,
    })
}

fn time_field(value: &str, path: String) -> Result<TimePoint, IoError> {
    TimePoint::parse_decimal(value).map_err(|source| IoError::Time { path, source })
}

fn resource_schema(
    index: usize,
    record: ResourceRecord,
    warnings: &mut Vec<String>,
) -> Result<ResourceSchema, IoError> {
    let period = record
        .period
        .as_deref()
        .map(|p| time_field(p, format!("resources[{index}].period")))
        .transpose()?;
    let mut intervals = Vec::with_capacity(record.intervals.len());
    for (i, iv) in record.intervals.into_iter().enumerate() {
        let path = |field: &str| format!("resources[{index}].intervals[{i}].{field}");
        let mut start = time_field(&iv.start, path("start"))?;
        let mut end = time_field(&iv.end, path("end"))?;
        if let Some(p) = period.filter(|p| !p.is_zero()) {
            let covers_period = start.checked_add(p).is_some_and(|wrapped| end >= wrapped);
            if covers_period {
                if (start, end) != (TimePoint::ZERO, p) {
                    warnings.push(format!(
                        "resource {}: interval {} [{start}, {end}] covers the whole period, stored as [0, {p}]",
                        record.id, iv.id
                    ));
                }
                start = TimePoint::ZERO;
                end = p;
            } else {
                let (s, e) = (start.rem_period(p), end.rem_period(p));
                if (s, e) != (start, end) {
                    warnings.push(format!(
                        "resource {}: interval {} [{start}, {end}] reduced modulo {p} to [{s}, {e}]",
                        record.id, iv.id
                    ));
                }
                start = s;
                end = e;
            }
        }
        intervals.push(AllocationInterval {
            id: iv.id,
            train: iv.train,
            assignment: iv.assignment,
            start,
            end,
        });
    }
    Ok(ResourceSchema {
        resource_id: record.id,
        period,
        intervals,
    })
}

/// Document for a set of schemas. Times are written with [`TimePoint`]'s
/// `Display`, which is a plain decimal for every value read from a document.
pub fn allocation_document(
    schemas: &[ValidSchema],
    trains: &BTreeMap<String, u32>,
) -> AllocationDocument {
    AllocationDocument {
        version: FORMAT_VERSION,
        trains: trains.clone(),
        resources: schemas
            .iter()
            .map(|s| ResourceRecord {
                id: s.resource_id.clone(),
                period: s.period.map(|p| p.to_string()),
                intervals: s
                    .intervals
                    .iter()
                    .map(|iv| IntervalRecord {
                        id: iv.id.clone(),
                        train: iv.train.clone(),
                        assignment: iv.assignment,
                        start: iv.start.to_string(),
                        end: iv.end.to_string(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

/// Serializes an allocation file as pretty JSON with a trailing newline.
pub fn write_allocation(file: &AllocationFile) -> String {
    let document = allocation_document(&file.schemas, &file.trains);
    let mut text = serde_json::to_string_pretty(&document).expect("serializable");
    text.push('\n');
    text
}
