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

//! Allocation schemas: the intervals during which candidate train
//! assignments occupy one resource.

use std::collections::HashSet;
use std::fmt;
use std::ops::Deref;

use thiserror::Error;

use crate::time::TimePoint;

/// One allocation of a resource by one train assignment.
///
/// On a periodic resource `start > end` encodes an arc that wraps past the
/// period boundary, and `start = 0, end = P` is the full circle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AllocationInterval {
    pub id: String,
    pub train: Option<String>,
    pub assignment: Option<u32>,
    pub start: TimePoint,
    pub end: TimePoint,
}

impl AllocationInterval {
    pub fn new(
        id: impl Into<String>,
        start: impl Into<TimePoint>,
        end: impl Into<TimePoint>,
    ) -> Self {
        AllocationInterval {
            id: id.into(),
            train: None,
            assignment: None,
            start: start.into(),
            end: end.into(),
        }
    }

    pub fn with_label(mut self, train: impl Into<String>, assignment: u32) -> Self {
        self.train = Some(train.into());
        self.assignment = Some(assignment);
        self
    }

    /// True for a periodic arc that crosses the period boundary.
    pub fn wraps(&self) -> bool {
        self.start > self.end
    }
}

/// Whether `interval` is active at time `t`, with closed endpoints. On a
/// periodic resource a wrapping arc is active at `t >= start` or `t <= end`.
pub fn is_active(interval: &AllocationInterval, t: TimePoint) -> bool {
    if interval.wraps() {
        t >= interval.start || t <= interval.end
    } else {
        interval.start <= t && t <= interval.end
    }
}

/// Whether two intervals (or arcs, when `periodic`) share an active time.
///
/// Two closed arcs on a circle meet iff one of them is active at the start
/// of the other.
pub fn intervals_conflict(a: &AllocationInterval, b: &AllocationInterval, periodic: bool) -> bool {
    if periodic {
        is_active(a, b.start) || is_active(b, a.start)
    } else {
        a.start <= b.end && b.start <= a.end
    }
}

/// All allocation intervals of one resource.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceSchema {
    pub resource_id: String,
    /// Period length; present for cyclic timetables (circular-arc model).
    pub period: Option<TimePoint>,
    pub intervals: Vec<AllocationInterval>,
}

impl ResourceSchema {
    pub fn new(resource_id: impl Into<String>, intervals: Vec<AllocationInterval>) -> Self {
        ResourceSchema {
            resource_id: resource_id.into(),
            period: None,
            intervals,
        }
    }

    pub fn periodic(
        resource_id: impl Into<String>,
        period: impl Into<TimePoint>,
        intervals: Vec<AllocationInterval>,
    ) -> Self {
        ResourceSchema {
            resource_id: resource_id.into(),
            period: Some(period.into()),
            intervals,
        }
    }
}

/// A schema that passed [`validate_schema`]. Read-only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidSchema(ResourceSchema);

impl ValidSchema {
    pub fn is_periodic(&self) -> bool {
        self.0.period.is_some()
    }

    pub fn into_inner(self) -> ResourceSchema {
        self.0
    }

    pub fn interval(&self, id: &str) -> Option<&AllocationInterval> {
        self.0.intervals.iter().find(|i| i.id == id)
    }
}

impl Deref for ValidSchema {
    type Target = ResourceSchema;

    fn deref(&self) -> &ResourceSchema {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Start,
    End,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Endpoint::Start => "start",
            Endpoint::End => "end",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationIssue {
    #[error("period {0} is not positive")]
    NonPositivePeriod(TimePoint),
    #[error("interval #{0} has an empty id")]
    EmptyId(usize),
    #[error("duplicate interval id {0}")]
    DuplicateId(String),
    #[error("start > end for {id} ({start} > {end})")]
    StartAfterEnd {
        id: String,
        start: TimePoint,
        end: TimePoint,
    },
    #[error("{endpoint} of {id} ({value}) lies outside [0, {period})")]
    OutsidePeriod {
        id: String,
        endpoint: Endpoint,
        value: TimePoint,
        period: TimePoint,
    },
}

/// Every invariant violation found in one schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    pub resource_id: String,
    pub issues: Vec<ValidationIssue>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "resource {}: ", self.resource_id)?;
        for (n, issue) in self.issues.iter().enumerate() {
            if n > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationError {}

/// Checks every schema invariant and collects all violations.
pub fn validate_schema(schema: ResourceSchema) -> Result<ValidSchema, ValidationError> {
    let mut issues = Vec::new();
    let period = schema.period.filter(|p| !p.is_zero());
    if let Some(p) = schema.period {
        if p.is_zero() {
            issues.push(ValidationIssue::NonPositivePeriod(p));
        }
    }

    let mut seen = HashSet::new();
    for (index, interval) in schema.intervals.iter().enumerate() {
        if interval.id.is_empty() {
            issues.push(ValidationIssue::EmptyId(index));
        } else if !seen.insert(interval.id.as_str()) {
            issues.push(ValidationIssue::DuplicateId(interval.id.clone()));
        }
        match period {
            None if schema.period.is_none() => {
                if interval.start > interval.end {
                    issues.push(ValidationIssue::StartAfterEnd {
                        id: interval.id.clone(),
                        start: interval.start,
                        end: interval.end,
                    });
                }
            }
            None => {}
            Some(p) => {
                let full_circle = interval.start.is_zero() && interval.end == p;
                for (endpoint, value) in [
                    (Endpoint::Start, interval.start),
                    (Endpoint::End, interval.end),
                ] {
                    let in_range = value < p || (endpoint == Endpoint::End && full_circle);
                    if !in_range {
                        issues.push(ValidationIssue::OutsidePeriod {
                            id: interval.id.clone(),
                            endpoint,
                            value,
                            period: p,
                        });
                    }
                }
            }
        }
    }

    if issues.is_empty() {
        Ok(ValidSchema(schema))
    } else {
        Err(ValidationError {
            resource_id: schema.resource_id,
            issues,
        })
    }
}

/// A set of pairwise conflicting intervals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConflictClique {
    /// Interval ids in sorted order.
    pub members: Vec<String>,
    /// `[max start, min end]` of the members when they share an active time.
    pub window: Option<(TimePoint, TimePoint)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(id: &str, s: u64, e: u64) -> AllocationInterval {
        AllocationInterval::new(id, s, e)
    }

    #[test]
    fn accepts_overlapping_linear_schema() {
        let schema = ResourceSchema::new("r", vec![iv("A", 0, 3), iv("B", 2, 5)]);
        assert!(validate_schema(schema).is_ok());
    }

    #[test]
    fn reports_start_after_end() {
        let err = validate_schema(ResourceSchema::new("r", vec![iv("A", 5, 3)])).unwrap_err();
        assert_eq!(err.issues.len(), 1);
        assert_eq!(err.issues[0].to_string(), "start > end for A (5 > 3)");
    }

    #[test]
    fn accepts_wrap_arc() {
        let schema = ResourceSchema::periodic("r", 10, vec![iv("A", 8, 2)]);
        let valid = validate_schema(schema).unwrap();
        assert!(valid.intervals[0].wraps());
    }

    #[test]
    fn accepts_zero_length_and_full_circle() {
        assert!(validate_schema(ResourceSchema::new("r", vec![iv("A", 4, 4)])).is_ok());
        assert!(validate_schema(ResourceSchema::periodic("r", 10, vec![iv("F", 0, 10)])).is_ok());
    }

    #[test]
    fn collects_every_violation() {
        let schema = ResourceSchema::periodic(
            "r",
            10,
            vec![
                iv("A", 8, 2),
                iv("A", 1, 3),
                iv("B", 10, 2),
                iv("C", 3, 12),
                iv("", 1, 1),
            ],
        );
        let err = validate_schema(schema).unwrap_err();
        assert_eq!(err.issues.len(), 4, "{err}");
        assert!(err
            .issues
            .contains(&ValidationIssue::DuplicateId("A".into())));
        assert!(err.issues.contains(&ValidationIssue::EmptyId(4)));
        assert!(err.issues.iter().any(|i| matches!(
            i,
            ValidationIssue::OutsidePeriod { id, endpoint: Endpoint::Start, .. } if id == "B"
        )));
        assert!(err.issues.iter().any(|i| matches!(
            i,
            ValidationIssue::OutsidePeriod { id, endpoint: Endpoint::End, .. } if id == "C"
        )));
    }

    #[test]
    fn rejects_zero_period() {
        let err =
            validate_schema(ResourceSchema::periodic("r", 0, vec![iv("A", 0, 0)])).unwrap_err();
        assert_eq!(
            err.issues,
            vec![ValidationIssue::NonPositivePeriod(TimePoint::ZERO)]
        );
    }

    #[test]
    fn closed_interval_conflicts() {
        assert!(intervals_conflict(&iv("A", 0, 3), &iv("B", 3, 5), false));
        assert!(intervals_conflict(&iv("A", 0, 9), &iv("B", 2, 3), false));
        assert!(!intervals_conflict(&iv("A", 0, 1), &iv("B", 2, 3), false));
        assert!(intervals_conflict(&iv("Z", 2, 2), &iv("B", 2, 3), false));
    }

    #[test]
    fn arc_conflicts() {
        // 8 -> 2 wraps through 0.
        assert!(intervals_conflict(&iv("A", 8, 2), &iv("B", 1, 5), true));
        assert!(intervals_conflict(&iv("A", 8, 2), &iv("C", 9, 0), true));
        assert!(intervals_conflict(&iv("B", 1, 5), &iv("A", 8, 2), true));
        assert!(!intervals_conflict(&iv("A", 8, 2), &iv("B", 3, 7), true));
        assert!(intervals_conflict(&iv("A", 8, 2), &iv("B", 2, 7), true));
        assert!(!intervals_conflict(&iv("B", 1, 5), &iv("C", 9, 0), true));
        assert!(intervals_conflict(&iv("F", 0, 10), &iv("B", 4, 5), true));
        assert!(intervals_conflict(&iv("W", 9, 1), &iv("V", 8, 0), true));
    }

    #[test]
    fn validation_is_idempotent() {
        let schema = ResourceSchema::periodic("r", 10, vec![iv("A", 8, 2), iv("B", 1, 5)]);
        let once = validate_schema(schema).unwrap();
        let twice = validate_schema(once.clone().into_inner()).unwrap();
        assert_eq!(once, twice);
    }
}
