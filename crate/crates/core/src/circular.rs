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

//! Periodic resources: arcs on a circle of circumference `P`.
//!
//! Arcs that cross the period boundary are cut into a head `[0, end]` and a
//! tail `[start, P]`, and the linear sweep runs on the pieces. Every clique
//! found this way is a real clique of the circular-arc graph, but arcs lack
//! the Helly property: three arcs can meet pairwise without a common point,
//! and such a clique is never the open set at any instant.
//! [`find_missed_cliques`] detects these gaps for small instances.

use std::fmt;

use rand::Rng;

use crate::oracle::{self, OracleError, MAX_ENUMERATION_VERTICES};
use crate::schema::{AllocationInterval, ConflictClique, ResourceSchema, ValidSchema};
use crate::sweep::{span_window, sweep_spans};
use crate::time::TimePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Piece {
    Whole,
    Head,
    Tail,
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Piece::Whole => "whole",
            Piece::Head => "head",
            Piece::Tail => "tail",
        })
    }
}

type Window = Option<(TimePoint, TimePoint)>;

/// A linear piece of an arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcSegment {
    pub owner_id: String,
    pub start: TimePoint,
    pub end: TimePoint,
    pub piece: Piece,
}

fn period_of(schema: &ValidSchema) -> TimePoint {
    schema.period.unwrap_or_else(|| {
        panic!(
            "resource {} is not periodic; use find_conflict_cliques",
            schema.resource_id
        )
    })
}

fn pieces(
    interval: &AllocationInterval,
    period: TimePoint,
) -> impl Iterator<Item = (TimePoint, TimePoint, Piece)> {
    let split = if interval.wraps() {
        [
            Some((TimePoint::ZERO, interval.end, Piece::Head)),
            Some((interval.start, period, Piece::Tail)),
        ]
    } else {
        [Some((interval.start, interval.end, Piece::Whole)), None]
    };
    split.into_iter().flatten()
}

/// Cuts every wrapping arc into head and tail pieces; other arcs stay whole.
/// Segments come out in arc-id order, head before tail.
///
/// # Panics
/// If the schema is not periodic.
pub fn split_wrapping(schema: &ValidSchema) -> Vec<ArcSegment> {
    let period = period_of(schema);
    let mut intervals: Vec<_> = schema.intervals.iter().collect();
    intervals.sort_by(|a, b| a.id.cmp(&b.id));
    intervals
        .into_iter()
        .flat_map(|interval| {
            pieces(interval, period).map(move |(start, end, piece)| ArcSegment {
                owner_id: interval.id.clone(),
                start,
                end,
                piece,
            })
        })
        .collect()
}

/// Greedy conflict cliques of a periodic resource.
///
/// The segment cliques are mapped back to their arcs. Sets with fewer than
/// two arcs and sets contained in another emitted set are dropped; the rest
/// keep emission order. The result is sound but may miss maximal cliques.
///
/// # Panics
/// If the schema is not periodic.
pub fn find_conflict_cliques_circular(schema: &ValidSchema) -> Vec<ConflictClique> {
    let segments = split_wrapping(schema);
    // Owner rank in id order; segments are grouped by owner already.
    let mut owner_rank = Vec::with_capacity(segments.len());
    for (i, segment) in segments.iter().enumerate() {
        let rank = match owner_rank.last() {
            Some(&r) if segments[i - 1].owner_id == segment.owner_id => r,
            Some(&r) => r + 1,
            None => 0,
        };
        owner_rank.push(rank);
    }
    let spans: Vec<_> = segments.iter().map(|s| (s.start, s.end)).collect();

    let mut found: Vec<(Vec<usize>, Window)> = Vec::new();
    // Segments are already in (owner id, piece) order.
    for members in sweep_spans(&spans, |a, b| a.cmp(&b)).iter() {
        let window = span_window(members.iter().map(|&m| spans[m as usize]));
        let mut owners: Vec<usize> = members.iter().map(|&m| owner_rank[m as usize]).collect();
        owners.sort_unstable();
        owners.dedup();
        if owners.len() >= 2 {
            found.push((owners, window));
        }
    }

    let keep: Vec<bool> = (0..found.len())
        .map(|i| {
            !found.iter().enumerate().any(|(j, (other, _))| {
                j != i && is_subset(&found[i].0, other) && (other.len() > found[i].0.len() || j < i)
            })
        })
        .collect();

    let owner_ids: Vec<&str> = {
        let mut ids: Vec<&str> = Vec::new();
        for s in &segments {
            if ids.last() != Some(&s.owner_id.as_str()) {
                ids.push(&s.owner_id);
            }
        }
        ids
    };
    found
        .into_iter()
        .zip(keep)
        .filter(|(_, keep)| *keep)
        .map(|((owners, window), _)| ConflictClique {
            members: owners.iter().map(|&o| owner_ids[o].to_string()).collect(),
            window,
        })
        .collect()
}

/// Both slices sorted ascending.
fn is_subset(small: &[usize], large: &[usize]) -> bool {
    let mut large = large.iter();
    small.iter().all(|x| large.any(|y| y == x))
}

/// Maximal cliques (size >= 2) of the circular-arc graph that no greedy
/// clique contains. Empty means the greedy result is complete for this
/// instance.
pub fn find_missed_cliques(schema: &ValidSchema) -> Result<Vec<Vec<String>>, OracleError> {
    if schema.intervals.len() > MAX_ENUMERATION_VERTICES {
        return Err(OracleError::TooLarge {
            what: "arcs",
            count: schema.intervals.len(),
            limit: MAX_ENUMERATION_VERTICES,
        });
    }
    let greedy = find_conflict_cliques_circular(schema);
    let graph = oracle::build_graph(schema);
    Ok(oracle::enumerate_maximal_cliques(&graph)?
        .into_iter()
        .filter(|clique| clique.len() >= 2)
        .filter(|clique| {
            !greedy
                .iter()
                .any(|g| clique.iter().all(|id| g.members.binary_search(id).is_ok()))
        })
        .collect())
}

/// Samples random arc models with integer endpoints until one has a missed
/// clique of at least three arcs. Returns `None` after `attempts` misses.
pub fn search_incomplete_instance<R: Rng>(
    rng: &mut R,
    arcs: usize,
    period: u64,
    attempts: usize,
) -> Option<(ValidSchema, Vec<Vec<String>>)> {
    assert!(period >= 2 && arcs <= MAX_ENUMERATION_VERTICES);
    for _ in 0..attempts {
        let intervals = (0..arcs)
            .map(|i| {
                let start = rng.gen_range(0..period);
                let length = rng.gen_range(1..period);
                let end = (start + length) % period;
                AllocationInterval::new(((b'A' + i as u8) as char).to_string(), start, end)
            })
            .collect();
        let schema =
            crate::schema::validate_schema(ResourceSchema::periodic("search", period, intervals))
                .expect("generated endpoints lie in [0, P)");
        let missed = find_missed_cliques(&schema).expect("within guard");
        if missed.iter().any(|m| m.len() >= 3) {
            return Some((schema, missed));
        }
    }
    None
}
