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

//! Greedy sweep that groups conflicting allocation intervals into cliques.
//!
//! Starts and ends of all intervals are sorted by time, with every start
//! placed before every end at the same instant so that touching intervals
//! conflict. Walking the events while tracking the open intervals, the open
//! set is emitted as a clique at the first end event following a start
//! event, provided it holds more than one interval.
//!
//! On interval graphs the emitted cliques are exactly the maximal cliques of
//! size at least two, and they form a minimum edge clique cover.

use std::cmp::Ordering;

use num_integer::Integer;

use crate::schema::{AllocationInterval, ConflictClique, ValidSchema};
use crate::time::TimePoint;

/// One endpoint of an interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event<'a> {
    pub time: TimePoint,
    pub interval_id: &'a str,
    pub is_endtime: bool,
}

/// Endpoint of the span at `index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct IndexedEvent {
    pub is_endtime: bool,
    pub index: u32,
}

impl IndexedEvent {
    pub fn time<T: Copy>(self, spans: &[(T, T)]) -> T {
        let (start, end) = spans[self.index as usize];
        if self.is_endtime {
            end
        } else {
            start
        }
    }
}

fn fit(scaled: i128) -> Option<u64> {
    u64::try_from(scaled).ok().filter(|&x| x < 1 << 63)
}

/// A span as `(start, (end, index))`.
type Entry<T> = (T, (T, u32));

fn entries<T>(spans: impl Iterator<Item = (T, T)>) -> Vec<Entry<T>> {
    let entry = |(index, (start, end))| (start, (end, index as u32));
    spans.enumerate().map(entry).collect()
}

/// Endpoint times scaled to integers by their common denominator.
pub(crate) struct IntegerTimes {
    pub entries: Vec<Entry<u64>>,
    denom: i128,
}

impl IntegerTimes {
    /// `None` if the common denominator or a scaled time does not fit.
    fn new(spans: impl Iterator<Item = (TimePoint, TimePoint)>) -> Option<Self> {
        let mut times = IntegerTimes {
            entries: Vec::with_capacity(spans.size_hint().0),
            denom: 1,
        };
        for (index, (start, end)) in spans.enumerate() {
            times.widen(start)?;
            times.widen(end)?;
            let entry = (times.scale(start)?, (times.scale(end)?, index as u32));
            times.entries.push(entry);
        }
        Some(times)
    }

    /// Makes the common denominator a multiple of the one of `t`.
    fn widen(&mut self, t: TimePoint) -> Option<()> {
        let denom = *t.value().denom();
        if self.denom % denom != 0 {
            let factor = denom / self.denom.gcd(&denom);
            self.denom = self.denom.checked_mul(factor)?;
            for (start, (end, _)) in &mut self.entries {
                for x in [start, end] {
                    *x = fit((*x as i128).checked_mul(factor)?)?;
                }
            }
        }
        Some(())
    }

    fn scale(&self, t: TimePoint) -> Option<u64> {
        let (numer, denom) = (*t.value().numer(), *t.value().denom());
        if denom == self.denom {
            fit(numer)
        } else {
            fit(numer.checked_mul(self.denom / denom)?)
        }
    }
}

fn check_len(len: usize) {
    assert!(len < u32::MAX as usize, "too many intervals: {len}");
}

/// Sorted event list over `spans`. Ties at equal time put starts before
/// ends; ties of the same kind are broken by `tie` on the span indices.
///
/// # Panics
/// If there are `u32::MAX` spans or more.
pub(crate) fn sorted_events<F>(spans: &[(TimePoint, TimePoint)], tie: F) -> Vec<IndexedEvent>
where
    F: Fn(usize, usize) -> Ordering,
{
    check_len(spans.len());
    match IntegerTimes::new(spans.iter().copied()) {
        Some(times) => packed_events(&times.entries, tie),
        None => rational_events(spans, tie),
    }
}

/// Radix-sorts `2 * time + is_endtime` keys, then orders each run of equal
/// keys with `tie`.
fn packed_events<F>(entries: &[Entry<u64>], tie: F) -> Vec<IndexedEvent>
where
    F: Fn(usize, usize) -> Ordering,
{
    let mut keys: Vec<(u64, u32)> = Vec::with_capacity(2 * entries.len());
    for &(start, (end, index)) in entries {
        keys.push((start << 1, index));
        keys.push((end << 1 | 1, index));
    }
    // Stable, so equal keys stay in index order until `tie` reorders them.
    radsort::sort_by_key(&mut keys, |k| k.0);
    for run in keys.chunk_by_mut(|a, b| a.0 == b.0) {
        if run.len() > 1 {
            run.sort_unstable_by(|a, b| tie(a.1 as usize, b.1 as usize));
        }
    }
    keys.into_iter()
        .map(|(key, index)| IndexedEvent {
            is_endtime: key & 1 == 1,
            index,
        })
        .collect()
}

fn rational_events<T, F>(spans: &[(T, T)], tie: F) -> Vec<IndexedEvent>
where
    T: Ord + Copy,
    F: Fn(usize, usize) -> Ordering,
{
    let mut events = Vec::with_capacity(2 * spans.len());
    for index in 0..spans.len() as u32 {
        for is_endtime in [false, true] {
            events.push(IndexedEvent { is_endtime, index });
        }
    }
    // false < true, so starts come first.
    events.sort_unstable_by(|a, b| {
        (a.time(spans), a.is_endtime)
            .cmp(&(b.time(spans), b.is_endtime))
            .then_with(|| tie(a.index as usize, b.index as usize))
    });
    events
}

/// Emitted open sets, stored back to back.
#[derive(Debug, Default)]
pub(crate) struct Emitted {
    members: Vec<u32>,
    ends: Vec<usize>,
}

impl Emitted {
    /// Member labels of each emitted set, in emission order.
    pub fn iter(&self) -> impl Iterator<Item = &[u32]> + '_ {
        let starts = std::iter::once(0).chain(self.ends.iter().copied());
        starts.zip(&self.ends).map(|(a, &b)| &self.members[a..b])
    }
}

/// Open intervals plus the emission flag while walking the event list.
#[derive(Debug)]
pub(crate) struct SweepState {
    open: Vec<u32>,
    slot: Vec<u32>,
    new_starttime: bool,
}

impl SweepState {
    const CLOSED: u32 = u32::MAX;

    fn new(len: usize) -> Self {
        SweepState {
            open: Vec::new(),
            slot: vec![Self::CLOSED; len],
            new_starttime: false,
        }
    }

    fn open(&mut self, label: u32) {
        self.slot[label as usize] = self.open.len() as u32;
        self.open.push(label);
        self.new_starttime = true;
    }

    fn close(&mut self, label: u32, emit: &mut impl FnMut(&[u32])) {
        if self.new_starttime && self.open.len() > 1 {
            emit(&self.open);
            self.new_starttime = false;
        }
        let at = self.slot[label as usize];
        debug_assert_ne!(at, Self::CLOSED, "end event before start event");
        self.open.swap_remove(at as usize);
        if let Some(&moved) = self.open.get(at as usize) {
            self.slot[moved as usize] = at;
        }
        self.slot[label as usize] = Self::CLOSED;
    }

    /// Walks `(is_endtime, label)` events over labels `0..len`, passing each
    /// emitted open set to `emit`.
    fn run<E>(len: usize, events: impl IntoIterator<Item = (bool, u32)>, mut emit: E)
    where
        E: FnMut(&[u32]),
    {
        let mut state = SweepState::new(len);
        for (is_endtime, label) in events {
            if is_endtime {
                state.close(label, &mut emit);
            } else {
                state.open(label);
            }
        }
        debug_assert!(state.open.is_empty());
    }
}

/// Runs the sweep and returns the emitted open sets as span indices, in
/// emission order.
///
/// # Panics
/// If there are `u32::MAX` spans or more.
pub(crate) fn sweep_spans<F>(spans: &[(TimePoint, TimePoint)], tie: F) -> Emitted
where
    F: Fn(usize, usize) -> Ordering,
{
    let events = sorted_events(spans, tie);
    let mut emitted = Emitted::default();
    SweepState::run(
        spans.len(),
        events.into_iter().map(|e| (e.is_endtime, e.index)),
        |open| {
            emitted.members.extend_from_slice(open);
            emitted.ends.push(emitted.members.len());
        },
    );
    emitted
}

fn assert_linear(schema: &ValidSchema) {
    assert!(
        !schema.is_periodic(),
        "resource {} is periodic; use find_conflict_cliques_circular",
        schema.resource_id
    );
}

/// The 2n start/end events of a non-periodic schema in processing order.
///
/// # Panics
/// If the schema is periodic.
pub fn build_event_list(schema: &ValidSchema) -> Vec<Event<'_>> {
    assert_linear(schema);
    let intervals = &schema.intervals;
    let spans: Vec<_> = intervals.iter().map(|i| (i.start, i.end)).collect();
    sorted_events(&spans, |a, b| intervals[a].id.cmp(&intervals[b].id))
        .into_iter()
        .map(|e| Event {
            time: e.time(&spans),
            interval_id: &intervals[e.index as usize].id,
            is_endtime: e.is_endtime,
        })
        .collect()
}

/// Conflict cliques of a non-periodic resource, ordered by window end.
///
/// # Panics
/// If the schema is periodic or has `u32::MAX` intervals or more.
pub fn find_conflict_cliques(schema: &ValidSchema) -> Vec<ConflictClique> {
    assert_linear(schema);
    let intervals = &schema.intervals;
    check_len(intervals.len());
    let endpoints = intervals.iter().map(|i| (i.start, i.end));
    match IntegerTimes::new(endpoints.clone()) {
        Some(IntegerTimes { entries, denom }) => {
            let to_time = |t| TimePoint::from_ratio(t as i128, denom);
            collect_cliques(intervals, entries, to_time)
        }
        None => collect_cliques(intervals, entries(endpoints), |t| t),
    }
}

/// Times that can be sorted without looking at anything else.
trait SweepTime: Ord + Copy {
    /// Sorts `items` by time. Equal times end up in no particular order.
    fn sort_by_time<P: Copy>(items: &mut [(Self, P)]);
}

impl SweepTime for u64 {
    fn sort_by_time<P: Copy>(items: &mut [(u64, P)]) {
        radsort::sort_by_key(items, |item| item.0);
    }
}

impl SweepTime for TimePoint {
    fn sort_by_time<P: Copy>(items: &mut [(TimePoint, P)]) {
        items.sort_unstable_by_key(|item| item.0);
    }
}

fn sort_runs<P, F>(items: &mut [(impl Eq, P)], mut by: F)
where
    F: FnMut(&P, &P) -> Ordering,
{
    for run in items.chunk_by_mut(|a, b| a.0 == b.0) {
        if run.len() > 1 {
            run.sort_unstable_by(|a, b| by(&a.1, &b.1));
        }
    }
}

fn collect_cliques<T, F>(
    intervals: &[AllocationInterval],
    mut starts: Vec<Entry<T>>,
    to_time: F,
) -> Vec<ConflictClique>
where
    T: SweepTime,
    F: Fn(T) -> TimePoint,
{
    T::sort_by_time(&mut starts);
    sort_runs(&mut starts, |a, b| {
        intervals[a.1 as usize].id.cmp(&intervals[b.1 as usize].id)
    });

    // From here on an interval is labelled by its start rank.
    let mut ids = String::new();
    let mut id_ends = Vec::with_capacity(starts.len());
    for &(_, (_, index)) in &starts {
        ids.push_str(&intervals[index as usize].id);
        id_ends.push(ids.len());
    }
    let id = |r: u32| {
        let r = r as usize;
        let start = if r == 0 { 0 } else { id_ends[r - 1] };
        &ids[start..id_ends[r]]
    };

    let mut ends: Vec<(T, u32)> = starts
        .iter()
        .enumerate()
        .map(|(rank, &(_, (end, _)))| (end, rank as u32))
        .collect();
    T::sort_by_time(&mut ends);
    sort_runs(&mut ends, |&a, &b| id(a).cmp(id(b)));

    // Merge, with starts first at equal times.
    let mut next_start = 0;
    let events = ends.iter().flat_map(|&(end, label)| {
        let first = next_start;
        while next_start < starts.len() && starts[next_start].0 <= end {
            next_start += 1;
        }
        let opened = (first as u32..next_start as u32).map(|r| (false, r));
        opened.chain(std::iter::once((true, label)))
    });
    let mut cliques = Vec::new();
    let mut members = Vec::new();
    SweepState::run(starts.len(), events, |open| {
        members.clear();
        members.extend_from_slice(open);
        members.sort_unstable_by(|&a, &b| id(a).cmp(id(b)));
        let window = span_window(members.iter().map(|&m| {
            let (start, (end, _)) = starts[m as usize];
            (start, end)
        }));
        cliques.push(ConflictClique {
            members: members.iter().map(|&m| id(m).to_owned()).collect(),
            window: window.map(|(start, end)| (to_time(start), to_time(end))),
        });
    });
    cliques
}

/// Common active segment `[max start, min end]` of `members`, if any.
///
/// Present exactly when the members pairwise intersect.
pub fn clique_window<'a, I>(members: I) -> Option<(TimePoint, TimePoint)>
where
    I: IntoIterator<Item = &'a AllocationInterval>,
{
    span_window(members.into_iter().map(|i| (i.start, i.end)))
}

pub(crate) fn span_window<T: Ord + Copy>(
    spans: impl IntoIterator<Item = (T, T)>,
) -> Option<(T, T)> {
    let mut spans = spans.into_iter();
    let (mut latest_start, mut earliest_end) = spans.next()?;
    for (start, end) in spans {
        latest_start = latest_start.max(start);
        earliest_end = earliest_end.min(end);
    }
    (latest_start <= earliest_end).then_some((latest_start, earliest_end))
}
