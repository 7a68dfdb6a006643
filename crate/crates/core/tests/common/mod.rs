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

//! Shared generators and checkers for the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::iter::{Enumerate, Peekable};

use conflict_cliques::oracle::IntersectionGraph;
use conflict_cliques::polytope::{check_point, ConstraintSystem, VarKey};
use conflict_cliques::schema::intervals_conflict;
use conflict_cliques::{
    validate_schema, AllocationInterval, Rational, ResourceSchema, TimePoint, ValidSchema,
};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use regex::Regex;

pub fn label(i: usize) -> String {
    format!("v{i:02}")
}

/// Random rational in `[0, max]` with a denominator in `1..=denom`.
pub fn random_time<R: Rng>(rng: &mut R, max: i128, denom: i128) -> TimePoint {
    let q = rng.gen_range(1..=denom);
    TimePoint::from_ratio(rng.gen_range(0..=max * q), q)
}

/// Random time with a terminating decimal expansion, so it survives a
/// document round trip.
pub fn random_decimal_time<R: Rng>(rng: &mut R, max: i128) -> TimePoint {
    let q = *[1, 2, 4, 5, 10, 100].choose(rng).unwrap();
    TimePoint::from_ratio(rng.gen_range(0..=max * q), q)
}

/// Whether two distinct intervals share an endpoint value.
pub fn has_collision(schema: &ResourceSchema) -> bool {
    let mut seen = BTreeMap::new();
    for (i, iv) in schema.intervals.iter().enumerate() {
        for t in [iv.start, iv.end] {
            if let Some(&j) = seen.get(&t) {
                if j != i {
                    return true;
                }
            }
            seen.insert(t, i);
        }
    }
    false
}

/// Random linear schema of `n` intervals. With `collide`, at least one
/// endpoint is copied from another interval.
pub fn random_linear<R: Rng>(rng: &mut R, n: usize, collide: bool) -> ValidSchema {
    let mut intervals: Vec<AllocationInterval> = (0..n)
        .map(|i| {
            let a = random_time(rng, 12, 4);
            let b = random_time(rng, 12, 4);
            AllocationInterval::new(label(i), a.min(b), a.max(b))
        })
        .collect();
    if collide && n >= 2 {
        let copies = rng.gen_range(1..=n);
        for _ in 0..copies {
            let from = rng.gen_range(0..n);
            let to = (from + rng.gen_range(1..n)) % n;
            let t = if rng.gen() {
                intervals[from].start
            } else {
                intervals[from].end
            };
            let target = &mut intervals[to];
            if rng.gen() && t <= target.end {
                target.start = t;
            } else if t >= target.start {
                target.end = t;
            } else {
                target.start = t;
            }
        }
    }
    intervals.shuffle(rng);
    validate_schema(ResourceSchema::new("r", intervals)).unwrap()
}

/// Random periodic schema of `n` arcs on an integer period, some wrapping
/// and occasionally one covering the whole circle.
pub fn random_periodic<R: Rng>(rng: &mut R, n: usize) -> ValidSchema {
    let period: u64 = rng.gen_range(4..=24);
    let intervals = (0..n)
        .map(|i| {
            if rng.gen_ratio(1, 25) {
                return AllocationInterval::new(label(i), 0, period);
            }
            let start = TimePoint::from_ratio(rng.gen_range(0..2 * period as i128), 2);
            let length = TimePoint::from_ratio(rng.gen_range(0..2 * period as i128), 2);
            let end = start
                .checked_add(length)
                .unwrap()
                .rem_period(TimePoint::from_integer(period));
            AllocationInterval::new(label(i), start, end)
        })
        .collect();
    validate_schema(ResourceSchema::periodic("ring", period, intervals)).unwrap()
}

/// Labeled instance over one or two resources, at most `max_intervals`
/// intervals, with at most 12 assignment variables.
pub struct LabeledInstance {
    pub schemas: Vec<ValidSchema>,
    pub trains: BTreeMap<String, u32>,
}

pub fn random_labeled<R: Rng>(rng: &mut R, max_intervals: usize) -> LabeledInstance {
    let mut trains = BTreeMap::new();
    let train_count = rng.gen_range(2..=4);
    for t in 0..train_count {
        trains.insert(format!("T{t}"), rng.gen_range(1..=3));
    }
    let names: Vec<(String, u32)> = trains.iter().map(|(t, &m)| (t.clone(), m)).collect();
    let total = rng.gen_range(1..=max_intervals);
    let resources = rng.gen_range(1..=2.min(total));
    let mut schemas = Vec::new();
    let mut next = 0;
    for r in 0..resources {
        let count = if r + 1 == resources {
            total - next
        } else {
            rng.gen_range(1..=total - next - 1)
        };
        let periodic = rng.gen_ratio(1, 3);
        let period = 20u64;
        let intervals = (next..next + count)
            .map(|i| {
                let (train, m) = names.choose(rng).unwrap();
                let assignment = rng.gen_range(1..=*m);
                let a = rng.gen_range(0..period);
                let b = rng.gen_range(0..period);
                let (start, end) = if periodic {
                    (a, b)
                } else {
                    (a.min(b), a.max(b))
                };
                AllocationInterval::new(format!("i{i}"), start, end)
                    .with_label(train.clone(), assignment)
            })
            .collect();
        next += count;
        let id = format!("res{r}");
        let schema = if periodic {
            ResourceSchema::periodic(id, period, intervals)
        } else {
            ResourceSchema::new(id, intervals)
        };
        schemas.push(validate_schema(schema).unwrap());
    }
    LabeledInstance { schemas, trains }
}

/// Conflict graph over assignment variables, built pairwise from the
/// intervals. Vertices are variable names in system order.
pub fn assignment_conflict_graph(
    instance: &LabeledInstance,
    system: &ConstraintSystem,
) -> IntersectionGraph {
    let name = |iv: &AllocationInterval| {
        let key = VarKey::Assignment {
            train: iv.train.clone().unwrap(),
            assignment: iv.assignment.unwrap(),
        };
        system.variable_index(&key).unwrap()
    };
    let mut edges = BTreeSet::new();
    for schema in &instance.schemas {
        for (i, a) in schema.intervals.iter().enumerate() {
            for b in &schema.intervals[i + 1..] {
                let (u, v) = (name(a), name(b));
                if u != v && intervals_conflict(a, b, schema.is_periodic()) {
                    edges.insert((u.min(v), u.max(v)));
                }
            }
        }
    }
    IntersectionGraph::new(system.variables.iter().map(|v| v.name.clone()), edges).unwrap()
}

/// Every 0/1 point satisfying the system, as sets of variable names.
pub fn integer_feasible_sets(system: &ConstraintSystem) -> BTreeSet<Vec<String>> {
    let n = system.variables.len();
    assert!(n <= 20);
    (0u32..1 << n)
        .filter_map(|mask| {
            let point: BTreeMap<String, Rational> = system
                .variables
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let x = if mask & 1 << i != 0 {
                        Rational::one()
                    } else {
                        Rational::zero()
                    };
                    (v.name.clone(), x)
                })
                .collect();
            check_point(system, &point)
                .unwrap()
                .is_feasible()
                .then(|| selected(system, mask))
        })
        .collect()
}

fn selected(system: &ConstraintSystem, mask: u32) -> Vec<String> {
    let mut names: Vec<String> = (0..system.variables.len())
        .filter(|i| mask & 1 << i != 0)
        .map(|i| system.variables[i].name.clone())
        .collect();
    names.sort();
    names
}

/// Whether a set of variable names picks exactly one assignment per train.
pub fn one_per_train(
    system: &ConstraintSystem,
    names: &[String],
    trains: &BTreeMap<String, u32>,
) -> bool {
    let mut counts: BTreeMap<&str, usize> = trains.keys().map(|t| (t.as_str(), 0)).collect();
    for var in &system.variables {
        if let VarKey::Assignment { train, .. } = &var.key {
            if names.contains(&var.name) {
                *counts.get_mut(train.as_str()).unwrap() += 1;
            }
        }
    }
    counts.values().all(|&c| c == 1)
}

type Lines<'a> = Peekable<Enumerate<std::str::Lines<'a>>>;

fn expect(want: &str, lines: &mut Lines<'_>) -> Result<(), String> {
    match lines.next() {
        Some((_, l)) if l == want => Ok(()),
        Some((n, l)) => Err(format!("line {}: expected {want:?}, got {l:?}", n + 1)),
        None => Err(format!("expected {want:?}, got end of input")),
    }
}

/// Checks an LP document against the emitted subset, line by line.
pub fn check_lp_grammar(text: &str) -> Result<(), String> {
    let name = r"[A-Za-z_][A-Za-z0-9_.]*";
    let number = r"(?:[0-9]+(?:\.[0-9]+)?|[0-9]+/[0-9]+)";
    let term = format!(r"(?:{number} )?{name}");
    let expr = format!(r"(?:- )?{term}(?: [+-] {term})*");
    let objective = Regex::new(&format!(r"^obj: (?:{expr}|0)$")).unwrap();
    let constraint = Regex::new(&format!(r"^{name}: {expr} (?:<=|=) {number}$")).unwrap();
    let bound = Regex::new(&format!(r"^0 <= {name} <= 1$")).unwrap();
    let binary = Regex::new(&format!(r"^{name}$")).unwrap();

    if !text.ends_with('\n') {
        return Err("missing final newline".into());
    }
    let mut lines: Lines<'_> = text.lines().enumerate().peekable();
    match lines.next() {
        Some((_, "Minimize" | "Maximize")) => {}
        other => return Err(format!("bad objective sense {other:?}")),
    }
    match lines.next() {
        Some((_, l)) if objective.is_match(l) => {}
        other => return Err(format!("bad objective {other:?}")),
    }
    expect("Subject To", &mut lines)?;
    while let Some(&(n, l)) = lines.peek() {
        if l == "Bounds" {
            break;
        }
        if !constraint.is_match(l) {
            return Err(format!("line {}: bad constraint {l:?}", n + 1));
        }
        lines.next();
    }
    expect("Bounds", &mut lines)?;
    while let Some(&(n, l)) = lines.peek() {
        if l == "Binary" || l == "End" {
            break;
        }
        if !bound.is_match(l) {
            return Err(format!("line {}: bad bound {l:?}", n + 1));
        }
        lines.next();
    }
    if lines.peek().map(|&(_, l)| l) == Some("Binary") {
        lines.next();
        while let Some(&(n, l)) = lines.peek() {
            if l == "End" {
                break;
            }
            if !binary.is_match(l) {
                return Err(format!("line {}: bad binary {l:?}", n + 1));
            }
            lines.next();
        }
    }
    expect("End", &mut lines)?;
    match lines.next() {
        None => Ok(()),
        Some((n, l)) => Err(format!("line {}: trailing {l:?}", n + 1)),
    }
}
