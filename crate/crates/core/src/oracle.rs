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

//! Brute-force reference machinery used to check the sweep.
//!
//! Everything here works on an explicit intersection graph and is
//! exponential in the number of vertices. Each operation refuses inputs above
//! its guard instead of running for hours.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::schema::{intervals_conflict, ValidSchema};

/// Vertex limit for clique and stable-set enumeration.
pub const MAX_ENUMERATION_VERTICES: usize = 20;
/// Vertex limit for the exact edge clique cover search. Ten vertices have
/// at most 45 edges, which fit one `u64` mask.
pub const MAX_COVER_VERTICES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large: {count} {what} exceeds the oracle guard of {limit}")]
    TooLarge {
        what: &'static str,
        count: usize,
        limit: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate vertex {0}")]
    DuplicateVertex(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("self-loop on {0}")]
    SelfLoop(String),
}

/// Simple undirected graph over interval or arc ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionGraph {
    vertices: Vec<String>,
    adjacency: Vec<BTreeSet<usize>>,
}

impl IntersectionGraph {
    pub fn new<S: Into<String>>(
        vertices: impl IntoIterator<Item = S>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.as_str()) {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut adjacency = vec![BTreeSet::new(); vertices.len()];
        for (a, b) in edges {
            let n = vertices.len();
            if a >= n || b >= n {
                return Err(GraphError::UnknownVertex(format!("#{}", a.max(b))));
            }
            if a == b {
                return Err(GraphError::SelfLoop(vertices[a].clone()));
            }
            adjacency[a].insert(b);
            adjacency[b].insert(a);
        }
        Ok(IntersectionGraph {
            vertices,
            adjacency,
        })
    }

    /// Builds a graph from vertex labels and labelled edges.
    pub fn from_labels(vertices: &[&str], edges: &[(&str, &str)]) -> Result<Self, GraphError> {
        let index: HashMap<&str, usize> =
            vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let lookup = |v: &str| {
            index
                .get(v)
                .copied()
                .ok_or_else(|| GraphError::UnknownVertex(v.to_string()))
        };
        let edges = edges
            .iter()
            .map(|&(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>, GraphError>>()?;
        IntersectionGraph::new(vertices.iter().copied(), edges)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn neighbors(&self, vertex: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[vertex].iter().copied()
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.adjacency[vertex].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].contains(&b)
    }

    /// True when both ids are vertices and adjacent.
    pub fn adjacent(&self, a: &str, b: &str) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(a), Some(b)) => self.has_edge(a, b),
            _ => false,
        }
    }

    /// Edges as index pairs `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (a, neighbors) in self.adjacency.iter().enumerate() {
            edges.extend(neighbors.range(a + 1..).map(|&b| (a, b)));
        }
        edges
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Whether every pair in `members` is adjacent.
    pub fn is_clique(&self, members: &[usize]) -> bool {
        members
            .iter()
            .enumerate()
            .all(|(i, &a)| members[i + 1..].iter().all(|&b| self.has_edge(a, b)))
    }

    fn labels(&self, mask: u32) -> Vec<String> {
        let mut labels: Vec<String> = bits(mask).map(|v| self.vertices[v].clone()).collect();
        labels.sort();
        labels
    }

    fn neighbor_masks(&self) -> Vec<u32> {
        self.adjacency
            .iter()
            .map(|n| n.iter().fold(0u32, |m, &v| m | 1 << v))
            .collect()
    }

    fn guard(&self, limit: usize) -> Result<(), OracleError> {
        if self.vertex_count() > limit {
            return Err(OracleError::TooLarge {
                what: "vertices",
                count: self.vertex_count(),
                limit,
            });
        }
        Ok(())
    }
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |b| mask & (1 << b) != 0)
}

/// Intersection graph of a schema by direct pairwise tests, vertices in id
/// order. Periodic schemas use closed-arc semantics.
pub fn build_graph(schema: &ValidSchema) -> IntersectionGraph {
    let mut intervals: Vec<_> = schema.intervals.iter().collect();
    intervals.sort_by(|a, b| a.id.cmp(&b.id));
    let periodic = schema.is_periodic();
    let mut edges = Vec::new();
    for (i, a) in intervals.iter().enumerate() {
        for (j, b) in intervals.iter().enumerate().skip(i + 1) {
            if intervals_conflict(a, b, periodic) {
                edges.push((i, j));
            }
        }
    }
    IntersectionGraph::new(intervals.iter().map(|i| i.id.clone()), edges)
        .expect("validated schema has unique ids")
}

/// Inclusion-maximal cliques as vertex bitmasks (bit `i` = vertex `i`).
///
/// Bron-Kerbosch with Tomita pivoting.
pub fn maximal_clique_masks(graph: &IntersectionGraph) -> Result<Vec<u32>, OracleError> {
    graph.guard(MAX_ENUMERATION_VERTICES)?;
    let neighbors = graph.neighbor_masks();
    let all = if graph.vertex_count() == 0 {
        return Ok(Vec::new());
    } else {
        (1u32 << graph.vertex_count()) - 1
    };
    let mut found = Vec::new();
    bron_kerbosch(0, all, 0, &neighbors, &mut found);
    found.sort_unstable();
    Ok(found)
}

fn bron_kerbosch(
    clique: u32,
    mut candidates: u32,
    mut excluded: u32,
    neighbors: &[u32],
    found: &mut Vec<u32>,
) {
    if candidates == 0 {
        if excluded == 0 {
            found.push(clique);
        }
        return;
    }
    let pivot = bits(candidates | excluded)
        .max_by_key(|&u| (candidates & neighbors[u]).count_ones())
        .expect("nonempty");
    for v in bits(candidates & !neighbors[pivot]).collect::<Vec<_>>() {
        let bit = 1u32 << v;
        bron_kerbosch(
            clique | bit,
            candidates & neighbors[v],
            excluded & neighbors[v],
            neighbors,
            found,
        );
        candidates &= !bit;
        excluded |= bit;
    }
}

/// All inclusion-maximal cliques, isolated vertices included, each as a
/// sorted id list; the collection is sorted.
pub fn enumerate_maximal_cliques(
    graph: &IntersectionGraph,
) -> Result<Vec<Vec<String>>, OracleError> {
    let mut cliques: Vec<Vec<String>> = maximal_clique_masks(graph)?
        .into_iter()
        .map(|m| graph.labels(m))
        .collect();
    cliques.sort();
    Ok(cliques)
}

/// Fewest cliques whose union covers every edge.
///
/// Exact set cover over the maximal cliques, by iterative deepening on the
/// lowest uncovered edge.
pub fn min_edge_clique_cover_size(graph: &IntersectionGraph) -> Result<usize, OracleError> {
    graph.guard(MAX_COVER_VERTICES)?;
    let edges = graph.edges();
    if edges.is_empty() {
        return Ok(0);
    }
    let cover_masks: Vec<u64> = maximal_clique_masks(graph)?
        .into_iter()
        .map(|clique| {
            edges
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| clique & (1 << a) != 0 && clique & (1 << b) != 0)
                .fold(0u64, |m, (e, _)| m | 1 << e)
        })
        .filter(|&m| m != 0)
        .collect();
    let everything = u64::MAX >> (64 - edges.len());
    for budget in 1..=cover_masks.len() {
        if coverable(0, everything, budget, &cover_masks) {
            return Ok(budget);
        }
    }
    unreachable!("the maximal cliques cover every edge")
}

fn coverable(covered: u64, everything: u64, budget: usize, sets: &[u64]) -> bool {
    let missing = everything & !covered;
    if missing == 0 {
        return true;
    }
    if budget == 0 {
        return false;
    }
    let edge = 1u64 << missing.trailing_zeros();
    sets.iter()
        .filter(|&&s| s & edge != 0)
        .any(|&s| coverable(covered | s, everything, budget - 1, sets))
}

/// Every stable set as a vertex bitmask, in increasing mask order.
pub fn stable_set_masks(graph: &IntersectionGraph) -> Result<Vec<u32>, OracleError> {
    graph.guard(MAX_ENUMERATION_VERTICES)?;
    let neighbors = graph.neighbor_masks();
    let total = 1u64 << graph.vertex_count();
    Ok((0..total)
        .map(|m| m as u32)
        .filter(|&m| bits(m).all(|v| neighbors[v] & m == 0))
        .collect())
}

/// Every stable set, the empty set included.
pub fn enumerate_stable_sets(graph: &IntersectionGraph) -> Result<Vec<Vec<String>>, OracleError> {
    Ok(stable_set_masks(graph)?
        .into_iter()
        .map(|m| graph.labels(m))
        .collect())
}

/// Stability number of the graph.
pub fn max_stable_set_size(graph: &IntersectionGraph) -> Result<usize, OracleError> {
    Ok(stable_set_masks(graph)?
        .into_iter()
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0))
}
