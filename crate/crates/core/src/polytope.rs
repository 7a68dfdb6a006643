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

//! Stable-set constraint systems over train assignments.
//!
//! Variable `x_{i}_{j}` selects assignment `j` of train `i`. Both
//! formulations require exactly one assignment per train. The pairwise
//! formulation then forbids every conflicting pair of assignments of
//! distinct trains; the clique formulation instead bounds the sum over each
//! conflict clique found on a resource by one.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{CheckedMul, One, Zero};
use thiserror::Error;

use crate::circular::{find_conflict_cliques_circular, find_missed_cliques};
use crate::oracle::{self, OracleError};
use crate::schema::{intervals_conflict, ConflictClique, ValidSchema};
use crate::sweep::find_conflict_cliques;
use crate::time::{checked_sum, format_rational, Rational};

/// What a variable stands for.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKey {
    /// Assignment `assignment` (1-based) of train `train`.
    Assignment { train: String, assignment: u32 },
    /// A single interval, used where intervals carry no train labels.
    Interval(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub key: VarKey,
    pub name: String,
}

impl Variable {
    pub fn new(key: VarKey) -> Self {
        let name = match &key {
            VarKey::Assignment { train, assignment } => {
                format!("x_{}_{}", sanitize(train), assignment)
            }
            VarKey::Interval(id) => format!("x_{}", sanitize(id)),
        };
        Variable { key, name }
    }
}

/// Replaces every character outside `[A-Za-z0-9_.]` with `_`.
pub fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub name: String,
    /// Variable index to nonzero coefficient.
    pub terms: BTreeMap<usize, Rational>,
    pub sense: Sense,
    pub rhs: Rational,
    /// Resources that produced this constraint.
    pub provenance: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveSense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub sense: ObjectiveSense,
    pub terms: BTreeMap<usize, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("constraint {0} has no terms")]
    EmptyConstraint(String),
    #[error("constraint {0} has a zero coefficient")]
    ZeroCoefficient(String),
    #[error("constraint {name} references undeclared variable #{index}")]
    UndeclaredVariable { name: String, index: usize },
}

/// Linear constraints over 0/1 variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintSystem {
    pub variables: Vec<Variable>,
    pub constraints: Vec<LinearConstraint>,
    /// Every variable is binary.
    pub integral: bool,
    /// Absent for a pure feasibility problem.
    pub objective: Option<Objective>,
    index: HashMap<VarKey, usize>,
}

impl ConstraintSystem {
    pub fn new() -> Self {
        ConstraintSystem {
            integral: true,
            ..Default::default()
        }
    }

    /// Declares a variable, returning the index of an existing one with the
    /// same key.
    pub fn add_variable(&mut self, key: VarKey) -> usize {
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.variables.len();
        self.index.insert(key.clone(), i);
        self.variables.push(Variable::new(key));
        i
    }

    pub fn variable_index(&self, key: &VarKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn add_constraint(&mut self, constraint: LinearConstraint) -> Result<(), SystemError> {
        if constraint.terms.is_empty() {
            return Err(SystemError::EmptyConstraint(constraint.name));
        }
        if constraint.terms.values().any(Zero::is_zero) {
            return Err(SystemError::ZeroCoefficient(constraint.name));
        }
        if let Some(&index) = constraint
            .terms
            .keys()
            .find(|&&i| i >= self.variables.len())
        {
            return Err(SystemError::UndeclaredVariable {
                name: constraint.name,
                index,
            });
        }
        self.constraints.push(constraint);
        Ok(())
    }

    pub fn constraint(&self, name: &str) -> Option<&LinearConstraint> {
        self.constraints.iter().find(|c| c.name == name)
    }

    /// Human-readable form of one constraint, e.g. `x_A + x_B <= 1`.
    pub fn describe(&self, constraint: &LinearConstraint) -> String {
        let lhs: Vec<String> = constraint
            .terms
            .iter()
            .map(|(&v, c)| {
                let name = &self.variables[v].name;
                if c.is_one() {
                    name.clone()
                } else {
                    format!("{} {name}", format_rational(c))
                }
            })
            .collect();
        format!(
            "{} {} {}",
            lhs.join(" + "),
            constraint.sense,
            format_rational(&constraint.rhs)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("resource {resource}: interval {interval} has no train/assignment label")]
    MissingLabel { resource: String, interval: String },
    #[error("resource {resource}: interval {interval} references unknown train {train}")]
    UnknownTrain {
        resource: String,
        interval: String,
        train: String,
    },
    #[error("resource {resource}: interval {interval} references assignment {assignment} of train {train}, which has {count}")]
    AssignmentOutOfRange {
        resource: String,
        interval: String,
        train: String,
        assignment: u32,
        count: u32,
    },
    #[error("train {0} has no assignments")]
    NoAssignments(String),
}

/// Declares all `x_{i}_{j}` and the one-assignment-per-train equalities, and
/// maps every interval to its variable.
fn assignment_system(
    schemas: &[ValidSchema],
    train_assignments: &BTreeMap<String, u32>,
) -> Result<(ConstraintSystem, Vec<Vec<usize>>), EmitError> {
    let mut system = ConstraintSystem::new();
    for (t, (train, &count)) in train_assignments.iter().enumerate() {
        if count == 0 {
            return Err(EmitError::NoAssignments(train.clone()));
        }
        let terms = (1..=count)
            .map(|assignment| {
                let v = system.add_variable(VarKey::Assignment {
                    train: train.clone(),
                    assignment,
                });
                (v, Rational::one())
            })
            .collect();
        system
            .add_constraint(LinearConstraint {
                name: format!("t{}", t + 1),
                terms,
                sense: Sense::Eq,
                rhs: Rational::one(),
                provenance: Vec::new(),
            })
            .expect("well-formed equality");
    }

    let mut interval_vars = Vec::with_capacity(schemas.len());
    for schema in schemas {
        let mut vars = Vec::with_capacity(schema.intervals.len());
        for interval in &schema.intervals {
            let (train, assignment) = match (&interval.train, interval.assignment) {
                (Some(t), Some(a)) => (t, a),
                _ => {
                    return Err(EmitError::MissingLabel {
                        resource: schema.resource_id.clone(),
                        interval: interval.id.clone(),
                    })
                }
            };
            let count = *train_assignments
                .get(train)
                .ok_or_else(|| EmitError::UnknownTrain {
                    resource: schema.resource_id.clone(),
                    interval: interval.id.clone(),
                    train: train.clone(),
                })?;
            if assignment == 0 || assignment > count {
                return Err(EmitError::AssignmentOutOfRange {
                    resource: schema.resource_id.clone(),
                    interval: interval.id.clone(),
                    train: train.clone(),
                    assignment,
                    count,
                });
            }
            let key = VarKey::Assignment {
                train: train.clone(),
                assignment,
            };
            vars.push(system.variable_index(&key).expect("declared above"));
        }
        interval_vars.push(vars);
    }
    Ok((system, interval_vars))
}

fn train_of(system: &ConstraintSystem, var: usize) -> &str {
    match &system.variables[var].key {
        VarKey::Assignment { train, .. } => train,
        VarKey::Interval(id) => id,
    }
}

/// Adds `sum_{v in vars} x_v <= 1` constraints, merging identical variable
/// sets and recording every resource that produced them.
fn add_packing_constraints(
    system: &mut ConstraintSystem,
    prefix: &str,
    groups: impl IntoIterator<Item = (BTreeSet<usize>, String)>,
) {
    let mut position: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    let mut packed: Vec<(BTreeSet<usize>, Vec<String>)> = Vec::new();
    for (vars, resource) in groups {
        match position.get(&vars) {
            Some(&at) => {
                let provenance = &mut packed[at].1;
                if !provenance.contains(&resource) {
                    provenance.push(resource);
                }
            }
            None => {
                position.insert(vars.clone(), packed.len());
                packed.push((vars, vec![resource]));
            }
        }
    }
    for (n, (vars, provenance)) in packed.into_iter().enumerate() {
        system
            .add_constraint(LinearConstraint {
                name: format!("{prefix}{}", n + 1),
                terms: vars.into_iter().map(|v| (v, Rational::one())).collect(),
                sense: Sense::Le,
                rhs: Rational::one(),
                provenance,
            })
            .expect("well-formed packing constraint");
    }
}

/// Conflict-graph formulation: one equality per train and
/// `x_ik + x_jl <= 1` for every conflicting pair of distinct trains.
pub fn emit_stab1(
    schemas: &[ValidSchema],
    train_assignments: &BTreeMap<String, u32>,
) -> Result<ConstraintSystem, EmitError> {
    let (mut system, interval_vars) = assignment_system(schemas, train_assignments)?;
    let mut pairs = Vec::new();
    for (schema, vars) in schemas.iter().zip(&interval_vars) {
        let periodic = schema.is_periodic();
        for (i, a) in schema.intervals.iter().enumerate() {
            for (j, b) in schema.intervals.iter().enumerate().skip(i + 1) {
                let (u, v) = (vars[i], vars[j]);
                if train_of(&system, u) != train_of(&system, v)
                    && intervals_conflict(a, b, periodic)
                {
                    pairs.push(([u, v].into_iter().collect(), schema.resource_id.clone()));
                }
            }
        }
    }
    add_packing_constraints(&mut system, "p", pairs);
    Ok(system)
}

/// Greedy conflict cliques of a resource, linear or periodic.
pub fn resource_cliques(schema: &ValidSchema) -> Vec<ConflictClique> {
    if schema.is_periodic() {
        find_conflict_cliques_circular(schema)
    } else {
        find_conflict_cliques(schema)
    }
}

/// Clique formulation: one equality per train and `sum x <= 1` over the
/// assignments in each conflict clique found by the sweep. Cliques whose
/// assignments all belong to one train are left to the train equality.
pub fn emit_clique_constraints(
    schemas: &[ValidSchema],
    train_assignments: &BTreeMap<String, u32>,
) -> Result<ConstraintSystem, EmitError> {
    let (mut system, interval_vars) = assignment_system(schemas, train_assignments)?;
    let mut groups = Vec::new();
    for (schema, vars) in schemas.iter().zip(&interval_vars) {
        let position: HashMap<&str, usize> = schema
            .intervals
            .iter()
            .enumerate()
            .map(|(i, iv)| (iv.id.as_str(), i))
            .collect();
        for clique in resource_cliques(schema) {
            let clique_vars: BTreeSet<usize> = clique
                .members
                .iter()
                .map(|m| vars[position[m.as_str()]])
                .collect();
            let trains: BTreeSet<&str> =
                clique_vars.iter().map(|&v| train_of(&system, v)).collect();
            if trains.len() >= 2 {
                groups.push((clique_vars, schema.resource_id.clone()));
            }
        }
    }
    add_packing_constraints(&mut system, "c", groups);
    Ok(system)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub constraint: String,
    pub sense: Sense,
    pub lhs: Rational,
    pub rhs: Rational,
    /// `rhs - lhs`; negative for a violated `<=`, nonzero for a violated `=`.
    pub slack: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn inequality_violations(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.sense == Sense::Le)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointError {
    #[error("no value for variable {0}")]
    Missing(String),
    #[error("value {value} for {name} outside [0, 1]")]
    OutOfRange { name: String, value: String },
    #[error("arithmetic overflow evaluating {0}")]
    Overflow(String),
}

/// Evaluates every constraint at `point` (variable name to value) exactly.
pub fn check_point(
    system: &ConstraintSystem,
    point: &BTreeMap<String, Rational>,
) -> Result<FeasibilityReport, PointError> {
    let mut values = Vec::with_capacity(system.variables.len());
    for var in &system.variables {
        let value = *point
            .get(&var.name)
            .ok_or_else(|| PointError::Missing(var.name.clone()))?;
        if value < Rational::zero() || value > Rational::one() {
            return Err(PointError::OutOfRange {
                name: var.name.clone(),
                value: format_rational(&value),
            });
        }
        values.push(value);
    }
    let mut report = FeasibilityReport::default();
    for constraint in &system.constraints {
        let products: Vec<Rational> = constraint
            .terms
            .iter()
            .map(|(&v, c)| {
                c.checked_mul(&values[v])
                    .ok_or_else(|| PointError::Overflow(constraint.name.clone()))
            })
            .collect::<Result<_, _>>()?;
        let lhs =
            checked_sum(&products).ok_or_else(|| PointError::Overflow(constraint.name.clone()))?;
        let satisfied = match constraint.sense {
            Sense::Le => lhs <= constraint.rhs,
            Sense::Eq => lhs == constraint.rhs,
        };
        if !satisfied {
            report.violations.push(Violation {
                constraint: constraint.name.clone(),
                sense: constraint.sense,
                lhs,
                rhs: constraint.rhs,
                slack: constraint.rhs - lhs,
            });
        }
    }
    Ok(report)
}

/// The point assigning `value` to every variable.
pub fn uniform_point(system: &ConstraintSystem, value: Rational) -> BTreeMap<String, Rational> {
    system
        .variables
        .iter()
        .map(|v| (v.name.clone(), value))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("intersection graph is not a chordless odd cycle of length >= 5: {0}")]
    NotOddHole(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Certificate that the all-1/2 point satisfies the clique description of a
/// chordless odd cycle yet lies outside its stable set polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub resource_id: String,
    pub cycle_length: usize,
    /// The clique constraints over the arcs, one per maximal clique.
    pub clique_system: ConstraintSystem,
    pub half_point: FeasibilityReport,
    /// Sum of the all-1/2 point over every vertex.
    pub half_sum: Rational,
    pub stability_number: usize,
}

impl WitnessReport {
    pub fn half_point_feasible(&self) -> bool {
        self.half_point.is_feasible()
    }

    /// The rank inequality `sum x <= alpha(G)` cuts off the half point.
    pub fn outside_stable_set_polytope(&self) -> bool {
        self.half_sum > Rational::from_integer(self.stability_number as i128)
    }

    pub fn certified(&self) -> bool {
        self.half_point_feasible() && self.outside_stable_set_polytope()
    }
}

impl fmt::Display for WitnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "resource {}: chordless cycle of length {}",
            self.resource_id, self.cycle_length
        )?;
        writeln!(
            f,
            "  clique constraints: {}, all-1/2 point {}",
            self.clique_system.constraints.len(),
            if self.half_point_feasible() {
                "feasible"
            } else {
                "infeasible"
            }
        )?;
        let relation = if self.outside_stable_set_polytope() {
            ">"
        } else {
            "<="
        };
        writeln!(
            f,
            "  rank inequality: sum x = {}/{} {} {} = max stable set size",
            self.half_sum.numer(),
            self.half_sum.denom(),
            relation,
            self.stability_number
        )?;
        write!(f, "  certified: {}", self.certified())
    }
}

/// Checks that the arc model realizes a chordless odd cycle `C_{2k+1}`,
/// `k >= 2`, and certifies the all-1/2 point against its clique system.
///
/// The clique system uses every maximal clique: the greedy ones plus any
/// the greedy missed.
pub fn half_vector_witness(schema: &ValidSchema) -> Result<WitnessReport, WitnessError> {
    let graph = oracle::build_graph(schema);
    let n = graph.vertex_count();
    if n < 5 || n.is_multiple_of(2) {
        return Err(WitnessError::NotOddHole(format!("{n} vertices")));
    }
    if let Some(v) = (0..n).find(|&v| graph.degree(v) != 2) {
        return Err(WitnessError::NotOddHole(format!(
            "{} has degree {}",
            graph.vertices()[v],
            graph.degree(v)
        )));
    }
    // 2-regular, so connected means a single cycle through all vertices.
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        if !std::mem::replace(&mut seen[v], true) {
            stack.extend(graph.neighbors(v));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(WitnessError::NotOddHole("disconnected".into()));
    }

    let mut cliques: Vec<Vec<String>> = resource_cliques(schema)
        .into_iter()
        .map(|c| c.members)
        .collect();
    if schema.is_periodic() {
        cliques.extend(find_missed_cliques(schema)?);
    }
    let mut system = ConstraintSystem::new();
    for id in graph.vertices() {
        system.add_variable(VarKey::Interval(id.clone()));
    }
    let groups = cliques.into_iter().map(|members| {
        let vars = members
            .iter()
            .map(|m| {
                system
                    .variable_index(&VarKey::Interval(m.clone()))
                    .expect("vertex")
            })
            .collect();
        (vars, schema.resource_id.clone())
    });
    let groups: Vec<_> = groups.collect();
    add_packing_constraints(&mut system, "c", groups);

    let half = Rational::new(1, 2);
    let half_point = check_point(&system, &uniform_point(&system, half)).expect("complete point");
    Ok(WitnessReport {
        resource_id: schema.resource_id.clone(),
        cycle_length: n,
        clique_system: system,
        half_point,
        half_sum: half * Rational::from_integer(n as i128),
        stability_number: oracle::max_stable_set_size(&graph)?,
    })
}
