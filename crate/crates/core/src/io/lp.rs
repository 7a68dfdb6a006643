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

//! Plain-text LP output.
//!
//! The emitted subset, one item per line:
//!
//! ```text
//! document   := objective "Subject To" constraint* "Bounds" bound* binaries? "End"
//! objective  := ("Minimize" | "Maximize") NL "obj: " (expr | "0")
//! constraint := NAME ": " expr (" <= " | " = ") NUMBER
//! bound      := "0 <= " NAME " <= 1"
//! binaries   := "Binary" NL (NAME NL)*
//! expr       := term ((" + " | " - ") term)*     first term may start with "- "
//! term       := (NUMBER " ")? NAME               coefficient 1 is omitted
//! NUMBER     := digits ("." digits)? | digits "/" digits
//! NAME       := [A-Za-z_][A-Za-z0-9_.]*
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::polytope::{ConstraintSystem, ObjectiveSense, Variable};
use crate::time::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("variables {first:?} and {second:?} share the LP name {name}")]
    NameCollision {
        name: String,
        first: String,
        second: String,
    },
    #[error("{0:?} is not a valid LP name")]
    InvalidName(String),
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

fn describe(var: &Variable) -> String {
    format!("{:?}", var.key)
}

fn check_names(system: &ConstraintSystem) -> Result<(), LpError> {
    let mut seen: HashMap<&str, &Variable> = HashMap::new();
    for var in &system.variables {
        if !valid_name(&var.name) {
            return Err(LpError::InvalidName(var.name.clone()));
        }
        if let Some(first) = seen.insert(&var.name, var) {
            return Err(LpError::NameCollision {
                name: var.name.clone(),
                first: describe(first),
                second: describe(var),
            });
        }
    }
    for constraint in &system.constraints {
        if !valid_name(&constraint.name) {
            return Err(LpError::InvalidName(constraint.name.clone()));
        }
    }
    Ok(())
}

fn expression(out: &mut String, terms: &BTreeMap<usize, Rational>, variables: &[Variable]) {
    for (k, (&var, coefficient)) in terms.iter().enumerate() {
        let negative = coefficient.is_negative();
        match (k, negative) {
            (0, false) => {}
            (0, true) => out.push_str("- "),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        let magnitude = coefficient.abs();
        if !magnitude.is_one() {
            out.push_str(&format_rational(&magnitude));
            out.push(' ');
        }
        out.push_str(&variables[var].name);
    }
}

/// Writes the system in the LP subset above. Output is deterministic.
pub fn write_lp(system: &ConstraintSystem) -> Result<String, LpError> {
    check_names(system)?;
    let mut out = String::new();
    match &system.objective {
        Some(objective) if !objective.terms.is_empty() => {
            out.push_str(match objective.sense {
                ObjectiveSense::Minimize => "Minimize\n",
                ObjectiveSense::Maximize => "Maximize\n",
            });
            out.push_str("obj: ");
            expression(&mut out, &objective.terms, &system.variables);
            out.push('\n');
        }
        Some(objective) if objective.sense == ObjectiveSense::Maximize => {
            out.push_str("Maximize\nobj: 0\n")
        }
        _ => out.push_str("Minimize\nobj: 0\n"),
    }

    out.push_str("Subject To\n");
    for constraint in &system.constraints {
        write!(out, "{}: ", constraint.name).unwrap();
        expression(&mut out, &constraint.terms, &system.variables);
        writeln!(
            out,
            " {} {}",
            constraint.sense,
            format_rational(&constraint.rhs)
        )
        .unwrap();
    }

    out.push_str("Bounds\n");
    for var in &system.variables {
        writeln!(out, "0 <= {} <= 1", var.name).unwrap();
    }

    if system.integral && !system.variables.is_empty() {
        out.push_str("Binary\n");
        for var in &system.variables {
            writeln!(out, "{}", var.name).unwrap();
        }
    }
    out.push_str("End\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{LinearConstraint, Objective, Sense, VarKey};

    /// Name, `(variable, numer, denom)` terms, sense and right-hand side.
    type Row<'a> = (&'a str, &'a [(usize, i128, i128)], Sense, i128);

    fn system_with(vars: &[&str], rows: &[Row<'_>]) -> ConstraintSystem {
        let mut system = ConstraintSystem::new();
        for v in vars {
            system.add_variable(VarKey::Interval(v.to_string()));
        }
        for &(name, terms, sense, rhs) in rows {
            system
                .add_constraint(LinearConstraint {
                    name: name.into(),
                    terms: terms
                        .iter()
                        .map(|&(v, p, q)| (v, Rational::new(p, q)))
                        .collect(),
                    sense,
                    rhs: Rational::from_integer(rhs),
                    provenance: vec![],
                })
                .unwrap();
        }
        system
    }

    #[test]
    fn equality_line() {
        let mut system = ConstraintSystem::new();
        let a = system.add_variable(VarKey::Assignment {
            train: "1".into(),
            assignment: 1,
        });
        let b = system.add_variable(VarKey::Assignment {
            train: "1".into(),
            assignment: 2,
        });
        system
            .add_constraint(LinearConstraint {
                name: "t1".into(),
                terms: [(a, Rational::one()), (b, Rational::one())].into(),
                sense: Sense::Eq,
                rhs: Rational::one(),
                provenance: vec![],
            })
            .unwrap();
        let lp = write_lp(&system).unwrap();
        assert_eq!(
            lp,
            "Minimize\nobj: 0\nSubject To\nt1: x_1_1 + x_1_2 = 1\nBounds\n0 <= x_1_1 <= 1\n0 <= x_1_2 <= 1\nBinary\nx_1_1\nx_1_2\nEnd\n"
        );
    }

    #[test]
    fn clique_line() {
        let system = system_with(
            &["A", "B", "C"],
            &[("c1", &[(0, 1, 1), (1, 1, 1), (2, 1, 1)], Sense::Le, 1)],
        );
        assert!(write_lp(&system)
            .unwrap()
            .contains("\nc1: x_A + x_B + x_C <= 1\n"));
    }

    #[test]
    fn empty_system() {
        assert_eq!(
            write_lp(&ConstraintSystem::new()).unwrap(),
            "Minimize\nobj: 0\nSubject To\nBounds\nEnd\n"
        );
    }

    #[test]
    fn fractional_and_negative_coefficients() {
        let mut system = system_with(
            &["A", "B", "C"],
            &[("r1", &[(0, -1, 1), (1, 3, 2), (2, -1, 3)], Sense::Le, 2)],
        );
        system.objective = Some(Objective {
            sense: ObjectiveSense::Maximize,
            terms: [(0, Rational::from_integer(2)), (2, Rational::one())].into(),
        });
        let lp = write_lp(&system).unwrap();
        assert!(lp.starts_with("Maximize\nobj: 2 x_A + x_C\n"), "{lp}");
        assert!(
            lp.contains("\nr1: - x_A + 1.5 x_B - 1/3 x_C <= 2\n"),
            "{lp}"
        );
    }

    #[test]
    fn name_collision_after_sanitizing() {
        let system = system_with(&["a b", "a/b"], &[]);
        assert!(
            matches!(write_lp(&system), Err(LpError::NameCollision { name, .. }) if name == "x_a_b")
        );
    }
}
