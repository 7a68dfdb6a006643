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

//! Conflict cliques for resource allocation intervals.
//!
//! Each railway resource carries the time intervals during which candidate
//! train assignments would occupy it. [`sweep::find_conflict_cliques`]
//! groups overlapping intervals into cliques with one sorted sweep; for
//! periodic timetables [`circular::find_conflict_cliques_circular`] does the
//! same on a circle. [`polytope`] turns the cliques into stable-set
//! constraint systems, [`io`] reads and writes the file formats and
//! [`oracle`] holds the brute-force reference used to check all of it.

pub mod circular;
pub mod cli;
pub mod io;

pub mod oracle;
pub mod polytope;
pub mod schema;
pub mod sweep;
pub mod time;

pub use circular::{
    find_conflict_cliques_circular, find_missed_cliques, split_wrapping, ArcSegment, Piece,
};
pub use polytope::{
    check_point, emit_clique_constraints, emit_stab1, half_vector_witness, ConstraintSystem,
    LinearConstraint, Sense, VarKey, Variable,
};
pub use schema::{
    validate_schema, AllocationInterval, ConflictClique, ResourceSchema, ValidSchema,
    ValidationError,
};
pub use sweep::{build_event_list, clique_window, find_conflict_cliques, Event};
pub use time::{Rational, TimePoint};
