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

//! Searches random periodic arc models for one where the greedy sweep misses
//! a maximal clique of three or more arcs, and prints it as an allocation
//! document.
//!
//! ```text
//! cargo run --example find_incomplete_instance -- [seed] [arcs] [period]
//! ```

use std::collections::BTreeMap;

use conflict_cliques::circular::search_incomplete_instance;
use conflict_cliques::io::{write_allocation, AllocationFile};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn main() {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let seed = args.first().copied().unwrap_or(2024);
    let arcs = args.get(1).copied().unwrap_or(5) as usize;
    let period = args.get(2).copied().unwrap_or(60);

    let mut rng = StdRng::seed_from_u64(seed);
    let Some((schema, missed)) = search_incomplete_instance(&mut rng, arcs, period, 100_000) else {
        eprintln!("no instance found");
        std::process::exit(1);
    };
    for clique in &missed {
        eprintln!("missed: {{{}}}", clique.join(","));
    }
    let file = AllocationFile {
        schemas: vec![schema],
        trains: BTreeMap::new(),
        warnings: Vec::new(),
    };
    print!("{}", write_allocation(&file));
}
