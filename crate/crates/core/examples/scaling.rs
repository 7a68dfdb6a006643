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

//! Times the linear sweep on random schemas of growing size.
//!
//! ```text
//! cargo run --release --example scaling -- [runs]
//! ```

use std::time::{Duration, Instant};

use conflict_cliques::{
    find_conflict_cliques, validate_schema, AllocationInterval, ResourceSchema, ValidSchema,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_schema(n: usize, seed: u64) -> ValidSchema {
    let mut rng = StdRng::seed_from_u64(seed);
    let horizon = 100 * n as u64;
    let intervals = (0..n)
        .map(|i| {
            let start = rng.gen_range(0..horizon);
            let length = rng.gen_range(0..1_000);
            AllocationInterval::new(format!("i{i:07}"), start, start + length)
        })
        .collect();
    validate_schema(ResourceSchema::new("r", intervals)).unwrap()
}

fn timed_run(schema: &ValidSchema) -> Duration {
    let start = Instant::now();
    let cliques = find_conflict_cliques(schema);
    let elapsed = start.elapsed();
    assert!(!cliques.is_empty());
    elapsed
}

fn main() {
    let runs: usize = std::env::args().nth(1).map_or(5, |a| a.parse().unwrap());
    for n in [10_000, 100_000, 1_000_000] {
        let schema = random_schema(n, n as u64);
        timed_run(&schema);
        let mut times: Vec<Duration> = (0..runs).map(|_| timed_run(&schema)).collect();
        times.sort();
        println!("n = {n:>9}: median {:?}", times[runs / 2]);
    }
}
