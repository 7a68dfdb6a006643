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

//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::circular::{find_conflict_cliques_circular, find_missed_cliques};
use crate::io::{self, AllocationFile, IoError, ParseOptions};
use crate::oracle::{self, OracleError, MAX_COVER_VERTICES, MAX_ENUMERATION_VERTICES};
use crate::polytope::{emit_clique_constraints, emit_stab1, half_vector_witness, WitnessError};
use crate::schema::{validate_schema, ResourceSchema, ValidSchema};
use crate::sweep::{clique_window, find_conflict_cliques};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;
pub const EXIT_GUARD: i32 = 4;

/// Random windows checked per oversized resource when `--seed` is given.
const VERIFY_SAMPLES: usize = 32;

#[derive(Debug, Parser)]
#[command(
    name = "conflict-cliques",
    version,
    about = "Conflict cliques and stable-set LPs for resource allocation intervals"
)]
pub struct Cli {
    /// Reject unknown fields in input documents.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Seed for randomized verification sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find the conflict cliques of every resource.
    Cliques {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the stable-set ILP in LP format.
    Lp {
        input: PathBuf,
        #[arg(long, value_enum)]
        formulation: Formulation,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the sweep against the brute-force oracle.
    Verify {
        input: PathBuf,
        /// Clique document the computed one must equal.
        #[arg(long)]
        expected: Option<PathBuf>,
    },
    /// Certify the all-1/2 point for arc models of chordless odd cycles.
    WitnessOddcycle { input: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Formulation {
    Pairwise,
    Clique,
}

/// Runs the CLI and returns its exit status.
pub fn cli_main<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = write!(stderr, "{}", err.render());
            return if err.use_stderr() { EXIT_IO } else { EXIT_OK };
        }
    };
    let options = ParseOptions { strict: cli.strict };
    let result = match &cli.command {
        Command::Cliques { input, out } => load(input, options, stderr).and_then(|file| {
            let reports: Vec<_> = file.schemas.iter().map(io::clique_report).collect();
            emit(out.as_deref(), &io::write_cliques(&reports), stdout)
        }),
        Command::Lp {
            input,
            formulation,
            out,
        } => load(input, options, stderr)
            .and_then(|file| lp(&file, *formulation, out.as_deref(), stdout)),
        Command::Verify { input, expected } => load(input, options, stderr)
            .and_then(|file| verify(&file, expected.as_deref(), cli.seed, stdout)),
        Command::WitnessOddcycle { input } => {
            load(input, options, stderr).and_then(|file| witness(&file, stdout))
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure { code, message }) => {
            let _ = writeln!(stderr, "error: {message}");
            code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl ToString) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(err: IoError) -> Self {
        let code = if err.is_validation() {
            EXIT_VALIDATION
        } else {
            EXIT_IO
        };
        Failure::new(code, err)
    }
}

fn load(
    path: &Path,
    options: ParseOptions,
    stderr: &mut dyn Write,
) -> Result<AllocationFile, Failure> {
    let text = io::read_input(path)?;
    let file = io::parse_allocation(&text, options)?;
    for warning in &file.warnings {
        let _ = writeln!(stderr, "warning: {warning}");
    }
    Ok(file)
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) if path != Path::new("-") => std::fs::write(path, text)
            .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display()))),
        _ => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(EXIT_IO, e)),
    }
}

fn lp(
    file: &AllocationFile,
    formulation: Formulation,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let trains = file.train_assignments();
    let system = match formulation {
        Formulation::Pairwise => emit_stab1(&file.schemas, &trains),
        Formulation::Clique => emit_clique_constraints(&file.schemas, &trains),
    }
    .map_err(|e| Failure::new(EXIT_VALIDATION, e))?;
    let text = io::write_lp(&system).map_err(|e| Failure::new(EXIT_VALIDATION, e))?;
    emit(out, &text, stdout)
}

/// Outcome of the oracle checks on one (sub)schema.
#[derive(Debug, Default)]
struct Verdict {
    mismatches: Vec<String>,
    missed: Vec<Vec<String>>,
    cliques: usize,
    min_cover: Option<usize>,
}

fn check_schema(schema: &ValidSchema) -> Result<Verdict, OracleError> {
    let graph = oracle::build_graph(schema);
    let mut verdict = Verdict::default();
    let greedy = if schema.is_periodic() {
        find_conflict_cliques_circular(schema)
    } else {
        find_conflict_cliques(schema)
    };
    verdict.cliques = greedy.len();

    for clique in &greedy {
        let members: Vec<usize> = clique
            .members
            .iter()
            .filter_map(|m| graph.index_of(m))
            .collect();
        if members.len() != clique.members.len() || !graph.is_clique(&members) {
            verdict
                .mismatches
                .push(format!("{{{}}} is not a clique", clique.members.join(",")));
        }
        if !schema.is_periodic() {
            let window = clique_window(clique.members.iter().filter_map(|m| schema.interval(m)));
            if window != clique.window {
                verdict.mismatches.push(format!(
                    "{{{}}} has a wrong window",
                    clique.members.join(",")
                ));
            }
        }
    }

    let contains =
        |set: &[String], a: &str, b: &str| set.iter().any(|m| m == a) && set.iter().any(|m| m == b);
    if schema.is_periodic() {
        verdict.missed = find_missed_cliques(schema)?;
    } else {
        let mut found: Vec<Vec<String>> = greedy.iter().map(|c| c.members.clone()).collect();
        found.sort();
        let expected: Vec<Vec<String>> = oracle::enumerate_maximal_cliques(&graph)?
            .into_iter()
            .filter(|c| c.len() >= 2)
            .collect();
        if found != expected {
            verdict.mismatches.push(format!(
                "sweep found {} cliques but the graph has {} maximal cliques of size >= 2",
                found.len(),
                expected.len()
            ));
        }
        if graph.vertex_count() <= MAX_COVER_VERTICES {
            let minimum = oracle::min_edge_clique_cover_size(&graph)?;
            if minimum != greedy.len() {
                verdict.mismatches.push(format!(
                    "minimum edge clique cover is {minimum}, sweep used {}",
                    greedy.len()
                ));
            }
            verdict.min_cover = Some(minimum);
        }
    }

    for (a, b) in graph.edges() {
        let (a, b) = (&graph.vertices()[a], &graph.vertices()[b]);
        let covered = greedy.iter().any(|c| contains(&c.members, a, b))
            || verdict.missed.iter().any(|m| contains(m, a, b));
        if !covered {
            verdict
                .mismatches
                .push(format!("conflict {a}-{b} is not covered"));
        }
    }
    Ok(verdict)
}

/// Contiguous runs of intervals in start order, each small enough for the
/// oracle.
fn sample_windows(schema: &ValidSchema, rng: &mut StdRng) -> Vec<ValidSchema> {
    let mut intervals = schema.intervals.clone();
    intervals.sort_by(|a, b| (a.start, &a.id).cmp(&(b.start, &b.id)));
    let last_offset = intervals.len() - MAX_ENUMERATION_VERTICES;
    (0..VERIFY_SAMPLES)
        .map(|_| {
            let offset = rng.gen_range(0..=last_offset);
            let window = intervals[offset..offset + MAX_ENUMERATION_VERTICES].to_vec();
            let sub = ResourceSchema {
                resource_id: schema.resource_id.clone(),
                period: schema.period,
                intervals: window,
            };
            validate_schema(sub).expect("subset of a valid schema")
        })
        .collect()
}

fn verify(
    file: &AllocationFile,
    expected: Option<&Path>,
    seed: Option<u64>,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let mut mismatched = false;
    let mut guarded = Vec::new();
    let mut rng = seed.map(StdRng::seed_from_u64);
    let mut out = String::new();

    for schema in &file.schemas {
        let id = &schema.resource_id;
        let verdicts = if schema.intervals.len() <= MAX_ENUMERATION_VERTICES {
            vec![check_schema(schema)]
        } else if let Some(rng) = rng.as_mut() {
            sample_windows(schema, rng)
                .iter()
                .map(check_schema)
                .collect()
        } else {
            guarded.push(id.clone());
            out.push_str(&format!(
                "resource {id}: skipped, {} intervals exceed the oracle guard of {MAX_ENUMERATION_VERTICES} (pass --seed to sample)\n",
                schema.intervals.len()
            ));
            continue;
        };
        let sampled = verdicts.len() > 1;
        for (n, verdict) in verdicts.into_iter().enumerate() {
            let label = if sampled {
                format!("resource {id} sample {n}")
            } else {
                format!("resource {id}")
            };
            let verdict = match verdict {
                Ok(v) => v,
                Err(err) => {
                    guarded.push(id.clone());
                    out.push_str(&format!("{label}: {err}\n"));
                    continue;
                }
            };
            if !verdict.mismatches.is_empty() {
                mismatched = true;
                for m in &verdict.mismatches {
                    out.push_str(&format!("{label}: MISMATCH {m}\n"));
                }
            } else if !verdict.missed.is_empty() {
                let missed: Vec<String> = verdict
                    .missed
                    .iter()
                    .map(|m| format!("{{{}}}", m.join(",")))
                    .collect();
                out.push_str(&format!(
                    "{label}: complete=false, {} sound cliques, greedy missed {}\n",
                    verdict.cliques,
                    missed.join(" ")
                ));
            } else {
                let cover = verdict
                    .min_cover
                    .map(|c| format!(", minimum edge clique cover {c}"))
                    .unwrap_or_default();
                out.push_str(&format!(
                    "{label}: ok, {} cliques{cover}\n",
                    verdict.cliques
                ));
            }
        }
    }

    if let Some(path) = expected {
        let computed: Vec<_> = file.schemas.iter().map(io::clique_report).collect();
        let expected = io::parse_clique_document(&io::read_input(path)?)?;
        if expected.resources != computed {
            mismatched = true;
            out.push_str(&format!(
                "expected cliques in {}: MISMATCH\n",
                path.display()
            ));
        } else {
            out.push_str(&format!("expected cliques in {}: ok\n", path.display()));
        }
    }

    stdout
        .write_all(out.as_bytes())
        .map_err(|e| Failure::new(EXIT_IO, e))?;
    if mismatched {
        Err(Failure::new(EXIT_MISMATCH, "verification mismatch"))
    } else if !guarded.is_empty() {
        Err(Failure::new(
            EXIT_GUARD,
            format!("oracle guard exceeded for {}", guarded.join(", ")),
        ))
    } else {
        Ok(())
    }
}

fn witness(file: &AllocationFile, stdout: &mut dyn Write) -> Result<(), Failure> {
    let mut uncertified = Vec::new();
    for schema in &file.schemas {
        let report = half_vector_witness(schema).map_err(|e| match e {
            WitnessError::NotOddHole(_) => Failure::new(
                EXIT_VALIDATION,
                format!("resource {}: {e}", schema.resource_id),
            ),
            WitnessError::Oracle(_) => {
                Failure::new(EXIT_GUARD, format!("resource {}: {e}", schema.resource_id))
            }
        })?;
        writeln!(stdout, "{report}").map_err(|e| Failure::new(EXIT_IO, e))?;
        if !report.certified() {
            uncertified.push(schema.resource_id.clone());
        }
    }
    if uncertified.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_MISMATCH,
            format!("no certificate for {}", uncertified.join(", ")),
        ))
    }
}
