//! Strategy dispatch, the checked verdict pipeline and the batch harness.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::encoding::SearchStats;
use crate::matrix::{prove_matrix, MatrixMode, MatrixOptions, MatrixOutcome, Symmetry};
use crate::parse::load_problem;
use crate::problem::{axiomatize_equality, remove_tautologies, select_start_clauses, StartPolicy};
use crate::proof::{check_proof, Proof};
use crate::tableau::{prove_tableau, TableauOutcome};
use crate::term::Problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Encoding {
    Tableau,
    Matrix,
    #[default]
    Core,
    Hybrid,
}

impl Encoding {
    pub fn name(self) -> &'static str {
        match self {
            Encoding::Tableau => "tableau",
            Encoding::Matrix => "matrix",
            Encoding::Core => "core",
            Encoding::Hybrid => "hybrid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum EqualityMode {
    #[default]
    Axioms,
    Ignore,
}

/// Deliberate damage done to a proof before it is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fault {
    DropConnection,
    DropCopy,
}

#[derive(Clone, Debug)]
pub struct ProverConfig {
    pub encoding: Encoding,
    /// Largest matrix size (matrix), or limit on summed budgets (core, hybrid).
    pub max_size: usize,
    /// Largest path length tried by the tableau encoding.
    pub max_path: usize,
    pub timeout: Duration,
    pub start: StartPolicy,
    pub equality: EqualityMode,
    pub symmetry: Symmetry,
    pub regularity: bool,
    pub fault: Option<Fault>,
}

impl Default for ProverConfig {
    fn default() -> ProverConfig {
        ProverConfig {
            encoding: Encoding::Core,
            max_size: 32,
            max_path: 12,
            timeout: Duration::from_secs(30),
            start: StartPolicy::Conjecture,
            equality: EqualityMode::Axioms,
            symmetry: Symmetry::default(),
            regularity: false,
            fault: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Theorem,
    /// The search space is exhausted at every size.
    NoProof,
    GaveUp,
    Timeout,
    /// A proof was found but failed the checker.
    InternalError,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Theorem => "Theorem",
            Status::NoProof => "GaveUp (NoProofExists)",
            Status::GaveUp => "GaveUp",
            Status::Timeout => "Timeout",
            Status::InternalError => "Error (InternalError)",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ProverVerdict {
    pub status: Status,
    /// Absent for inputs that already contain an empty clause.
    pub proof: Option<Proof>,
    pub stats: SearchStats,
    pub wall: Duration,
    /// Checker complaint behind an `InternalError`.
    pub error: Option<String>,
}

/// The problem actually searched: tautologies removed, equality axioms
/// added if asked, start clauses chosen by the policy.
pub fn prepare(problem: &Problem, config: &ProverConfig) -> Problem {
    let mut p = remove_tautologies(problem);
    if config.equality == EqualityMode::Axioms {
        p = axiomatize_equality(&p);
    }
    p.start = select_start_clauses(&p, config.start);
    p
}

pub fn prove(problem: &Problem, config: &ProverConfig) -> ProverVerdict {
    let t0 = Instant::now();
    let mut stats = SearchStats::default();
    let done = |status, proof, stats, error| ProverVerdict { status, proof, stats, wall: t0.elapsed(), error };
    if !problem.empty_clauses.is_empty() {
        return done(Status::Theorem, None, stats, None);
    }
    let p = prepare(problem, config);
    let deadline = Some(t0 + config.timeout);
    let found = match config.encoding {
        Encoding::Tableau => {
            let limits: Vec<usize> = (1..=config.max_path).collect();
            match prove_tableau(&p, &limits, config.regularity, deadline, &mut stats) {
                TableauOutcome::Proof(pr) => Ok(pr),
                TableauOutcome::Exhausted(_) => Err(Status::GaveUp),
                TableauOutcome::Timeout => Err(Status::Timeout),
            }
        }
        enc => {
            let mode = match enc {
                Encoding::Matrix => MatrixMode::Em,
                Encoding::Core => MatrixMode::Eu,
                _ => MatrixMode::Eh,
            };
            let opts = MatrixOptions { mode, max_size: config.max_size, symmetry: config.symmetry, deadline };
            match prove_matrix(&p, &opts, &mut stats) {
                MatrixOutcome::Proof(pr) => Ok(pr),
                MatrixOutcome::NoProof => Err(Status::NoProof),
                MatrixOutcome::Exhausted(_) | MatrixOutcome::GaveUp => Err(Status::GaveUp),
                MatrixOutcome::Timeout => Err(Status::Timeout),
            }
        }
    };
    let mut proof = match found {
        Ok(pr) => pr,
        Err(status) => return done(status, None, stats, None),
    };
    if let Some(f) = config.fault {
        inject(&mut proof, f);
    }
    match check_proof(&p, &proof) {
        Ok(()) => done(Status::Theorem, Some(proof), stats, None),
        Err(e) => done(Status::InternalError, None, stats, Some(e.to_string())),
    }
}

fn inject(proof: &mut Proof, fault: Fault) {
    match fault {
        Fault::DropConnection => {
            proof.connections.pop();
        }
        Fault::DropCopy => {
            proof.copies.pop();
        }
    }
}

/// The searched problem for a file, as `prove` sees it. Useful for
/// checking or printing a proof against the right clause numbering.
pub fn load_prepared(path: &Path, root: Option<&Path>, config: &ProverConfig) -> Result<Problem, crate::parse::ParseError> {
    load_problem(path, root).map(|p| prepare(&p, config))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub file: String,
    pub status: String,
    pub wall_ms: u128,
    pub steps: u64,
    pub proof_size: Option<usize>,
}

/// Problem files of a directory, sorted by name.
fn problem_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "p") {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

pub fn bench_rows(dir: &Path, root: Option<&Path>, config: &ProverConfig) -> std::io::Result<Vec<BenchRow>> {
    let files = problem_files(dir)?;
    Ok(files
        .par_iter()
        .map(|path| {
            let file = path.file_name().unwrap().to_string_lossy().into_owned();
            let t0 = Instant::now();
            match load_problem(path, root) {
                Err(_) => BenchRow { file, status: "ParseError".into(), wall_ms: t0.elapsed().as_millis(), steps: 0, proof_size: None },
                Ok(p) => {
                    let v = prove(&p, config);
                    let status = match v.status {
                        Status::NoProof => "NoProof".to_string(),
                        Status::InternalError => "InternalError".to_string(),
                        s => s.to_string(),
                    };
                    BenchRow {
                        file,
                        status,
                        wall_ms: t0.elapsed().as_millis(),
                        steps: v.stats.steps,
                        proof_size: v.proof.as_ref().map(Proof::size),
                    }
                }
            }
        })
        .collect())
}

/// CSV report with one row per `.p` file and, for a non-empty directory, a
/// closing summary row.
pub fn run_benchmark(dir: &Path, root: Option<&Path>, config: &ProverConfig) -> std::io::Result<String> {
    let rows = bench_rows(dir, root, config)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["file", "status", "wall_ms", "steps", "proof_size"])?;
    for r in &rows {
        let size = r.proof_size.map(|s| s.to_string()).unwrap_or_default();
        w.write_record([r.file.clone(), r.status.clone(), r.wall_ms.to_string(), r.steps.to_string(), size])?;
    }
    if !rows.is_empty() {
        let solved = rows.iter().filter(|r| r.status == "Theorem").count();
        let wall: u128 = rows.iter().map(|r| r.wall_ms).sum();
        let steps: u64 = rows.iter().map(|r| r.steps).sum();
        w.write_record([
            "summary".to_string(),
            format!("{} solved {}/{}", config.encoding.name(), solved, rows.len()),
            wall.to_string(),
            steps.to_string(),
            String::new(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
