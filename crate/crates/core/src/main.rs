use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, ValueEnum};

use connsat::driver::{load_prepared, prove, run_benchmark, Encoding, EqualityMode, Fault, ProverConfig, Status};
use connsat::matrix::Symmetry;
use connsat::problem::StartPolicy;
use connsat::proof::print_proof;

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Tableau,
    Matrix,
    Core,
    Hybrid,
}

#[derive(Clone, Copy, ValueEnum)]
enum StartArg {
    Conjecture,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum EqualityArg {
    Axioms,
    Ignore,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    DropConnection,
    DropCopy,
}

/// Connection-calculus prover for TPTP CNF problems. Given a directory,
/// runs every `.p` file in it and prints a CSV report.
#[derive(Parser)]
#[command(name = "connsat", version)]
struct Args {
    /// Problem file, or a directory of problem files.
    file: PathBuf,
    #[arg(long, value_enum, default_value = "core")]
    encoding: EncodingArg,
    /// Largest matrix size (matrix) or total copy budget (core, hybrid).
    #[arg(long, default_value_t = 32)]
    max_size: usize,
    /// Largest path length for the tableau encoding.
    #[arg(long, default_value_t = 12)]
    max_path: usize,
    /// Seconds per problem.
    #[arg(long, default_value_t = 30.0, value_parser = positive_secs)]
    timeout: f64,
    #[arg(long, value_enum, default_value = "conjecture")]
    start: StartArg,
    #[arg(long, value_enum, default_value = "axioms")]
    equality: EqualityArg,
    #[arg(long)]
    no_copy_order: bool,
    #[arg(long)]
    no_subsumption: bool,
    #[arg(long)]
    no_instance_symmetry: bool,
    #[arg(long)]
    no_subst_order: bool,
    /// Forbid repeated literals on a tableau branch.
    #[arg(long)]
    regularity: bool,
    /// Write the proof here.
    #[arg(long)]
    proof_out: Option<PathBuf>,
    /// Print search statistics.
    #[arg(long)]
    stats: bool,
    /// Directory that `include` paths are resolved against.
    #[arg(long)]
    tptp_root: Option<PathBuf>,
    /// Damage each proof before it is checked (testing only).
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<FaultArg>,
}

fn positive_secs(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive number of seconds")),
    }
}

fn config(a: &Args) -> ProverConfig {
    ProverConfig {
        encoding: match a.encoding {
            EncodingArg::Tableau => Encoding::Tableau,
            EncodingArg::Matrix => Encoding::Matrix,
            EncodingArg::Core => Encoding::Core,
            EncodingArg::Hybrid => Encoding::Hybrid,
        },
        max_size: a.max_size,
        max_path: a.max_path,
        timeout: Duration::from_secs_f64(a.timeout),
        start: match a.start {
            StartArg::Conjecture => StartPolicy::Conjecture,
            StartArg::All => StartPolicy::All,
        },
        equality: match a.equality {
            EqualityArg::Axioms => EqualityMode::Axioms,
            EqualityArg::Ignore => EqualityMode::Ignore,
        },
        symmetry: Symmetry {
            copy_order: !a.no_copy_order,
            subsumption: !a.no_subsumption,
            instance: !a.no_instance_symmetry,
            subst_order: !a.no_subst_order,
        },
        regularity: a.regularity,
        fault: a.inject_fault.map(|f| match f {
            FaultArg::DropConnection => Fault::DropConnection,
            FaultArg::DropCopy => Fault::DropCopy,
        }),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = config(&args);
    let root = args.tptp_root.as_deref();
    if args.file.is_dir() {
        return match run_benchmark(&args.file, root, &cfg) {
            Ok(csv) => {
                print!("{csv}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("connsat: {}: {e}", args.file.display());
                ExitCode::from(2)
            }
        };
    }
    let problem = match connsat::parse::load_problem(&args.file, root) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("connsat: {e}");
            return ExitCode::from(2);
        }
    };
    let verdict = prove(&problem, &cfg);
    println!("% SZS status {} for {}", verdict.status, args.file.display());
    if let Some(e) = &verdict.error {
        eprintln!("connsat: proof rejected by checker: {e}");
    }
    if args.stats {
        let s = &verdict.stats;
        println!("% wall_ms: {}", verdict.wall.as_millis());
        println!("% steps: {}", s.steps);
        println!("% conflicts: {}", s.conflicts);
        println!("% decisions: {}", s.decisions);
        println!("% propagations: {}", s.propagations);
        println!("% final_checks: {}", s.final_checks);
        println!("% cores: {}", s.cores.len());
        if let Some(p) = &verdict.proof {
            println!("% proof_size: {}", p.size());
        }
    }
    if let (Some(out), Some(proof)) = (&args.proof_out, &verdict.proof) {
        // the proof refers to the searched problem, which may carry extra axioms
        let searched = load_prepared(&args.file, root, &cfg).expect("file parsed a moment ago");
        if let Err(e) = std::fs::write(out, print_proof(&searched, proof)) {
            eprintln!("connsat: cannot write {}: {e}", out.display());
            return ExitCode::from(2);
        }
    }
    if verdict.status == Status::Theorem {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
