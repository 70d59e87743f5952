use chainunify::errors::SolverError;
use chainunify::pipeline::{self, SolveOptions};
use chainunify::theory::TheoryId;
use chainunify::{attack, encode, parse, print, rewrite};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeSet;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

/// Unification modulo block-chaining theories (bc0, bc1, dbc).
#[derive(Parser)]
#[command(name = "chainunify", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a unification problem file.
    Unify(UnifyArgs),
    /// Normalize a single term under a theory's rewrite system.
    Normalize(NormalizeArgs),
    /// Encode a monotone 1-in-3-SAT instance as a dbc problem file.
    #[command(name = "encode-1in3")]
    Encode1in3 { file: PathBuf },
    /// Run the scripted CBC attack demonstration.
    AttackDemo(AttackArgs),
}

#[derive(Args)]
struct UnifyArgs {
    file: PathBuf,
    /// Enumerate the full finite set of unifiers.
    #[arg(long, conflicts_with = "decide")]
    all: bool,
    /// Decide unifiability and print one nil-completed unifier (default).
    #[arg(long)]
    decide: bool,
    /// Don't-know branch budget (also via CHAINUNIFY_MAX_BRANCHES).
    #[arg(long)]
    max_branches: Option<usize>,
    /// Print rule applications and the propagation-graph arcs.
    #[arg(long)]
    trace: bool,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct NormalizeArgs {
    /// File holding a single term (`-` for stdin).
    file: PathBuf,
    #[arg(long, default_value = "bc0")]
    theory: String,
    /// Names to read as element constants (comma-separated),
    /// overriding the case convention.
    #[arg(long, value_delimiter = ',')]
    constants: Vec<String>,
}

#[derive(Args)]
struct AttackArgs {
    /// Theory override; bc0 shows the attack failing without xor.
    #[arg(long, default_value = "bc1")]
    theory: String,
    /// Run the leak-proof variant with the namestamp as second block.
    #[arg(long)]
    variant_namestamp_second: bool,
}

const EXIT_OK: u8 = 0;
const EXIT_NOT_UNIFIABLE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn read_input(path: &PathBuf) -> Result<String, String> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| e.to_string())?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn error_exit(e: &SolverError) -> u8 {
    match e {
        SolverError::BudgetExceeded(_) => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

fn cmd_unify(args: &UnifyArgs) -> u8 {
    let text = match read_input(&args.file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let problem = match parse::parse_problem(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return error_exit(&e);
        }
    };
    let max_branches = args
        .max_branches
        .or_else(|| {
            std::env::var("CHAINUNIFY_MAX_BRANCHES")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(10_000);
    let all = args.all && !args.decide;
    let opts = SolveOptions {
        all,
        nil_complete: !all,
        max_branches,
    };
    if args.trace {
        let g = chainunify::graph::PropagationGraph::build(&problem);
        eprint!("{}", g.dump());
    }
    let report = match pipeline::solve(&problem, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return error_exit(&e);
        }
    };
    if args.trace {
        for line in &report.trace {
            eprintln!("{line}");
        }
    }
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&print::report_to_json(&report)).unwrap()
        );
    } else {
        print!("{}", print::report_to_string(&report));
    }
    if report.unifiable() {
        EXIT_OK
    } else {
        EXIT_NOT_UNIFIABLE
    }
}

fn cmd_normalize(args: &NormalizeArgs) -> u8 {
    let Some(theory) = TheoryId::parse(&args.theory) else {
        eprintln!("error: unknown theory `{}`", args.theory);
        return EXIT_USAGE;
    };
    let text = match read_input(&args.file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let constants: BTreeSet<String> = args.constants.iter().cloned().collect();
    let term = match parse::parse_term(text.trim(), &constants) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Some(sym) = theory.signature_violation(&term) {
        eprintln!(
            "error: {}",
            SolverError::Signature {
                symbol: sym.into(),
                theory: theory.to_string(),
            }
        );
        return EXIT_USAGE;
    }
    let nf = rewrite::normalize(&term, theory);
    println!("{}", print::term_to_string(&nf));
    EXIT_OK
}

fn cmd_encode(file: &PathBuf) -> u8 {
    let text = match read_input(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match encode::parse_clauses(&text) {
        Ok(clauses) => {
            print!("{}", encode::encode_to_problem_file(&clauses));
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn cmd_attack(args: &AttackArgs) -> u8 {
    let Some(theory) = TheoryId::parse(&args.theory) else {
        eprintln!("error: unknown theory `{}`", args.theory);
        return EXIT_USAGE;
    };
    let result = if args.variant_namestamp_second {
        attack::attack_demo_namestamp_second()
    } else {
        attack::attack_demo(theory)
    };
    match result {
        Ok(r) => {
            print!("{}", r.text);
            if r.success {
                EXIT_OK
            } else {
                EXIT_NOT_UNIFIABLE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            error_exit(&e)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Unify(args) => cmd_unify(args),
        Command::Normalize(args) => cmd_normalize(args),
        Command::Encode1in3 { file } => cmd_encode(file),
        Command::AttackDemo(args) => cmd_attack(args),
    };
    ExitCode::from(code)
}
