//! Command-line front end: solve problem files, export graphs and traces,
//! and drive the group-extension oracle.
//!
//! Exit codes for `solve`: 0 unifiable, 1 not unifiable, 2 usage or parse
//! error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;

use exp_unify::e1;
use exp_unify::flatten::flatten_problem;
use exp_unify::gen::random_problem;
use exp_unify::graphs::{build_d, build_p, dot_d, dot_p};
use exp_unify::report::ResultRecord;
use exp_unify::rewrite::verify_unifier;
use exp_unify::solver::{resume, Outcome};
use exp_unify::term::{parse_problem, parse_term, Subst, Term};

#[derive(Parser)]
#[command(name = "exp-unify", version, about = "Unification modulo a partial theory of exponentiation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file of `lhs =? rhs` equations.
    Solve(SolveArgs),
    /// Operations in the abelian-group extension (verification only).
    E1 {
        #[command(subcommand)]
        command: E1Command,
    },
    /// Random termination suite: solve seeded random problems.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct SolveArgs {
    /// Problem file; `#` starts a comment.
    path: PathBuf,
    /// Emit the result as JSON.
    #[arg(long)]
    json: bool,
    /// Print every rule application.
    #[arg(long)]
    trace: bool,
    /// Check a positive verdict against the rewrite oracle.
    #[arg(long)]
    verify: bool,
    /// Write the final dependency graph D as DOT.
    #[arg(long, value_name = "FILE")]
    dot_d: Option<PathBuf>,
    /// Write the final propagation graph P as DOT.
    #[arg(long, value_name = "FILE")]
    dot_p: Option<PathBuf>,
    /// Override the step budget for the peak rules.
    #[arg(long)]
    fuel: Option<usize>,
}

#[derive(Subcommand)]
enum E1Command {
    /// Print the canonical form of a term.
    Normalize { term: String },
    /// Check an assignment file: `X := term` bindings, then `s =? t`
    /// equations, each instantiated and compared modulo the theory.
    Check { path: PathBuf },
    /// Emit and verify a gadget.
    Gadget {
        #[command(subcommand)]
        command: GadgetCommand,
    },
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// Five equations forcing Z2 (and Z) to the i*j-th power.
    Mult { i: i64, j: i64 },
    /// The two sides of circ(b,i) @ circ(b,j) = circ(b,i+j).
    Add { i: i64, j: i64 },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::E1 { command } => run_e1(command),
        Command::Fuzz { count, seed } => run_fuzz(count, seed),
    }
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn run_solve(args: SolveArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.path) {
        Ok(t) => t,
        Err(e) => return usage_error(format!("{}: {e}", args.path.display())),
    };
    let eqs = match parse_problem(&text) {
        Ok(eqs) => eqs,
        Err(e) => return usage_error(e),
    };
    let mut st = match flatten_problem(&eqs) {
        Ok(st) => st,
        Err(e) => return usage_error(e),
    };
    if let Some(fuel) = args.fuel {
        st.fuel = fuel;
    }
    st.trace_enabled = args.trace;

    let started = Instant::now();
    let (verdict, final_state) = match resume(st) {
        Ok(r) => r,
        Err(e) => return usage_error(e),
    };
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    if args.trace {
        for ev in &final_state.trace {
            eprintln!("trace: {ev}");
        }
    }
    if let Some(path) = &args.dot_d {
        if let Err(e) = std::fs::write(path, dot_d(&build_d(&final_state))) {
            return usage_error(e);
        }
    }
    if let Some(path) = &args.dot_p {
        if let Err(e) = std::fs::write(path, dot_p(&build_p(&final_state))) {
            return usage_error(e);
        }
    }

    let mut record = ResultRecord::from_verdict(&verdict, Some(wall_ms));
    if args.verify {
        if let Outcome::Unifiable { full, .. } = &verdict.outcome {
            let ok = verify_unifier(full, &eqs);
            record.verified = Some(ok);
            if !ok {
                eprintln!("error: oracle rejected the unifier");
                return ExitCode::from(2);
            }
        }
    }

    if args.json {
        println!("{}", record.to_json());
    } else {
        print_human(&verdict, &record);
    }
    match verdict.outcome {
        Outcome::Unifiable { .. } => ExitCode::SUCCESS,
        Outcome::Fail(_) => ExitCode::from(1),
    }
}

fn print_human(verdict: &exp_unify::solver::Verdict, record: &ResultRecord) {
    match &verdict.outcome {
        Outcome::Unifiable {
            unifier,
            free_parameters,
            ..
        } => {
            println!("unifiable");
            for (v, t) in unifier.iter() {
                println!("  {v} -> {t}");
            }
            if !free_parameters.is_empty() {
                let names: Vec<String> =
                    free_parameters.iter().map(|v| v.to_string()).collect();
                println!("  free parameters: {}", names.join(", "));
            }
            if record.verified == Some(true) {
                println!("  verified by rewrite oracle");
            }
        }
        Outcome::Fail(reason) => {
            println!("not unifiable");
            println!("  reason: {}", reason.code);
            println!("  witness: {}", reason.witness);
        }
    }
    println!(
        "  iterations: {}, peak equations: {}",
        verdict.stats.iterations, verdict.stats.peak_equation_count
    );
}

fn run_e1(cmd: E1Command) -> ExitCode {
    match cmd {
        E1Command::Normalize { term } => match parse_term(&term) {
            Ok(t) => {
                println!("{}", e1::e1_normalize(&t));
                ExitCode::SUCCESS
            }
            Err(e) => usage_error(e),
        },
        E1Command::Check { path } => {
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => return usage_error(format!("{}: {e}", path.display())),
            };
            match parse_check_file(&text) {
                Ok((assignment, eqs)) => {
                    let ok = e1::check_assignment(&assignment, &eqs);
                    println!("{}", if ok { "satisfied" } else { "violated" });
                    if ok {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => usage_error(e),
            }
        }
        E1Command::Gadget { command } => match command {
            GadgetCommand::Mult { i, j } => {
                if i < 1 || j < 1 {
                    return usage_error("mult gadget requires i, j >= 1");
                }
                let (eqs, witness) = e1::build_mult_gadget(i, j);
                for (l, r) in &eqs {
                    println!("{l} =? {r}");
                }
                println!("witness:");
                for (v, t) in witness.iter() {
                    println!("  {v} := {t}");
                }
                let ok = e1::check_assignment(&witness, &eqs);
                println!("verification: {}", if ok { "passed" } else { "FAILED" });
                if ok {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            GadgetCommand::Add { i, j } => {
                let (l, r) = e1::build_add_gadget(i, j);
                println!("{l} =? {r}");
                let ok = e1::e1_equal(&l, &r);
                println!("verification: {}", if ok { "passed" } else { "FAILED" });
                if ok {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
        },
    }
}

/// `X := term` bindings first (or interleaved), `s =? t` equations, `#`
/// comments.
fn parse_check_file(text: &str) -> Result<(Subst, Vec<(Term, Term)>), exp_unify::Error> {
    let mut assignment = Subst::new();
    let mut eqs = Vec::new();
    for line in text.lines() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        if line.trim().is_empty() {
            continue;
        }
        if let Some((lhs, rhs)) = line.split_once(":=") {
            let lhs = lhs.trim();
            let var = match parse_term(lhs)? {
                Term::Var(v) => v,
                _ => {
                    return Err(exp_unify::Error::Parse {
                        pos: 0,
                        msg: format!("binding left side must be a variable: {lhs}"),
                    })
                }
            };
            assignment.bind(var, parse_term(rhs)?);
        } else {
            eqs.push(exp_unify::term::parse_equation(line)?);
        }
    }
    Ok((assignment, eqs))
}

fn run_fuzz(count: u64, seed: u64) -> ExitCode {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut outcomes: BTreeMap<String, u64> = BTreeMap::new();
    let started = Instant::now();
    for n in 0..count {
        let eqs = random_problem(&mut rng, 10, 12, 4);
        match exp_unify::solver::solve(&eqs) {
            Ok(v) => {
                let key = match v.outcome {
                    Outcome::Unifiable { .. } => "unifiable".to_string(),
                    Outcome::Fail(r) => r.code.to_string(),
                };
                *outcomes.entry(key).or_insert(0) += 1;
            }
            Err(e) => {
                eprintln!("problem {n} (seed {seed}): solver error: {e}");
                for (l, r) in &eqs {
                    eprintln!("  {l} =? {r}");
                }
                return ExitCode::from(1);
            }
        }
    }
    println!(
        "{count} problems solved in {:.2}s",
        started.elapsed().as_secs_f64()
    );
    for (k, n) in &outcomes {
        println!("  {k}: {n}");
    }
    ExitCode::SUCCESS
}
