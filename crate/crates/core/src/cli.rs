//! Command-line front end. Exit codes: 0 success (optimal and certified), 1 infeasible or not
//! certified, 2 invalid input.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::gen::{random_instance, rng, InstanceParams};
use crate::io::{read_instance, read_json, write_json, InstanceFile, IoError, ObjectiveFile, SolutionFile, TermSumFile};
use crate::ksubmod;
use crate::multiflow::{
    multiway_cut, solve_descent, solve_mcmf, solve_scaling, verify_optimality, Instance, MultiflowError,
    Problem, Solution,
};
use crate::oracles::{brute_force_l, brute_force_multiway, OracleBudget};
use crate::rational::{halves_to_decimal, Ext};

#[derive(Parser, Debug)]
#[command(name = "treeflow", version, about = "Half-integral multiflows, k-submodular and tree L-convex minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algorithm {
    Scaling,
    Descent,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a node-demand (N) or maximum free (MCMF) multiflow instance.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "scaling")]
        algorithm: Algorithm,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Re-check the written solution against the optimality conditions.
        #[arg(long)]
        verify: bool,
    },
    /// Check a solution file against an instance.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Exhaustive optimum for small instances.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u128,
    },
    /// Minimize a sum of basic k-submodular terms.
    KsubmodMin {
        #[arg(long)]
        input: PathBuf,
        /// Also enumerate every point and compare.
        #[arg(long)]
        brute: bool,
    },
    /// Steepest descent on a 2-separable L-convex objective over a tree.
    LconvexMin {
        #[arg(long)]
        input: PathBuf,
    },
    /// Multiway cut relaxation and 2-approximate rounding.
    Multiway {
        #[arg(long)]
        input: PathBuf,
    },
    /// Emit a random feasible instance.
    Gen {
        #[arg(long, default_value_t = 6)]
        nodes: usize,
        #[arg(long, default_value_t = 3)]
        terminals: usize,
        #[arg(long, default_value_t = 3)]
        maxcap: i64,
        #[arg(long, default_value_t = 3)]
        maxcost: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Invalid(_) => 2,
            CliError::Infeasible(_) | CliError::Failed(_) => 1,
        }
    }
}

impl From<MultiflowError> for CliError {
    fn from(e: MultiflowError) -> Self {
        match e {
            MultiflowError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            MultiflowError::InvalidInstance(_) | MultiflowError::InvalidPotential(_) | MultiflowError::InvalidMultiflow(_) => {
                CliError::Invalid(e.to_string())
            }
            other => CliError::Failed(other.to_string()),
        }
    }
}

/// Parses `args` (program name first) and runs the command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Solve { input, algorithm, output, verify } => solve(&input, algorithm, output.as_deref(), verify),
        Command::Verify { input, solution } => verify_file(&input, &solution),
        Command::Oracle { input, budget } => oracle(&input, budget),
        Command::KsubmodMin { input, brute } => ksubmod_min(&input, brute),
        Command::LconvexMin { input } => lconvex_min(&input),
        Command::Multiway { input } => multiway(&input),
        Command::Gen { nodes, terminals, maxcap, maxcost, seed, output } => {
            let params = InstanceParams {
                nodes,
                terminals,
                max_cap: maxcap,
                max_cost: maxcost,
                max_grid: u128::MAX,
            };
            let inst = random_instance(&mut rng(seed), &params);
            let file = InstanceFile::from_instance(&inst);
            match output {
                Some(path) => write_json(&path, &file)?,
                None => println!("{}", serde_json::to_string_pretty(&file).map_err(IoError::from)?),
            }
            Ok(0)
        }
    }
}

fn print_solution(sol: &Solution) {
    println!("value: {} (halves: {})", halves_to_decimal(sol.value_halves), sol.value_halves);
    println!("paths: {}", sol.multiflow.paths.len());
    if let Some(stats) = &sol.scaling {
        for p in &stats.phases {
            println!("phase sigma={} rungs={} steps={}", p.sigma, p.rungs, p.steps);
        }
        println!("flow computations: {}", stats.flow_computations);
    }
    if let Some(stats) = &sol.descent {
        println!("descent steps: {}", stats.steps.len());
        println!("flow computations: {}", stats.flow_computations);
    }
    if sol.cost_scale != 1 {
        println!("zero costs perturbed (factor {})", sol.cost_scale);
    }
    println!("certified: {}", sol.certified());
}

fn solve(input: &Path, algorithm: Algorithm, output: Option<&Path>, verify: bool) -> Result<i32, CliError> {
    let inst = read_instance(input)?;
    let (target, sol) = match inst.problem {
        Problem::N => {
            let sol = match algorithm {
                Algorithm::Scaling => solve_scaling(&inst)?,
                Algorithm::Descent => solve_descent(&inst)?,
            };
            (inst, sol)
        }
        Problem::Mcmf => {
            let m = solve_mcmf(&inst)?;
            println!("maximum flow value: {}", halves_to_decimal(m.value_halves));
            println!("cost: {}", halves_to_decimal(m.cost_halves));
            println!("solution below refers to the reduced node-demand instance");
            (m.reduction.instance, m.reduced)
        }
        Problem::Multiway => return Err(CliError::Invalid("use the multiway subcommand".into())),
    };
    print_solution(&sol);
    let file = SolutionFile::from_solution(&target, &sol);
    if let Some(path) = output {
        write_json(path, &file)?;
    }
    if verify {
        let (f, p) = file.to_parts(&target)?;
        let report = verify_optimality(&target, &f, &p)?;
        println!("verified: {}", report.certified());
        if !report.certified() {
            return Ok(1);
        }
    }
    Ok(if sol.certified() { 0 } else { 1 })
}

fn verify_file(input: &Path, solution: &Path) -> Result<i32, CliError> {
    let inst = read_instance(input)?;
    let file: SolutionFile = read_json(solution)?;
    let (f, p) = file.to_parts(&inst)?;
    let report = match verify_optimality(&inst, &f, &p) {
        Ok(r) => r,
        Err(e @ (MultiflowError::InvalidMultiflow(_) | MultiflowError::InvalidPotential(_))) => {
            println!("certified: false");
            println!("  {e}");
            return Ok(1);
        }
        Err(e) => return Err(e.into()),
    };
    let flag = |ok: bool| if ok { "ok" } else { "FAILED" };
    println!("capacity: {}", flag(report.capacity));
    println!("demands met: {}", flag(report.feasible));
    println!("saturated above cost: {}", flag(report.saturated_above));
    println!("empty below cost: {}", flag(report.empty_below));
    println!("geodesic paths: {}", flag(report.geodesic));
    println!("tight demands: {}", flag(report.tight_demands));
    println!(
        "primal: {}  dual: {}",
        halves_to_decimal(report.primal_halves),
        halves_to_decimal(report.dual_halves)
    );
    for v in &report.violations {
        println!("  {v}");
    }
    println!("certified: {}", report.certified());
    Ok(if report.certified() { 0 } else { 1 })
}

fn oracle(input: &Path, budget: u128) -> Result<i32, CliError> {
    let inst = read_instance(input)?;
    let budget = OracleBudget {
        max_enumeration: budget,
        ..OracleBudget::default()
    };
    let fail = |e: crate::oracles::OracleError| match e {
        crate::oracles::OracleError::Infeasible => CliError::Infeasible(e.to_string()),
        _ => CliError::Failed(e.to_string()),
    };
    match inst.problem {
        Problem::Multiway => {
            let (label, value) = brute_force_multiway(&inst, &budget).map_err(fail)?;
            println!("{value}");
            println!("assignment: {label:?}");
        }
        Problem::N | Problem::Mcmf => {
            let target: Instance = if inst.problem == Problem::Mcmf {
                crate::multiflow::reduce_mcmf(&inst)?.instance
            } else {
                inst
            };
            let (support, value) = brute_force_l(&target, &budget).map_err(fail)?;
            println!("{}", halves_to_decimal(value));
            println!("support (halves): {support:?}");
        }
    }
    Ok(0)
}

fn ksubmod_min(input: &Path, brute: bool) -> Result<i32, CliError> {
    let file: TermSumFile = read_json(input)?;
    let f = file.to_term_sum()?;
    let (x, v) = ksubmod::minimize(&f).map_err(|e| CliError::Invalid(e.to_string()))?;
    println!("minimizer: {x:?}");
    println!("value: {v}");
    if brute {
        let (y, w) = ksubmod::brute_force_min(&f).map_err(|e| CliError::Invalid(e.to_string()))?;
        println!("brute force: {y:?} value {w}");
        if w != v {
            return Ok(1);
        }
    }
    Ok(0)
}

fn lconvex_min(input: &Path) -> Result<i32, CliError> {
    let file: ObjectiveFile = read_json(input)?;
    let omega = file.to_objective()?;
    let start = file.start.clone().unwrap_or_else(|| vec![omega.tree.root(); omega.n]);
    let (x, trace) = omega
        .steepest_descent(&start)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let value = match omega.eval(&x).map_err(|e| CliError::Invalid(e.to_string()))? {
        Ext::Finite(v) => v.to_string(),
        Ext::Inf => "inf".into(),
    };
    println!("minimizer: {x:?}");
    println!("value: {value}");
    println!("steps: {}", trace.steps());
    Ok(0)
}

fn multiway(input: &Path) -> Result<i32, CliError> {
    let inst = read_instance(input)?;
    let res = multiway_cut(&inst)?;
    println!("relaxation: {}", res.relaxation);
    println!("rounded: {}", res.rounded_value);
    println!("cut capacity: {}", res.cut_capacity);
    println!("assignment: {:?}", res.assignment);
    Ok(0)
}
