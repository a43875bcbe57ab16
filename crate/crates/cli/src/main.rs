//! memsat command line: solve DIMACS files, benchmark suites, generate
//! random 3-SAT instances, and query the exact small-instance oracle.
//!
//! Exit status: 0 when `solve` verifies a satisfying assignment (or the
//! command succeeded), 1 when the budget ran out with clauses still false
//! (or `oracle` proved the formula unsatisfiable), 2 on bad flags or
//! malformed input.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use memsat::bench::{InstanceOutcome, ReportFormat};
use memsat::instances::{brute_force, generate, generated_dimacs, RandomInstanceSpec};
use memsat::local_search::{LocalSearchConfig, PivotRule};
use memsat::swarm::PsoParams;
use memsat::{parse_dimacs, render_report, render_trace_csv, run_suite, solve, verify_report};
use memsat::{CnfFormula, RunReport, RunStatus, SolverConfig};

#[derive(Parser)]
#[command(name = "memsat", version, about = "Memetic binary-PSO solver for SAT and MAX-SAT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver once on a DIMACS CNF file (`-` reads stdin).
    Solve {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the per-iteration global-best trace as CSV to this path.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SolveFormat::Text)]
        format: SolveFormat,
    },
    /// Solve every instance in the given files/directories repeatedly and
    /// aggregate success rates and timings.
    Bench {
        /// CNF files or directories containing `.cnf` files.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Solver runs per instance; run `r` uses seed `--seed + r`.
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = BenchFormat::Table)]
        format: BenchFormat,
        /// Directory to write one trace CSV per (instance, run).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Worker thread cap for parallel runs (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Generate a random 3-SAT instance in DIMACS format.
    Gen {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path (default: stdout).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Exhaustively determine the maximum satisfiable clause count
    /// (at most 24 variables). Exits 0 if satisfiable, 1 if not.
    Oracle { file: PathBuf },
}

#[derive(Args)]
struct SolverArgs {
    /// Inertia weight.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Cognitive acceleration coefficient.
    #[arg(long, default_value_t = 2.0)]
    c1: f64,
    /// Social acceleration coefficient.
    #[arg(long, default_value_t = 2.0)]
    c2: f64,
    /// Velocity clamp bound.
    #[arg(long, default_value_t = 4.0)]
    vmax: f64,
    /// Swarm size kept after seeding.
    #[arg(long, default_value_t = 100)]
    pop: usize,
    /// Seeding pool size.
    #[arg(long, default_value_t = 1000)]
    pool: usize,
    /// Iteration budget.
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Local search pivot rule.
    #[arg(long, value_enum, default_value_t = PivotArg::Steepest)]
    pivot: PivotArg,
    /// Local search depth bound (default: the variable count).
    #[arg(long)]
    ls_depth: Option<usize>,
    /// Master random seed (base seed for `bench`).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverArgs {
    fn to_config(&self) -> SolverConfig {
        SolverConfig {
            pso: PsoParams {
                omega: self.omega,
                cognitive: self.c1,
                social: self.c2,
                v_max: self.vmax,
            },
            local_search: LocalSearchConfig {
                pivot: self.pivot.into(),
                max_depth: self.ls_depth,
            },
            population_size: self.pop,
            seed_pool_size: self.pool,
            max_iterations: self.max_iters,
            target_fitness: None,
            random_seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PivotArg {
    Greedy,
    Steepest,
}

impl From<PivotArg> for PivotRule {
    fn from(arg: PivotArg) -> Self {
        match arg {
            PivotArg::Greedy => PivotRule::GreedyAscent,
            PivotArg::Steepest => PivotRule::SteepestAscent,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolveFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BenchFormat {
    Table,
    Csv,
    Json,
}

impl From<BenchFormat> for ReportFormat {
    fn from(arg: BenchFormat) -> Self {
        match arg {
            BenchFormat::Table => ReportFormat::Table,
            BenchFormat::Csv => ReportFormat::Csv,
            BenchFormat::Json => ReportFormat::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { file, solver, trace, format } => {
            let formula = load_formula(&file)?;
            let report = solve(&formula, &solver.to_config())?;
            assert!(verify_report(&formula, &report), "solver produced an unverifiable report");
            if let Some(path) = trace {
                fs::write(&path, render_trace_csv(&report))
                    .with_context(|| format!("writing trace to {}", path.display()))?;
            }
            match format {
                SolveFormat::Text => print!("{}", render_run_text(&formula, &report)),
                SolveFormat::Json => {
                    println!("{}", serde_json::to_string_pretty(&report)?);
                }
            }
            Ok(match report.status {
                RunStatus::Satisfied => ExitCode::SUCCESS,
                RunStatus::BudgetExhausted => ExitCode::from(1),
            })
        }
        Command::Bench { paths, runs, solver, format, trace, workers } => {
            if runs == 0 {
                bail!("--runs must be at least 1");
            }
            if let Some(workers) = workers {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build_global()
                    .context("configuring worker pool")?;
            }
            let instances = collect_instances(&paths)?;
            if instances.is_empty() {
                bail!("no .cnf instances found under the given paths");
            }
            let loaded = instances.iter().filter(|(_, f)| f.is_ok()).count();
            if loaded == 0 {
                bail!("none of the {} instances could be loaded", instances.len());
            }
            let suite = run_suite(instances, &solver.to_config(), runs, solver.seed);
            if let Some(dir) = trace {
                write_suite_traces(&dir, &suite)?;
            }
            print!("{}", render_report(&suite, format.into()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { vars, clauses, seed, output } => {
            let spec = RandomInstanceSpec { variable_count: vars, clause_count: clauses, seed };
            let formula = generate(&spec)?;
            let text = generated_dimacs(&spec, &formula);
            match output {
                Some(path) => fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { file } => {
            let formula = load_formula(&file)?;
            let result = brute_force(&formula)?;
            println!("variables: {}", formula.variable_count());
            println!("clauses: {}", formula.clause_count());
            println!("max_fitness: {}", result.max_fitness);
            println!("false_clauses: {}", formula.clause_count() - result.max_fitness);
            println!("satisfiable: {}", result.satisfiable);
            println!("witness: {}", result.witness);
            Ok(if result.satisfiable { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn render_run_text(formula: &CnfFormula, report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "status: {}\n",
        match report.status {
            RunStatus::Satisfied => "SATISFIED",
            RunStatus::BudgetExhausted => "BUDGET_EXHAUSTED",
        }
    ));
    out.push_str(&format!(
        "fitness: {}/{} ({} false clauses)\n",
        report.best_fitness,
        formula.clause_count(),
        report.false_clause_count
    ));
    out.push_str(&format!("iterations: {}\n", report.iterations_used));
    out.push_str(&format!("wall_time_s: {:.3}\n", report.wall_time.as_secs_f64()));
    out.push_str(&format!("seed: {}\n", report.seed));
    out.push_str(&format!("assignment: {}\n", report.best_assignment));
    out
}

/// Reads a formula from a file, or stdin when the path is `-`.
fn load_formula(path: &Path) -> Result<CnfFormula> {
    let text = if path.as_os_str() == "-" {
        let mut buffer = String::new();
        std::io::stdin()
            .read_to_string(&mut buffer)
            .context("reading stdin")?;
        buffer
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    parse_dimacs(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Expands files and directories into named instances; load failures become
/// per-instance errors so a suite can carry on past them.
fn collect_instances(paths: &[PathBuf]) -> Result<Vec<(String, Result<CnfFormula, String>)>> {
    let mut files: Vec<PathBuf> = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(path)
                .with_context(|| format!("listing {}", path.display()))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|ext| ext == "cnf"))
                .collect();
            entries.sort();
            files.extend(entries);
        } else {
            files.push(path.clone());
        }
    }
    Ok(files
        .into_iter()
        .map(|file| {
            let name = file.display().to_string();
            let formula = fs::read_to_string(&file)
                .map_err(|e| e.to_string())
                .and_then(|text| parse_dimacs(&text).map_err(|e| e.to_string()));
            (name, formula)
        })
        .collect())
}

fn write_suite_traces(dir: &Path, suite: &memsat::SuiteReport) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for instance in &suite.instances {
        let InstanceOutcome::Completed(stats) = &instance.outcome else {
            continue;
        };
        let safe_name: String = instance
            .name
            .chars()
            .map(|c| if c == '/' || c == '\\' { '_' } else { c })
            .collect();
        for (run_index, run) in stats.runs.iter().enumerate() {
            let path = dir.join(format!("{safe_name}.run{run_index}.csv"));
            fs::write(&path, render_trace_csv(run))
                .with_context(|| format!("writing trace to {}", path.display()))?;
        }
    }
    Ok(())
}
