//! memsat: a memetic binary-PSO solver for SAT and MAX-SAT.
//!
//! The solver seeds a swarm by drawing a large pool of random assignments
//! and keeping the fittest, then alternates binary PSO kinematics (clamped
//! velocities, sigmoid transfer, stochastic bit sampling) with a bit-flip
//! local search refinement of every particle, tracking the best assignment
//! found. Fitness is the number of satisfied clauses, so a fitness equal to
//! the clause count is a satisfying assignment and anything less is a
//! MAX-SAT result reported as a false-clause count.
//!
//! ```
//! use memsat::{parse_dimacs, solve, RunStatus, SolverConfig};
//!
//! let formula = parse_dimacs("p cnf 2 2\n1 2 0\n-1 2 0\n").unwrap();
//! let report = solve(&formula, &SolverConfig::seeded(1)).unwrap();
//! assert_eq!(report.status, RunStatus::Satisfied);
//! ```
//!
//! Everything is deterministic for a fixed seed: reports are reproducible
//! bit for bit (wall time aside), and suite runs derive per-run seeds from a
//! base seed so any run can be replayed from its report.

pub mod bench;
pub mod cnf;
pub mod engine;
pub mod instances;
pub mod local_search;
pub mod swarm;

pub use bench::{render_report, render_trace_csv, run_suite, ReportFormat, SuiteReport};
pub use cnf::{parse_dimacs, Assignment, Clause, CnfFormula, Literal, ParseError};
pub use engine::{
    seed_population, solve, solve_observed, verify_report, RunReport, RunStatus, SolverConfig,
};
pub use instances::{brute_force, generate, OracleResult, RandomInstanceSpec};
pub use local_search::{local_search, neighbors, LocalSearch, LocalSearchConfig, PivotRule};
pub use swarm::{clamp_velocity, sigmoid, update_position, GlobalBest, Particle, PsoParams};
