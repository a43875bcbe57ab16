//! The memetic binary-PSO solver: heuristically seeded swarm, PSO
//! kinematics, and a local-search refinement of every particle in every
//! iteration.
//!
//! A run seeds the swarm by drawing a large candidate pool and keeping the
//! fittest, then iterates: update each particle's velocity and position,
//! refine the new position by local search and adopt the result, then fold
//! personal and global bests. It stops when the global best reaches the
//! target fitness (all clauses by default) or the iteration budget is spent.
//!
//! Runs are deterministic: one master seed derives an independent ChaCha
//! stream per particle plus one for seeding, so a report is reproducible
//! from `(formula, config)` alone, bit for bit, modulo wall time.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Assignment, CnfFormula};
use crate::local_search::{LocalSearch, LocalSearchConfig};
use crate::swarm::{GlobalBest, Particle, PsoParams};

/// Stream id reserved for pool seeding; particle `i` uses stream `i + 1`.
const SEEDING_STREAM: u64 = 0;

/// Full solver configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub pso: PsoParams,
    pub local_search: LocalSearchConfig,
    /// Swarm size kept after seeding.
    pub population_size: usize,
    /// Candidate pool drawn before keeping the best `population_size`.
    pub seed_pool_size: usize,
    pub max_iterations: usize,
    /// Stop once the global best reaches this fitness; `None` means the
    /// clause count (full satisfaction).
    pub target_fitness: Option<usize>,
    pub random_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            pso: PsoParams::default(),
            local_search: LocalSearchConfig::default(),
            population_size: 100,
            seed_pool_size: 1000,
            max_iterations: 200,
            target_fitness: None,
            random_seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn seeded(seed: u64) -> Self {
        SolverConfig { random_seed: seed, ..SolverConfig::default() }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population_size == 0 {
            return Err(ConfigError::EmptyPopulation);
        }
        if self.seed_pool_size < self.population_size {
            return Err(ConfigError::PoolSmallerThanPopulation {
                pool: self.seed_pool_size,
                population: self.population_size,
            });
        }
        if self.max_iterations == 0 {
            return Err(ConfigError::ZeroIterations);
        }
        if self.local_search.max_depth == Some(0) {
            return Err(ConfigError::ZeroSearchDepth);
        }
        let pso = &self.pso;
        if pso.v_max.is_nan() || pso.v_max <= 0.0 {
            return Err(ConfigError::InvalidPsoParam { name: "v_max", requirement: "positive" });
        }
        for (name, value) in [("omega", pso.omega), ("c1", pso.cognitive), ("c2", pso.social)] {
            if value.is_nan() || value < 0.0 {
                return Err(ConfigError::InvalidPsoParam { name, requirement: "non-negative" });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("population size must be at least 1")]
    EmptyPopulation,
    #[error("seed pool size {pool} is smaller than population size {population}")]
    PoolSmallerThanPopulation { pool: usize, population: usize },
    #[error("iteration budget must be at least 1")]
    ZeroIterations,
    #[error("local search depth must be at least 1")]
    ZeroSearchDepth,
    #[error("PSO parameter {name} must be {requirement}")]
    InvalidPsoParam { name: &'static str, requirement: &'static str },
}

/// Terminal state of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RunStatus {
    /// The best assignment satisfies every clause.
    Satisfied,
    /// The iteration budget ran out (or an early-stop target below full
    /// satisfaction was reached) with clauses still false.
    BudgetExhausted,
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub status: RunStatus,
    pub best_assignment: Assignment,
    pub best_fitness: usize,
    /// `clause_count - best_fitness`, the false-clause count quoted in
    /// MAX-SAT style reporting.
    pub false_clause_count: usize,
    pub iterations_used: usize,
    /// `(iteration, global best fitness)` per iteration; entry 0 is recorded
    /// right after seeding, so the length is `iterations_used + 1`.
    pub fitness_trace: Vec<(usize, usize)>,
    pub wall_time: Duration,
    pub seed: u64,
}

/// Emitted once per particle per iteration when solving with an observer:
/// the fitness the particle sampled before local search and the fitness it
/// was refined to.
#[derive(Debug, Clone, Copy)]
pub struct RefinementEvent {
    pub iteration: usize,
    pub particle: usize,
    pub fitness_before: usize,
    pub fitness_after: usize,
}

/// Exact top-k selection: indices of the `keep` highest values, stable
/// within equal values.
fn top_k_indices(fitnesses: &[usize], keep: usize) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..fitnesses.len()).collect();
    indices.sort_by(|&a, &b| fitnesses[b].cmp(&fitnesses[a]));
    indices.truncate(keep);
    indices
}

/// Draws `pool_size` uniformly random assignments, evaluates each, and
/// returns the `keep` fittest as particles. Each kept particle starts with
/// its own position as personal best and a velocity drawn uniformly from
/// `[-v_max, v_max]` per component.
///
/// All pool positions are drawn before any velocity, so the kept positions
/// depend only on `pool_size`, not on `keep`.
pub fn seed_population(
    formula: &CnfFormula,
    pool_size: usize,
    keep: usize,
    v_max: f64,
    rng: &mut impl Rng,
) -> Result<Vec<Particle>, ConfigError> {
    if keep == 0 {
        return Err(ConfigError::EmptyPopulation);
    }
    if keep > pool_size {
        return Err(ConfigError::PoolSmallerThanPopulation { pool: pool_size, population: keep });
    }
    let n = formula.variable_count();
    let pool: Vec<(Assignment, usize)> = (0..pool_size)
        .map(|_| {
            let assignment = Assignment::random(n, rng);
            let fitness = formula.evaluate(&assignment).expect("assignment length matches");
            (assignment, fitness)
        })
        .collect();
    let fitnesses: Vec<usize> = pool.iter().map(|(_, f)| *f).collect();
    Ok(top_k_indices(&fitnesses, keep)
        .into_iter()
        .map(|i| {
            let (position, fitness) = pool[i].clone();
            let velocity: Vec<f64> = (0..n).map(|_| rng.random_range(-v_max..=v_max)).collect();
            Particle::new(position, fitness, velocity)
        })
        .collect())
}

/// Runs the solver to a [`RunReport`].
pub fn solve(formula: &CnfFormula, cfg: &SolverConfig) -> Result<RunReport, ConfigError> {
    solve_observed(formula, cfg, |_| {})
}

/// [`solve`] with a per-refinement callback, used to instrument runs.
pub fn solve_observed(
    formula: &CnfFormula,
    cfg: &SolverConfig,
    mut observer: impl FnMut(RefinementEvent),
) -> Result<RunReport, ConfigError> {
    cfg.validate()?;
    let started = Instant::now();

    let m = formula.clause_count();
    let target = cfg.target_fitness.unwrap_or(m);

    let particle_stream = |index: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.random_seed);
        rng.set_stream(index as u64 + 1);
        rng
    };
    let mut seed_rng = ChaCha8Rng::seed_from_u64(cfg.random_seed);
    seed_rng.set_stream(SEEDING_STREAM);

    let mut particles = seed_population(
        formula,
        cfg.seed_pool_size,
        cfg.population_size,
        cfg.pso.v_max,
        &mut seed_rng,
    )?;
    let mut rngs: Vec<ChaCha8Rng> = (0..particles.len()).map(particle_stream).collect();

    let mut gbest = GlobalBest {
        position: particles[0].best_position.clone(),
        fitness: particles[0].best_fitness,
    };
    for particle in &particles[1..] {
        if particle.best_fitness > gbest.fitness {
            gbest.fitness = particle.best_fitness;
            gbest.position = particle.best_position.clone();
        }
    }

    let mut trace = vec![(0, gbest.fitness)];
    let mut iterations_used = 0;

    let searcher = LocalSearch::new(formula, cfg.local_search);

    if gbest.fitness < target {
        for iteration in 1..=cfg.max_iterations {
            // Kinematics and refinement read the previous iteration's global
            // best; the best reduction below is serialized per iteration.
            for (index, particle) in particles.iter_mut().enumerate() {
                let rng = &mut rngs[index];
                particle.update_velocity(&gbest, &cfg.pso, rng);
                particle.update_position(rng);
                let refinement = searcher
                    .refine(particle.position.clone())
                    .expect("particle dimension matches formula");
                observer(RefinementEvent {
                    iteration,
                    particle: index,
                    fitness_before: refinement.start_fitness,
                    fitness_after: refinement.fitness,
                });
                particle.position = refinement.assignment;
            }
            for particle in particles.iter_mut() {
                particle.refresh_bests(&mut gbest, formula);
            }
            iterations_used = iteration;
            trace.push((iteration, gbest.fitness));
            if gbest.fitness >= target {
                break;
            }
        }
    }

    let status = if gbest.fitness == m { RunStatus::Satisfied } else { RunStatus::BudgetExhausted };
    Ok(RunReport {
        status,
        best_fitness: gbest.fitness,
        false_clause_count: m - gbest.fitness,
        best_assignment: gbest.position,
        iterations_used,
        fitness_trace: trace,
        wall_time: started.elapsed(),
        seed: cfg.random_seed,
    })
}

/// Soundness gate: a report is honest iff its best assignment really has the
/// claimed fitness and a `SATISFIED` status implies every clause is true.
pub fn verify_report(formula: &CnfFormula, report: &RunReport) -> bool {
    match formula.evaluate(&report.best_assignment) {
        Ok(fitness) => {
            fitness == report.best_fitness
                && (report.status != RunStatus::Satisfied
                    || report.best_fitness == formula.clause_count())
        }
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    use crate::cnf::parse_dimacs;
    use crate::instances::{generate, RandomInstanceSpec};

    fn example_formula() -> CnfFormula {
        parse_dimacs("p cnf 4 4\n1 2 -3 0\n-1 2 3 0\n-1 -2 3 0\n1 -3 4 0\n").unwrap()
    }

    #[test]
    fn top_k_picks_highest() {
        let kept = top_k_indices(&[3, 1, 4, 1, 5, 2], 2);
        let fitnesses: Vec<usize> = kept.iter().map(|&i| [3, 1, 4, 1, 5, 2][i]).collect();
        assert_eq!(fitnesses, vec![5, 4]);
    }

    #[test]
    fn top_k_keep_all_returns_everything() {
        let kept = top_k_indices(&[3, 1, 4], 3);
        let mut sorted = kept.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);
    }

    #[test]
    fn seeding_is_exact_top_k() {
        let f = generate(&RandomInstanceSpec { variable_count: 12, clause_count: 40, seed: 5 }).unwrap();
        // Same stream, keep-all vs keep-some: positions are drawn before
        // velocities, so the pools coincide.
        let mut rng_all = ChaCha8Rng::seed_from_u64(11);
        let everyone = seed_population(&f, 60, 60, 4.0, &mut rng_all).unwrap();
        let mut rng_kept = ChaCha8Rng::seed_from_u64(11);
        let kept = seed_population(&f, 60, 12, 4.0, &mut rng_kept).unwrap();

        let mut all_fitnesses: Vec<usize> = everyone.iter().map(|p| p.best_fitness).collect();
        all_fitnesses.sort_unstable_by(|a, b| b.cmp(a));
        let kept_fitnesses: Vec<usize> = kept.iter().map(|p| p.best_fitness).collect();
        assert_eq!(kept_fitnesses, all_fitnesses[..12].to_vec());

        let min_kept = kept_fitnesses.iter().min().unwrap();
        let max_discarded = all_fitnesses[12..].iter().max().unwrap();
        assert!(min_kept >= max_discarded);
    }

    #[test]
    fn seeded_particles_start_at_their_own_best() {
        let f = example_formula();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for particle in seed_population(&f, 10, 10, 4.0, &mut rng).unwrap() {
            assert_eq!(particle.position, particle.best_position);
            assert_eq!(f.evaluate(&particle.best_position).unwrap(), particle.best_fitness);
            assert!(particle.velocity.iter().all(|v| v.abs() <= 4.0));
        }
    }

    #[test]
    fn seeding_rejects_keep_above_pool() {
        let f = example_formula();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            seed_population(&f, 5, 6, 4.0, &mut rng).unwrap_err(),
            ConfigError::PoolSmallerThanPopulation { pool: 5, population: 6 }
        );
    }

    #[test]
    fn solve_empty_formula_is_satisfied_at_iteration_zero() {
        let report = solve(&CnfFormula::empty(), &SolverConfig::default()).unwrap();
        assert_eq!(report.status, RunStatus::Satisfied);
        assert_eq!(report.best_fitness, 0);
        assert_eq!(report.false_clause_count, 0);
        assert_eq!(report.iterations_used, 0);
        assert_eq!(report.fitness_trace, vec![(0, 0)]);
    }

    #[test]
    fn solve_example_formula_with_defaults() {
        let f = example_formula();
        let report = solve(&f, &SolverConfig::default()).unwrap();
        assert_eq!(report.status, RunStatus::Satisfied);
        assert_eq!(report.false_clause_count, 0);
        assert!(verify_report(&f, &report));
    }

    #[test]
    fn solve_easy_random_instance_within_small_budget() {
        let f = generate(&RandomInstanceSpec { variable_count: 36, clause_count: 12, seed: 2 }).unwrap();
        let cfg = SolverConfig { max_iterations: 100, ..SolverConfig::seeded(1) };
        let report = solve(&f, &cfg).unwrap();
        assert_eq!(report.status, RunStatus::Satisfied);
        assert!(report.iterations_used <= 100);
    }

    #[test]
    fn solve_respects_budget_and_stays_sound_on_hard_instances() {
        let f = generate(&RandomInstanceSpec { variable_count: 33, clause_count: 165, seed: 7 }).unwrap();
        let cfg = SolverConfig {
            population_size: 20,
            seed_pool_size: 60,
            max_iterations: 10,
            ..SolverConfig::seeded(7)
        };
        let report = solve(&f, &cfg).unwrap();
        assert!(report.iterations_used <= 10);
        assert_eq!(report.fitness_trace.len(), report.iterations_used + 1);
        assert!(verify_report(&f, &report));
        assert!(report.fitness_trace.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn solve_handles_mid_ratio_instances_within_cap() {
        // 33 variables, 65 clauses: may or may not fully satisfy, but the
        // report stays sound and within the 200-iteration default cap.
        let f = generate(&RandomInstanceSpec { variable_count: 33, clause_count: 65, seed: 4 }).unwrap();
        let report = solve(&f, &SolverConfig::seeded(4)).unwrap();
        assert!(report.iterations_used <= 200);
        assert!(verify_report(&f, &report));
        assert_eq!(report.false_clause_count, 65 - report.best_fitness);
    }

    #[test]
    fn observer_sees_every_particle_every_iteration() {
        let f = generate(&RandomInstanceSpec { variable_count: 10, clause_count: 50, seed: 3 }).unwrap();
        let cfg = SolverConfig {
            population_size: 4,
            seed_pool_size: 8,
            max_iterations: 5,
            ..SolverConfig::seeded(3)
        };
        let mut events = Vec::new();
        let report = solve_observed(&f, &cfg, |e| events.push(e)).unwrap();
        assert_eq!(events.len(), report.iterations_used * cfg.population_size);
        assert!(events.iter().all(|e| e.fitness_after >= e.fitness_before));
    }

    #[test]
    fn identical_seeds_reproduce_reports() {
        let f = generate(&RandomInstanceSpec { variable_count: 14, clause_count: 56, seed: 21 }).unwrap();
        let cfg = SolverConfig {
            population_size: 10,
            seed_pool_size: 30,
            max_iterations: 8,
            ..SolverConfig::seeded(99)
        };
        let mut a = solve(&f, &cfg).unwrap();
        let mut b = solve(&f, &cfg).unwrap();
        a.wall_time = Duration::ZERO;
        b.wall_time = Duration::ZERO;
        assert_eq!(a, b);
    }

    #[test]
    fn verify_report_flags_dishonest_reports() {
        let f = example_formula();
        let honest = solve(&f, &SolverConfig::default()).unwrap();
        assert!(verify_report(&f, &honest));

        let mut inflated = honest.clone();
        inflated.best_fitness += 1;
        assert!(!verify_report(&f, &inflated));

        let f2 = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap();
        let dishonest = RunReport {
            status: RunStatus::Satisfied,
            best_assignment: Assignment::from_bits(vec![true]),
            best_fitness: 1,
            false_clause_count: 1,
            iterations_used: 0,
            fitness_trace: vec![(0, 1)],
            wall_time: Duration::ZERO,
            seed: 0,
        };
        assert!(!verify_report(&f2, &dishonest));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let f = example_formula();
        let bad_pool = SolverConfig { seed_pool_size: 10, population_size: 20, ..SolverConfig::default() };
        assert!(solve(&f, &bad_pool).is_err());
        let bad_vmax = SolverConfig {
            pso: PsoParams { v_max: 0.0, ..PsoParams::default() },
            ..SolverConfig::default()
        };
        assert!(solve(&f, &bad_vmax).is_err());
        let bad_iters = SolverConfig { max_iterations: 0, ..SolverConfig::default() };
        assert!(bad_iters.validate().is_err());
    }

    #[test]
    fn report_serde_round_trip() {
        let f = example_formula();
        let report = solve(&f, &SolverConfig::default()).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: RunReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }
}
