//! Random 3-SAT instance generation and an exhaustive oracle for small
//! formulas.
//!
//! The generator follows the fixed-clause-length uniform model: every clause
//! picks 3 distinct variables uniformly without replacement and flips a fair
//! coin per polarity. Duplicate clauses are allowed. The oracle enumerates
//! all `2^n` assignments and is hard-capped at 24 variables; it exists as
//! ground truth for tests and the `oracle` CLI command, not as a solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cnf::{Assignment, Clause, CnfFormula, Literal};

/// Variable cap for [`brute_force`]; `2^24` assignments is the largest
/// enumeration we accept.
pub const ORACLE_VARIABLE_LIMIT: usize = 24;

/// Parameters of one random 3-SAT instance. Generation is a pure function of
/// this value: the same spec always yields the same formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomInstanceSpec {
    pub variable_count: usize,
    pub clause_count: usize,
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("3-SAT generation needs at least 3 variables, got {0}")]
    TooFewVariables(usize),
    #[error("brute-force oracle accepts at most {limit} variables, formula has {actual}")]
    TooManyVariables { actual: usize, limit: usize },
}

/// Generates a random 3-SAT formula: exactly `clause_count` clauses, each
/// over 3 distinct variables with independent fair-coin polarities.
pub fn generate(spec: &RandomInstanceSpec) -> Result<CnfFormula, InstanceError> {
    if spec.variable_count < 3 {
        return Err(InstanceError::TooFewVariables(spec.variable_count));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let clauses = (0..spec.clause_count)
        .map(|_| {
            let mut vars = [0usize; 3];
            for i in 0..3 {
                loop {
                    let v = rng.random_range(0..spec.variable_count);
                    if !vars[..i].contains(&v) {
                        vars[i] = v;
                        break;
                    }
                }
            }
            let literals: Vec<Literal> =
                vars.iter().map(|&v| Literal::new(v, rng.random())).collect();
            Clause::new(literals)
        })
        .collect();
    Ok(CnfFormula::new(spec.variable_count, clauses).expect("generated variables are in range"))
}

/// DIMACS text of a generated instance, prefixed with a comment recording
/// the generating spec so the file is reproducible on its own.
pub fn generated_dimacs(spec: &RandomInstanceSpec, formula: &CnfFormula) -> String {
    format!(
        "c random 3-SAT: vars={} clauses={} seed={}\n{}",
        spec.variable_count,
        spec.clause_count,
        spec.seed,
        formula.to_dimacs()
    )
}

/// Ground truth for a small formula: the maximum satisfiable clause count
/// and the lexicographically smallest assignment achieving it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub max_fitness: usize,
    pub witness: Assignment,
    pub satisfiable: bool,
}

/// Enumerates all `2^n` assignments. Clauses of any width are accepted.
///
/// The witness tie-break is the lexicographically smallest bit vector, so
/// results are deterministic and independent of enumeration details.
pub fn brute_force(formula: &CnfFormula) -> Result<OracleResult, InstanceError> {
    let n = formula.variable_count();
    if n > ORACLE_VARIABLE_LIMIT {
        return Err(InstanceError::TooManyVariables { actual: n, limit: ORACLE_VARIABLE_LIMIT });
    }
    let m = formula.clause_count();

    // Bitmask form: variable v maps to mask bit (n - 1 - v), so ascending
    // integers enumerate assignments in lexicographic bit-vector order.
    let masks: Vec<(u32, u32)> = formula
        .clauses()
        .iter()
        .map(|clause| {
            let mut positive = 0u32;
            let mut negative = 0u32;
            for lit in clause.literals() {
                let bit = 1u32 << (n - 1 - lit.variable());
                if lit.negated() {
                    negative |= bit;
                } else {
                    positive |= bit;
                }
            }
            (positive, negative)
        })
        .collect();

    let mut best_fitness = 0usize;
    let mut best_word = 0u32;
    for word in 0u64..(1u64 << n) {
        let word = word as u32;
        let fitness = masks
            .iter()
            .filter(|&&(positive, negative)| {
                (word & positive) != 0 || (!word & negative) != 0
            })
            .count();
        // Strict improvement only: the first maximum in ascending order is
        // the lexicographically smallest witness.
        if fitness > best_fitness {
            best_fitness = fitness;
            best_word = word;
        }
        if best_fitness == m {
            break;
        }
    }

    let witness = Assignment::from_bits(
        (0..n).map(|v| (best_word >> (n - 1 - v)) & 1 == 1).collect::<Vec<bool>>(),
    );
    debug_assert_eq!(formula.evaluate(&witness).unwrap(), best_fitness);
    Ok(OracleResult { max_fitness: best_fitness, witness, satisfiable: best_fitness == m })
}
