//! Bit-flip local search over assignments with two pivot rules.
//!
//! The neighborhood is fixed to single-bit flips. Greedy ascent takes the
//! first strictly improving neighbor in ascending variable order; steepest
//! ascent scans all neighbors and takes the best one, breaking ties toward
//! the lowest flipped index. Only strictly improving moves are accepted, so
//! plateaus terminate the search. The module is deterministic.
//!
//! Fitness deltas are scored incrementally from per-clause true-literal
//! counters instead of re-evaluating the formula per neighbor; the result is
//! exactly the full-rescan semantics (tested against it).

use crate::cnf::{Assignment, AssignmentMismatch, CnfFormula};

/// Local-search acceptance policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    /// Move to the first strictly improving neighbor in scan order.
    GreedyAscent,
    /// Examine all neighbors and move to the best strictly improving one.
    SteepestAscent,
}

/// Search configuration: pivot rule plus the outer-iteration bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalSearchConfig {
    pub pivot: PivotRule,
    /// Maximum number of accepted moves; `None` means the variable count.
    pub max_depth: Option<usize>,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        LocalSearchConfig { pivot: PivotRule::SteepestAscent, max_depth: None }
    }
}

/// All single-bit-flip neighbors of `a`, in ascending variable order: the
/// k-th result differs from `a` exactly in bit `k`.
pub fn neighbors(a: &Assignment) -> Vec<Assignment> {
    (0..a.len()).map(|k| a.flipped(k)).collect()
}

/// Outcome of one refinement: the (possibly improved) assignment, its
/// fitness, the fitness the search started from, and the number of accepted
/// moves.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub assignment: Assignment,
    pub fitness: usize,
    pub start_fitness: usize,
    pub steps: usize,
}

/// One occurrence of a variable in a clause. Clauses containing both
/// polarities of a variable are excluded: flipping that variable swaps which
/// of the pair is true, leaving the clause's true-literal count unchanged.
#[derive(Debug, Clone, Copy)]
struct Occurrence {
    clause: u32,
    negated: bool,
}

/// A reusable local searcher holding the per-variable occurrence index for
/// one formula. Building the index costs one pass over the formula, so
/// callers refining many assignments against the same formula should reuse
/// one `LocalSearch`.
#[derive(Debug)]
pub struct LocalSearch<'f> {
    formula: &'f CnfFormula,
    occurrences: Vec<Vec<Occurrence>>,
    pivot: PivotRule,
    max_depth: usize,
}

impl<'f> LocalSearch<'f> {
    pub fn new(formula: &'f CnfFormula, cfg: LocalSearchConfig) -> Self {
        let n = formula.variable_count();
        let mut occurrences: Vec<Vec<Occurrence>> = vec![Vec::new(); n];
        for (c, clause) in formula.clauses().iter().enumerate() {
            for lit in clause.literals() {
                let tautology = clause
                    .literals()
                    .iter()
                    .any(|other| other.variable() == lit.variable() && other.negated() != lit.negated());
                if !tautology {
                    occurrences[lit.variable()]
                        .push(Occurrence { clause: c as u32, negated: lit.negated() });
                }
            }
        }
        let max_depth = cfg.max_depth.unwrap_or(n).max(1);
        LocalSearch { formula, occurrences, pivot: cfg.pivot, max_depth }
    }

    /// Ascends from `start` until a 1-flip local optimum, full satisfaction,
    /// or the depth bound. The returned fitness never drops below the
    /// starting fitness.
    pub fn refine(&self, start: Assignment) -> Result<Refinement, AssignmentMismatch> {
        let m = self.formula.clause_count();
        let start_fitness = self.formula.evaluate(&start)?;
        let mut state = FlipState::new(self.formula, start);
        debug_assert_eq!(state.fitness, start_fitness);

        let mut steps = 0;
        while steps < self.max_depth && state.fitness < m {
            let chosen = match self.pivot {
                PivotRule::SteepestAscent => {
                    let mut best: Option<(usize, i64)> = None;
                    for v in 0..state.bits.len() {
                        let delta = self.flip_delta(&state, v);
                        if delta > 0 && best.is_none_or(|(_, d)| delta > d) {
                            best = Some((v, delta));
                        }
                    }
                    best.map(|(v, _)| v)
                }
                PivotRule::GreedyAscent => {
                    (0..state.bits.len()).find(|&v| self.flip_delta(&state, v) > 0)
                }
            };
            match chosen {
                Some(v) => {
                    self.apply_flip(&mut state, v);
                    steps += 1;
                }
                None => break,
            }
        }

        Ok(Refinement {
            assignment: Assignment::from_bits(state.bits),
            fitness: state.fitness,
            start_fitness,
            steps,
        })
    }

    /// Fitness change from flipping `v`, in O(occurrences of v).
    fn flip_delta(&self, state: &FlipState, v: usize) -> i64 {
        let mut delta = 0i64;
        for occ in &self.occurrences[v] {
            let count = state.true_counts[occ.clause as usize];
            if state.bits[v] != occ.negated {
                // Literal is currently true; flipping breaks the clause iff
                // it was the only true literal.
                if count == 1 {
                    delta -= 1;
                }
            } else if count == 0 {
                delta += 1;
            }
        }
        delta
    }

    fn apply_flip(&self, state: &mut FlipState, v: usize) {
        for occ in &self.occurrences[v] {
            let count = &mut state.true_counts[occ.clause as usize];
            if state.bits[v] != occ.negated {
                *count -= 1;
                if *count == 0 {
                    state.fitness -= 1;
                }
            } else {
                *count += 1;
                if *count == 1 {
                    state.fitness += 1;
                }
            }
        }
        state.bits[v] = !state.bits[v];
    }
}

struct FlipState {
    bits: Vec<bool>,
    true_counts: Vec<u32>,
    fitness: usize,
}

impl FlipState {
    fn new(formula: &CnfFormula, start: Assignment) -> Self {
        let bits: Vec<bool> = start.bits().to_vec();
        let mut true_counts = vec![0u32; formula.clause_count()];
        let mut fitness = 0;
        for (c, clause) in formula.clauses().iter().enumerate() {
            let count = clause
                .literals()
                .iter()
                .filter(|lit| lit.satisfied_by(bits[lit.variable()]))
                .count() as u32;
            if count > 0 {
                fitness += 1;
            }
            true_counts[c] = count;
        }
        FlipState { bits, true_counts, fitness }
    }
}

/// One-shot local search; builds the occurrence index, refines `start`, and
/// returns the final assignment with its fitness.
pub fn local_search(
    formula: &CnfFormula,
    start: Assignment,
    cfg: LocalSearchConfig,
) -> Result<(Assignment, usize), AssignmentMismatch> {
    let refinement = LocalSearch::new(formula, cfg).refine(start)?;
    Ok((refinement.assignment, refinement.fitness))
}
