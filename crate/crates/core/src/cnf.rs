//! CNF formula representation, assignment evaluation and DIMACS I/O.
//!
//! A [`CnfFormula`] is an immutable conjunction of clauses over `n` boolean
//! variables; an [`Assignment`] is one bit per variable. Fitness of an
//! assignment is the number of clauses it satisfies, so `fitness == m` means
//! the formula is satisfied and `m - fitness` is the "false clause" count
//! used in MAX-SAT style reporting.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A propositional variable or its negation.
///
/// Variable indices are 0-based everywhere inside the library; DIMACS 1-based
/// numbering is converted at the I/O boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    variable: usize,
    negated: bool,
}

impl Literal {
    pub fn new(variable: usize, negated: bool) -> Self {
        Literal { variable, negated }
    }

    pub fn positive(variable: usize) -> Self {
        Literal::new(variable, false)
    }

    pub fn negative(variable: usize) -> Self {
        Literal::new(variable, true)
    }

    pub fn variable(self) -> usize {
        self.variable
    }

    pub fn negated(self) -> bool {
        self.negated
    }

    /// True under `bit`, the value assigned to this literal's variable.
    pub fn satisfied_by(self, bit: bool) -> bool {
        bit != self.negated
    }

    /// Signed 1-based DIMACS form: variable 0 positive is `1`, negated is `-1`.
    pub fn to_dimacs(self) -> i64 {
        let v = self.variable as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }
}

/// A disjunction of literals.
///
/// Clauses are non-empty and never contain the same literal twice. A clause
/// containing both a variable and its negation is kept as-is: benchmark files
/// contain such tautologies and dropping them would change the clause count
/// that reports are based on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    /// Builds a clause, dropping duplicate literals (same variable, same
    /// polarity) while preserving first-occurrence order.
    ///
    /// # Panics
    ///
    /// Panics if `literals` is empty; empty clauses are unsatisfiable by
    /// definition and never valid here.
    pub fn new(literals: impl Into<Vec<Literal>>) -> Self {
        let mut literals = literals.into();
        assert!(!literals.is_empty(), "clause must contain at least one literal");
        let mut seen: Vec<Literal> = Vec::with_capacity(literals.len());
        literals.retain(|lit| {
            if seen.contains(lit) {
                false
            } else {
                seen.push(*lit);
                true
            }
        });
        Clause { literals }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }
}

/// Error building a formula whose clauses mention out-of-range variables.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("clause {clause} references variable {variable}, but the formula has {variable_count} variables")]
    VariableOutOfRange {
        clause: usize,
        variable: usize,
        variable_count: usize,
    },
}

/// An immutable CNF formula: `clause_count()` clauses over
/// `variable_count()` variables. Clause order is stable; clause indices are
/// meaningful in reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    variable_count: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(variable_count: usize, clauses: Vec<Clause>) -> Result<Self, FormulaError> {
        for (c, clause) in clauses.iter().enumerate() {
            for lit in clause.literals() {
                if lit.variable() >= variable_count {
                    return Err(FormulaError::VariableOutOfRange {
                        clause: c,
                        variable: lit.variable(),
                        variable_count,
                    });
                }
            }
        }
        Ok(CnfFormula { variable_count, clauses })
    }

    /// The formula with no variables and no clauses (vacuously satisfiable).
    pub fn empty() -> Self {
        CnfFormula { variable_count: 0, clauses: Vec::new() }
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    fn check_assignment(&self, assignment: &Assignment) -> Result<(), AssignmentMismatch> {
        if assignment.len() != self.variable_count {
            return Err(AssignmentMismatch {
                variable_count: self.variable_count,
                assignment_len: assignment.len(),
            });
        }
        Ok(())
    }

    /// Fitness: the number of clauses with at least one true literal.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<usize, AssignmentMismatch> {
        self.check_assignment(assignment)?;
        Ok(self
            .clauses
            .iter()
            .filter(|clause| clause_satisfied(clause, assignment))
            .count())
    }

    /// Indices of all clauses false under `assignment`, in ascending order.
    pub fn unsatisfied_clauses(&self, assignment: &Assignment) -> Result<Vec<usize>, AssignmentMismatch> {
        self.check_assignment(assignment)?;
        Ok(self
            .clauses
            .iter()
            .enumerate()
            .filter(|(_, clause)| !clause_satisfied(clause, assignment))
            .map(|(i, _)| i)
            .collect())
    }

    /// Canonical DIMACS text: one `p cnf` header, one clause per line,
    /// LF endings. `parse_dimacs(f.to_dimacs())` reproduces `f` exactly.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.variable_count, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause.literals() {
                out.push_str(&lit.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

fn clause_satisfied(clause: &Clause, assignment: &Assignment) -> bool {
    clause
        .literals()
        .iter()
        .any(|lit| lit.satisfied_by(assignment.bit(lit.variable())))
}

/// The assignment length does not match the formula's variable count.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("assignment has {assignment_len} bits but the formula has {variable_count} variables")]
pub struct AssignmentMismatch {
    pub variable_count: usize,
    pub assignment_len: usize,
}

/// A full truth assignment: one bit per variable, `true` meaning TRUE.
///
/// Serialized as a `0`/`1` string (`"1011"`), which keeps JSON reports
/// readable for large variable counts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn from_bits(bits: impl Into<Vec<bool>>) -> Self {
        Assignment { bits: bits.into() }
    }

    pub fn all_false(len: usize) -> Self {
        Assignment { bits: vec![false; len] }
    }

    /// Uniformly random assignment: each bit an independent fair coin.
    pub fn random(len: usize, rng: &mut impl rand::Rng) -> Self {
        Assignment { bits: (0..len).map(|_| rng.random()).collect() }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn set(&mut self, index: usize, value: bool) {
        self.bits[index] = value;
    }

    pub fn flip(&mut self, index: usize) {
        self.bits[index] = !self.bits[index];
    }

    /// The assignment differing from `self` only in `index`.
    pub fn flipped(&self, index: usize) -> Self {
        let mut out = self.clone();
        out.flip(index);
        out
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

impl From<Vec<bool>> for Assignment {
    fn from(bits: Vec<bool>) -> Self {
        Assignment { bits }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &bit in &self.bits {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Assignment({self})")
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        let bits = text
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(D::Error::custom(format!("invalid assignment bit `{other}`"))),
            })
            .collect::<Result<Vec<bool>, _>>()?;
        Ok(Assignment { bits })
    }
}

/// A DIMACS parse failure, with the 1-based input line it was detected on.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("missing `p cnf <vars> <clauses>` header")]
    MissingHeader,
    #[error("duplicate `p cnf` header")]
    DuplicateHeader,
    #[error("malformed header (expected `p cnf <vars> <clauses>`)")]
    MalformedHeader,
    #[error("literal {literal} out of range for {variable_count} variables")]
    LiteralOutOfRange { literal: i64, variable_count: usize },
    #[error("empty clause")]
    EmptyClause,
    #[error("clause not terminated by 0 before end of input")]
    UnterminatedClause,
    #[error("expected {expected} clauses, found {found}")]
    ClauseCountMismatch { expected: usize, found: usize },
    #[error("invalid token `{0}`")]
    InvalidToken(String),
}

/// Parses DIMACS CNF text.
///
/// Accepts `c` comment lines anywhere, exactly one `p cnf <n> <m>` header,
/// then `m` clauses as signed non-zero integers terminated by `0`; clauses
/// may span lines and lines may hold several clauses. A line starting with
/// `%` ends the input (SATLIB convention). DIMACS variable `i` maps to
/// index `i - 1`; negative means negated.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut pending: Vec<Literal> = Vec::new();
    let mut last_line = 0;

    let err = |line: usize, kind: ParseErrorKind| ParseError { line, kind };

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, ParseErrorKind::DuplicateHeader));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", vars, clauses] => vars
                    .parse::<usize>()
                    .ok()
                    .zip(clauses.parse::<usize>().ok()),
                _ => None,
            };
            match parsed {
                Some((n, m)) => header = Some((n, m)),
                None => return Err(err(line_no, ParseErrorKind::MalformedHeader)),
            }
            continue;
        }

        let (variable_count, expected) = match header {
            Some(h) => h,
            None => return Err(err(line_no, ParseErrorKind::MissingHeader)),
        };
        for token in line.split_whitespace() {
            let value: i64 = token
                .parse()
                .map_err(|_| err(line_no, ParseErrorKind::InvalidToken(token.to_string())))?;
            if value == 0 {
                if pending.is_empty() {
                    return Err(err(line_no, ParseErrorKind::EmptyClause));
                }
                if clauses.len() == expected {
                    return Err(err(
                        line_no,
                        ParseErrorKind::ClauseCountMismatch {
                            expected,
                            found: expected + 1,
                        },
                    ));
                }
                clauses.push(Clause::new(std::mem::take(&mut pending)));
            } else {
                if value.unsigned_abs() as usize > variable_count {
                    return Err(err(
                        line_no,
                        ParseErrorKind::LiteralOutOfRange { literal: value, variable_count },
                    ));
                }
                let variable = value.unsigned_abs() as usize - 1;
                pending.push(Literal::new(variable, value < 0));
            }
        }
    }

    let (variable_count, expected) = match header {
        Some(h) => h,
        None => return Err(err(last_line.max(1), ParseErrorKind::MissingHeader)),
    };
    if !pending.is_empty() {
        return Err(err(last_line, ParseErrorKind::UnterminatedClause));
    }
    if clauses.len() != expected {
        return Err(err(
            last_line,
            ParseErrorKind::ClauseCountMismatch { expected, found: clauses.len() },
        ));
    }
    Ok(CnfFormula::new(variable_count, clauses).expect("parser bounds every literal"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// The worked four-variable example formula:
    /// (p1 v p2 v -p3) ^ (-p1 v p2 v p3) ^ (-p1 v -p2 v p3) ^ (p1 v -p3 v p4).
    const EXAMPLE_DIMACS: &str = "p cnf 4 4\n1 2 -3 0\n-1 2 3 0\n-1 -2 3 0\n1 -3 4 0\n";

    fn example_formula() -> CnfFormula {
        parse_dimacs(EXAMPLE_DIMACS).unwrap()
    }

    fn assignment(bits: &[bool]) -> Assignment {
        Assignment::from_bits(bits.to_vec())
    }

    #[test]
    fn evaluate_empty_formula() {
        let f = CnfFormula::empty();
        assert_eq!(f.evaluate(&Assignment::all_false(0)).unwrap(), 0);
        assert_eq!(f.unsatisfied_clauses(&Assignment::all_false(0)).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn evaluate_example_formula_all_true() {
        let f = example_formula();
        let a = assignment(&[true, true, true, true]);
        assert_eq!(f.evaluate(&a).unwrap(), 4);
        assert_eq!(f.unsatisfied_clauses(&a).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn evaluate_example_formula_partial() {
        let f = example_formula();
        let a = assignment(&[false, false, true, false]);
        assert_eq!(f.evaluate(&a).unwrap(), 2);
        assert_eq!(f.unsatisfied_clauses(&a).unwrap(), vec![0, 3]);
    }

    #[test]
    fn evaluate_rejects_length_mismatch() {
        let f = example_formula();
        let a = assignment(&[true, true]);
        assert_eq!(
            f.evaluate(&a),
            Err(AssignmentMismatch { variable_count: 4, assignment_len: 2 })
        );
        assert!(f.unsatisfied_clauses(&a).is_err());
    }

    #[test]
    fn parse_example() {
        let f = example_formula();
        assert_eq!(f.variable_count(), 4);
        assert_eq!(f.clause_count(), 4);
        assert_eq!(
            f.clauses()[0].literals(),
            &[Literal::positive(0), Literal::positive(1), Literal::negative(2)]
        );
        assert_eq!(
            f.clauses()[3].literals(),
            &[Literal::positive(0), Literal::negative(2), Literal::positive(3)]
        );
    }

    #[test]
    fn parse_header_only() {
        let f = parse_dimacs("p cnf 1 0\n").unwrap();
        assert_eq!(f.variable_count(), 1);
        assert_eq!(f.clause_count(), 0);
    }

    #[test]
    fn parse_literal_out_of_range() {
        let e = parse_dimacs("p cnf 2 1\n3 0\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(e.kind, ParseErrorKind::LiteralOutOfRange { literal: 3, variable_count: 2 });
    }

    #[test]
    fn parse_missing_header() {
        let e = parse_dimacs("1 2 0\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingHeader);
        assert_eq!(parse_dimacs("").unwrap_err().kind, ParseErrorKind::MissingHeader);
    }

    #[test]
    fn parse_duplicate_header() {
        let e = parse_dimacs("p cnf 2 0\np cnf 2 0\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(e.kind, ParseErrorKind::DuplicateHeader);
    }

    #[test]
    fn parse_empty_clause() {
        let e = parse_dimacs("p cnf 2 1\n0\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::EmptyClause);
    }

    #[test]
    fn parse_clause_count_mismatch() {
        let too_few = parse_dimacs("p cnf 2 2\n1 0\n").unwrap_err();
        assert_eq!(too_few.kind, ParseErrorKind::ClauseCountMismatch { expected: 2, found: 1 });
        let too_many = parse_dimacs("p cnf 2 1\n1 0\n2 0\n").unwrap_err();
        assert_eq!(too_many.kind, ParseErrorKind::ClauseCountMismatch { expected: 1, found: 2 });
    }

    #[test]
    fn parse_unterminated_clause() {
        let e = parse_dimacs("p cnf 2 1\n1 2\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnterminatedClause);
    }

    #[test]
    fn parse_clauses_spanning_lines_and_comments() {
        let f = parse_dimacs("c comment\np cnf 3 2\n1 2\n3 0\nc mid comment\n-1 -2 -3 0\n").unwrap();
        assert_eq!(f.clause_count(), 2);
        assert_eq!(f.clauses()[0].len(), 3);
    }

    #[test]
    fn parse_deduplicates_but_keeps_tautologies() {
        let f = parse_dimacs("p cnf 2 1\n1 1 -1 0\n").unwrap();
        assert_eq!(f.clause_count(), 1);
        assert_eq!(f.clauses()[0].literals(), &[Literal::positive(0), Literal::negative(0)]);
        // Tautology: satisfied under every assignment.
        assert_eq!(f.evaluate(&assignment(&[false, false])).unwrap(), 1);
        assert_eq!(f.evaluate(&assignment(&[true, true])).unwrap(), 1);
    }

    #[test]
    fn parse_tolerates_satlib_percent_trailer() {
        let f = parse_dimacs("p cnf 2 1\n1 2 0\n%\n0\n").unwrap();
        assert_eq!(f.clause_count(), 1);
    }

    #[test]
    fn write_example() {
        assert_eq!(example_formula().to_dimacs(), EXAMPLE_DIMACS);
    }

    #[test]
    fn write_empty() {
        assert_eq!(CnfFormula::empty().to_dimacs(), "p cnf 0 0\n");
    }

    #[test]
    fn formula_rejects_out_of_range_variable() {
        let clause = Clause::new(vec![Literal::positive(5)]);
        assert_eq!(
            CnfFormula::new(3, vec![clause]),
            Err(FormulaError::VariableOutOfRange { clause: 0, variable: 5, variable_count: 3 })
        );
    }

    #[test]
    fn assignment_serde_round_trip() {
        let a = assignment(&[true, false, true, true]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "\"1011\"");
        let back: Assignment = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }

    prop_compose! {
        fn arb_formula()(variable_count in 1usize..8)(
            variable_count in Just(variable_count),
            clause_specs in proptest::collection::vec(
                proptest::collection::vec((0usize..variable_count, any::<bool>()), 1..4),
                0..12,
            ),
        ) -> CnfFormula {
            let clauses = clause_specs
                .into_iter()
                .map(|lits| {
                    Clause::new(
                        lits.into_iter()
                            .map(|(v, neg)| Literal::new(v, neg))
                            .collect::<Vec<_>>(),
                    )
                })
                .collect();
            CnfFormula::new(variable_count, clauses).unwrap()
        }
    }

    proptest! {
        #[test]
        fn fitness_plus_false_clauses_is_m(f in arb_formula(), bits in proptest::collection::vec(any::<bool>(), 8)) {
            let a = Assignment::from_bits(bits[..f.variable_count()].to_vec());
            let fitness = f.evaluate(&a).unwrap();
            let unsat = f.unsatisfied_clauses(&a).unwrap();
            prop_assert_eq!(fitness + unsat.len(), f.clause_count());
            prop_assert!(fitness <= f.clause_count());
            prop_assert_eq!(fitness == f.clause_count(), unsat.is_empty());
            // Ascending indices.
            prop_assert!(unsat.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn flipping_one_variable_is_local(
            f in arb_formula(),
            bits in proptest::collection::vec(any::<bool>(), 8),
            var_pick in any::<proptest::sample::Index>(),
        ) {
            let a = Assignment::from_bits(bits[..f.variable_count()].to_vec());
            let v = var_pick.index(f.variable_count());
            let occurrences = f
                .clauses()
                .iter()
                .filter(|c| c.literals().iter().any(|l| l.variable() == v))
                .count();
            let before = f.evaluate(&a).unwrap() as i64;
            let after = f.evaluate(&a.flipped(v)).unwrap() as i64;
            prop_assert!((before - after).unsigned_abs() as usize <= occurrences);
        }

        #[test]
        fn dimacs_round_trip(f in arb_formula()) {
            let back = parse_dimacs(&f.to_dimacs()).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
