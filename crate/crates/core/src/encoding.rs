//! Pieces shared by the tableau and matrix encoders.

use std::collections::HashSet;

use connsat_sat::{Formula, LBool, Lit, Solver, Var};

use crate::unify::{Explanation, Mark, SubstitutionStore};

/// A propagated constraint `antecedents ⊩ disjunct₁ ∨ … ∨ disjunctₙ`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub antecedents: Vec<Lit>,
    /// Literal standing for each disjunct, parallel to `formulas`.
    pub disjuncts: Vec<Lit>,
    pub formulas: Vec<Formula>,
}

#[derive(Clone, Debug, Default)]
pub struct ConstraintLog {
    pub constraints: Vec<Constraint>,
}

impl ConstraintLog {
    /// Add the constraint to the solver and remember it. An empty disjunct
    /// list refutes the antecedents.
    pub fn propagate(&mut self, solver: &mut Solver, antecedents: Vec<Lit>, formulas: Vec<Formula>) -> usize {
        let disjuncts = solver.propagate_constraint(&antecedents, &Formula::Or(formulas.clone()));
        self.constraints.push(Constraint { antecedents, disjuncts, formulas });
        self.constraints.len() - 1
    }

    /// First unassigned disjunct of the oldest constraint whose antecedents
    /// hold and which is not yet satisfied.
    pub fn relevant_decision(&self, solver: &Solver) -> Option<Lit> {
        'outer: for c in &self.constraints {
            for &a in &c.antecedents {
                if solver.value(a) != LBool::True {
                    continue 'outer;
                }
            }
            let mut candidate = None;
            for &d in &c.disjuncts {
                match solver.value(d) {
                    LBool::True => continue 'outer,
                    LBool::Undef if candidate.is_none() => candidate = Some(d),
                    _ => {}
                }
            }
            if candidate.is_some() {
                return candidate;
            }
        }
        None
    }
}

/// Positive literals seen through `on_assign`, and substitution marks, both
/// stacked by decision level.
#[derive(Debug, Default)]
pub struct LevelTrail {
    assigned: Vec<(u32, Var)>,
    truth: HashSet<Var>,
    marks: Vec<(u32, Mark)>,
}

impl LevelTrail {
    pub fn assign(&mut self, level: u32, var: Var) {
        self.assigned.push((level, var));
        self.truth.insert(var);
    }

    pub fn is_true(&self, var: Var) -> bool {
        self.truth.contains(&var)
    }

    /// Record the store state before a change made at `level`.
    pub fn mark(&mut self, level: u32, store: &SubstitutionStore) {
        self.marks.push((level, store.mark()));
    }

    pub fn backtrack(&mut self, level: u32, store: &mut SubstitutionStore) {
        while let Some(&(l, v)) = self.assigned.last() {
            if l <= level {
                break;
            }
            self.assigned.pop();
            self.truth.remove(&v);
        }
        let mut oldest = None;
        while let Some(&(l, m)) = self.marks.last() {
            if l <= level {
                break;
            }
            self.marks.pop();
            oldest = Some(m);
        }
        if let Some(m) = oldest {
            store.retract_to(m);
        }
    }
}

/// The clause refuting the tags of an explanation; tags are variable
/// indices of literals that are currently true.
pub fn conflict_clause(e: &Explanation) -> Vec<Lit> {
    e.tags.iter().map(|&t| Var(t).neg()).collect()
}

pub fn tag(v: Var) -> u32 {
    v.0
}

/// Render a formula, naming variables with `name`.
pub fn describe(f: &Formula, name: &impl Fn(Var) -> String) -> String {
    match f {
        Formula::Lit(l) if l.is_positive() => name(l.var()),
        Formula::Lit(l) => format!("-{}", name(l.var())),
        Formula::And(items) => items.iter().map(|i| describe_nested(i, name)).collect::<Vec<_>>().join(" & "),
        Formula::Or(items) => items.iter().map(|i| describe_nested(i, name)).collect::<Vec<_>>().join(" | "),
    }
}

fn describe_nested(f: &Formula, name: &impl Fn(Var) -> String) -> String {
    match f {
        Formula::Lit(_) => describe(f, name),
        _ => format!("({})", describe(f, name)),
    }
}

/// Counters accumulated over all solver instances of one proof attempt.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Deepening steps (tableau, EM) or core refinements (EU, EH).
    pub steps: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub final_checks: u64,
    pub injected_clauses: u64,
    /// Clause ids whose budget assumption was in each unsat core.
    pub cores: Vec<Vec<usize>>,
    /// Final per-clause copy budgets (EU, EH).
    pub multiplicities: Vec<usize>,
}

impl SearchStats {
    pub fn absorb(&mut self, s: &connsat_sat::SolverStats) {
        self.conflicts += s.conflicts;
        self.decisions += s.decisions;
        self.propagations += s.propagations;
        self.final_checks += s.final_checks;
        self.injected_clauses += s.injected_clauses;
    }
}
