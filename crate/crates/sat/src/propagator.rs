//! The user-propagation contract.
//!
//! A [`Propagator`] is attached to a single [`Solver::solve_with`] call and
//! observes the search: it is told about every assignment in trail order and
//! about every backtrack, may inject clauses (possibly over fresh variables)
//! in response, may suggest decisions, and gets a final say on every complete
//! assignment before it is reported as a model.
//!
//! Notifications are incremental across calls on the same solver: root-level
//! assignments that were already reported are not reported again. Pair one
//! solver instance with one propagator for its lifetime when solving
//! incrementally.

use std::ops::{Deref, DerefMut};

use crate::formula::Formula;
use crate::lit::{Lit, Var};
use crate::solver::Solver;

/// Outcome of the final check on a complete assignment.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FinalCheck {
    Accept,
    /// The model is rejected; the propagator must have injected at least one
    /// clause that the current assignment falsifies or that mentions a fresh
    /// variable.
    Reject,
}

pub trait Propagator {
    /// `lit` has been assigned true at decision level `level`.
    fn on_assign(&mut self, _ctx: &mut SolverCtx<'_>, _lit: Lit, _level: u32) {}

    /// All assignments above `level` have been undone.
    fn on_backtrack(&mut self, _level: u32) {}

    /// Suggest the next decision. Ignored unless the literal is unassigned.
    fn on_decide(&mut self, _solver: &Solver) -> Option<Lit> {
        None
    }

    /// Inspect a complete assignment.
    fn on_final(&mut self, _ctx: &mut SolverCtx<'_>) -> FinalCheck {
        FinalCheck::Accept
    }

    /// When false, `on_assign` is never called.
    fn observes_assignments(&self) -> bool {
        true
    }
}

/// Propagator that accepts everything and observes nothing.
#[derive(Default, Debug, Clone, Copy)]
pub struct NoPropagator;

impl Propagator for NoPropagator {
    fn observes_assignments(&self) -> bool {
        false
    }
}

/// Mutable view of the solver handed to hooks. Clause injection is queued
/// and handled once the hook returns. Solving from inside a hook panics.
pub struct SolverCtx<'a> {
    pub(crate) solver: &'a mut Solver,
}

impl SolverCtx<'_> {
    pub fn new_var(&mut self) -> Var {
        self.solver.new_var()
    }

    pub fn add_clause(&mut self, lits: &[Lit]) {
        self.solver.add_clause(lits);
    }

    pub fn propagate_constraint(&mut self, antecedents: &[Lit], f: &Formula) -> Vec<Lit> {
        self.solver.propagate_constraint(antecedents, f)
    }

    pub fn set_phase(&mut self, var: Var, phase: bool) {
        self.solver.set_phase(var, phase);
    }
}

impl Deref for SolverCtx<'_> {
    type Target = Solver;

    fn deref(&self) -> &Solver {
        self.solver
    }
}

impl DerefMut for SolverCtx<'_> {
    fn deref_mut(&mut self) -> &mut Solver {
        self.solver
    }
}
