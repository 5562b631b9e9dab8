//! A CDCL SAT solver with a user-propagation interface.
//!
//! ```
//! use connsat_sat::{Solver, SolveResult};
//!
//! let mut s = Solver::new();
//! let a = s.new_var();
//! let b = s.new_var();
//! s.add_clause(&[a.pos(), b.pos()]);
//! s.add_clause(&[a.neg()]);
//! match s.solve(&[]) {
//!     SolveResult::Sat(m) => assert!(m.var_value(b)),
//!     _ => unreachable!(),
//! }
//! ```

mod card;
mod dimacs;
mod formula;
mod heap;
mod lit;
mod propagator;
mod solver;

pub use dimacs::{Cnf, DimacsError};
pub use formula::Formula;
pub use lit::{LBool, Lit, Var};
pub use propagator::{FinalCheck, NoPropagator, Propagator, SolverCtx};
pub use solver::{luby, Model, SolveResult, Solver, SolverConfig, SolverStats};
