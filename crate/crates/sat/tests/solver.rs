mod common;

use std::collections::HashSet;

use common::{brute_force, random_3cnf};
use connsat_sat::{
    Cnf, FinalCheck, Formula, LBool, Lit, Propagator, SolveResult, Solver, SolverCtx, Var,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn solver_for(num_vars: usize, clauses: &[Vec<Lit>]) -> (Solver, Vec<Var>) {
    let mut s = Solver::new();
    let vars = (0..num_vars).map(|_| s.new_var()).collect();
    for c in clauses {
        s.add_clause(c);
    }
    (s, vars)
}

#[test]
fn random_3cnf_matches_brute_force() {
    let mut rng = StdRng::seed_from_u64(7);
    for round in 0..200 {
        let n = 5 + round % 20;
        let m = (n as f64 * 4.26) as usize;
        let clauses = random_3cnf(&mut rng, n, m);
        let (mut s, _) = solver_for(n, &clauses);
        let expected = brute_force(n, &clauses).is_some();
        match s.solve(&[]) {
            SolveResult::Sat(model) => {
                assert!(expected, "round {round}: solver says sat");
                assert!(clauses.iter().all(|c| model.satisfies(c)));
            }
            SolveResult::Unsat(core) => {
                assert!(!expected, "round {round}: solver says unsat");
                assert!(core.is_empty());
            }
            SolveResult::Interrupted => panic!("no budget was set"),
        }
    }
}

#[test]
fn cores_are_unsat_subsets_of_assumptions() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut seen_nonempty = 0;
    for _ in 0..200 {
        let n = 12;
        let clauses = random_3cnf(&mut rng, n, 30);
        let (mut s, vars) = solver_for(n, &clauses);
        let assumptions: Vec<Lit> =
            vars.iter().take(6).enumerate().map(|(i, v)| if i % 2 == 0 { v.pos() } else { v.neg() }).collect();
        let mut with_units = clauses.clone();
        with_units.extend(assumptions.iter().map(|&a| vec![a]));
        let expected = brute_force(n, &with_units).is_some();
        match s.solve(&assumptions) {
            SolveResult::Sat(m) => {
                assert!(expected);
                assert!(assumptions.iter().all(|&a| m.value(a)));
            }
            SolveResult::Unsat(core) => {
                assert!(!expected);
                assert!(core.iter().all(|l| assumptions.contains(l)));
                if !core.is_empty() {
                    seen_nonempty += 1;
                }
                assert!(s.solve(&core).is_unsat());
            }
            SolveResult::Interrupted => unreachable!(),
        }
        // incremental reuse: the solver is unaffected by the assumptions
        assert_eq!(s.solve(&[]).is_sat(), brute_force(n, &clauses).is_some());
    }
    assert!(seen_nonempty > 0);
}

#[test]
fn pigeonhole_three_into_two() {
    let mut s = Solver::new();
    let p: Vec<Vec<Var>> = (0..3).map(|_| (0..2).map(|_| s.new_var()).collect()).collect();
    for row in &p {
        s.add_clause(&[row[0].pos(), row[1].pos()]);
    }
    for h in 0..2 {
        for i in 0..3 {
            for j in i + 1..3 {
                s.add_clause(&[p[i][h].neg(), p[j][h].neg()]);
            }
        }
    }
    assert!(s.solve(&[]).is_unsat());
}

fn count_models(k: usize, n: usize) -> usize {
    // enumerate with blocking clauses over the inputs
    let mut s = Solver::new();
    let xs: Vec<Lit> = (0..n).map(|_| s.new_var().pos()).collect();
    s.add_exactly_k(&xs, k);
    let mut count = 0;
    while let SolveResult::Sat(m) = s.solve(&[]) {
        assert_eq!(xs.iter().filter(|&&x| m.value(x)).count(), k);
        count += 1;
        let block: Vec<Lit> = xs.iter().map(|&x| if m.value(x) { !x } else { x }).collect();
        s.add_clause(&block);
    }
    count
}

#[test]
fn exactly_k_counts() {
    assert_eq!(count_models(1, 2), 2);
    assert_eq!(count_models(2, 3), 3);
    assert_eq!(count_models(2, 4), 6);
    assert_eq!(count_models(0, 3), 1);
    assert_eq!(count_models(3, 3), 1);
    assert_eq!(count_models(4, 3), 0);
}

#[test]
fn conjunction_definitions_are_equivalences() {
    let mut s = Solver::new();
    let a = s.new_var().pos();
    let b = s.new_var().pos();
    let d = s.define(&Formula::and_lits([a, b]));
    for (va, vb) in [(false, false), (false, true), (true, false), (true, true)] {
        let asm = [if va { a } else { !a }, if vb { b } else { !b }];
        match s.solve(&asm) {
            SolveResult::Sat(m) => assert_eq!(m.value(d), va && vb),
            r => panic!("{r:?}"),
        }
    }
}

/// Enforces "at most one of `xs`" only through final checks.
struct LazyAtMostOne {
    xs: Vec<Lit>,
    rejections: usize,
}

impl Propagator for LazyAtMostOne {
    fn observes_assignments(&self) -> bool {
        false
    }

    fn on_final(&mut self, ctx: &mut SolverCtx<'_>) -> FinalCheck {
        let on: Vec<Lit> = self.xs.iter().copied().filter(|&x| ctx.value(x) == LBool::True).collect();
        if on.len() <= 1 {
            return FinalCheck::Accept;
        }
        self.rejections += 1;
        ctx.add_clause(&[!on[0], !on[1]]);
        FinalCheck::Reject
    }
}

#[test]
fn final_check_refinement_terminates() {
    let mut s = Solver::new();
    let xs: Vec<Lit> = (0..6).map(|_| s.new_var().pos()).collect();
    s.add_clause(&xs);
    for x in &xs {
        s.set_phase(x.var(), true);
    }
    let mut hook = LazyAtMostOne { xs: xs.clone(), rejections: 0 };
    match s.solve_with(&[], &mut hook) {
        SolveResult::Sat(m) => assert_eq!(xs.iter().filter(|&&x| m.value(x)).count(), 1),
        r => panic!("{r:?}"),
    }
    assert!(hook.rejections > 0);

    // adding "at least two" makes the lazily refined problem unsatisfiable
    for i in 0..xs.len() {
        let rest: Vec<Lit> = xs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
        s.add_clause(&rest);
    }
    assert!(s.solve_with(&[], &mut hook).is_unsat());
}

/// Checks that notifications mirror the trail and injects `x -> y` pairs.
struct Mirror {
    assigned: Vec<(Lit, u32)>,
    pairs: Vec<(Lit, Lit)>,
}

impl Propagator for Mirror {
    fn on_assign(&mut self, ctx: &mut SolverCtx<'_>, lit: Lit, level: u32) {
        assert_eq!(ctx.value(lit), LBool::True);
        assert_eq!(ctx.var_level(lit.var()), level);
        assert!(level <= ctx.decision_level());
        self.assigned.push((lit, level));
        for &(x, y) in &self.pairs {
            if x == lit && ctx.value(y) != LBool::True {
                ctx.add_clause(&[!x, y]);
            }
        }
    }

    fn on_backtrack(&mut self, level: u32) {
        while self.assigned.last().is_some_and(|&(_, l)| l > level) {
            self.assigned.pop();
        }
    }

    fn on_final(&mut self, ctx: &mut SolverCtx<'_>) -> FinalCheck {
        let on_trail: HashSet<Lit> = ctx.trail().iter().copied().collect();
        let mirrored: HashSet<Lit> = self.assigned.iter().map(|&(l, _)| l).collect();
        assert_eq!(on_trail, mirrored);
        FinalCheck::Accept
    }
}

#[test]
fn hooks_see_a_consistent_trail() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..100 {
        let n = 15;
        let clauses = random_3cnf(&mut rng, n, 40);
        let (mut s, vars) = solver_for(n, &clauses);
        let pairs: Vec<(Lit, Lit)> = (0..n - 1).step_by(2).map(|i| (vars[i].pos(), vars[i + 1].neg())).collect();
        let mut all = clauses.clone();
        all.extend(pairs.iter().map(|&(x, y)| vec![!x, y]));
        let expected = brute_force(n, &all).is_some();
        let mut hook = Mirror { assigned: Vec::new(), pairs };
        match s.solve_with(&[], &mut hook) {
            SolveResult::Sat(m) => {
                assert!(expected);
                assert!(all.iter().all(|c| m.satisfies(c)));
            }
            SolveResult::Unsat(_) => assert!(!expected),
            SolveResult::Interrupted => unreachable!(),
        }
    }
}

struct PreferTrue(Vec<Lit>);

impl Propagator for PreferTrue {
    fn observes_assignments(&self) -> bool {
        false
    }

    fn on_decide(&mut self, solver: &Solver) -> Option<Lit> {
        self.0.iter().copied().find(|&l| solver.value(l) == LBool::Undef)
    }
}

#[test]
fn decision_hook_steers_the_model() {
    let mut s = Solver::new();
    let xs: Vec<Lit> = (0..5).map(|_| s.new_var().pos()).collect();
    s.add_clause(&[!xs[0], !xs[1]]);
    let mut hook = PreferTrue(xs.clone());
    match s.solve_with(&[], &mut hook) {
        SolveResult::Sat(m) => {
            assert!(m.value(xs[0]));
            assert!(!m.value(xs[1]));
            assert!(xs[2..].iter().all(|&x| m.value(x)));
        }
        r => panic!("{r:?}"),
    }
}

#[test]
fn conflict_budget_interrupts() {
    let mut s = Solver::new();
    let n = 9;
    let p: Vec<Vec<Var>> = (0..n + 1).map(|_| (0..n).map(|_| s.new_var()).collect()).collect();
    for row in &p {
        s.add_clause(&row.iter().map(|v| v.pos()).collect::<Vec<_>>());
    }
    for h in 0..n {
        for i in 0..=n {
            for j in i + 1..=n {
                s.add_clause(&[p[i][h].neg(), p[j][h].neg()]);
            }
        }
    }
    s.set_conflict_budget(Some(10));
    assert_eq!(s.solve(&[]), SolveResult::Interrupted);
}

#[test]
fn dimacs_solver_round_trip() {
    let cnf = Cnf::parse("p cnf 3 3\n1 2 0\n-1 0\n-2 3 0\n").unwrap();
    let mut s = cnf.into_solver();
    match s.solve(&[]) {
        SolveResult::Sat(m) => assert!(cnf.clauses.iter().all(|c| m.satisfies(c))),
        r => panic!("{r:?}"),
    }
    let again = Cnf::parse(&s.to_dimacs()).unwrap();
    assert!(again.into_solver().solve(&[]).is_sat());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn small_cnf_agrees_with_oracle(raw in prop::collection::vec(prop::collection::vec((0usize..8, any::<bool>()), 1..4), 0..30)) {
        let clauses: Vec<Vec<Lit>> = raw
            .iter()
            .map(|c| c.iter().map(|&(v, p)| Lit::new(Var(v as u32), p)).collect())
            .collect();
        let (mut s, _) = solver_for(8, &clauses);
        let expected = brute_force(8, &clauses).is_some();
        match s.solve(&[]) {
            SolveResult::Sat(m) => {
                prop_assert!(expected);
                prop_assert!(clauses.iter().all(|c| m.satisfies(c)));
            }
            SolveResult::Unsat(_) => prop_assert!(!expected),
            SolveResult::Interrupted => prop_assert!(false),
        }
    }
}
