//! Matrix proofs as SAT: clause-copy selectors, lazily propagated
//! connectedness, open-path blocking at the final check, and copy budgets
//! driven either by a global size (EM) or by unsat cores (EU, EH).

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use connsat_sat::{FinalCheck, Formula, Lit, Model, Propagator, SolveResult, Solver, SolverCtx, Var};

use crate::encoding::{conflict_clause, describe, tag, ConstraintLog, LevelTrail, SearchStats};
use crate::problem::{ConnectionTable, Site};
use crate::proof::{resolved_substitution, Connection, CopyRef, LitRef, Proof};
use crate::term::{Literal, Problem, Term, Var as TermVar, VarStyle};
use crate::unify::{compare_lex, SubstitutionStore, Tag, TermOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatrixMode {
    /// Global matrix size `d` with an exactly-`d` constraint.
    Em,
    /// Per-clause multiplicities refined from unsat cores.
    Eu,
    /// As `Eu`, but ground clauses get at most one copy.
    Eh,
}

/// Which redundancy checks are active.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Symmetry {
    pub copy_order: bool,
    pub subsumption: bool,
    pub instance: bool,
    pub subst_order: bool,
}

impl Default for Symmetry {
    fn default() -> Symmetry {
        Symmetry { copy_order: true, subsumption: true, instance: true, subst_order: true }
    }
}

impl Symmetry {
    pub fn none() -> Symmetry {
        Symmetry { copy_order: false, subsumption: false, instance: false, subst_order: false }
    }
}

#[derive(Clone, Copy, Debug)]
enum Atom {
    Selector(CopyRef),
    Conn(LitRef, LitRef),
    /// `L` connects to some copy `m` or later of `clause`.
    Tail { from: LitRef, clause: usize, m: u32 },
}

/// Encoder and propagator for one solver instance.
pub struct MatrixEncoder<'p> {
    problem: &'p Problem,
    table: &'p ConnectionTable,
    mode: MatrixMode,
    sym: Symmetry,
    /// Matrix size (EM only).
    d: u32,
    /// Copy budgets (EU, EH).
    mu: Vec<u32>,
    rank: Vec<usize>,
    selectors: Vec<Vec<Var>>,
    expanded: HashSet<Var>,
    conns: HashMap<(LitRef, LitRef), Var>,
    conns_by_copy: HashMap<CopyRef, Vec<Var>>,
    tails: HashMap<(LitRef, usize, u32), Var>,
    atoms: HashMap<Var, Atom>,
    literals: HashMap<CopyRef, Vec<Literal>>,
    store: SubstitutionStore,
    trail: LevelTrail,
    active: HashSet<Var>,
    active_trail: Vec<(u32, Var)>,
    log: ConstraintLog,
}

impl<'p> MatrixEncoder<'p> {
    /// EM encoder for matrix size `d`: all `d` copies of every clause get a
    /// selector up front and exactly `d` of them must be true.
    pub fn em(problem: &'p Problem, table: &'p ConnectionTable, d: u32, sym: Symmetry, solver: &mut Solver) -> Self {
        let mut enc = MatrixEncoder::new(problem, table, MatrixMode::Em, sym, d, Vec::new());
        let mut all = Vec::new();
        for c in 0..problem.clauses.len() {
            for k in 1..=d {
                all.push(enc.selector(solver, c, k).pos());
            }
        }
        solver.add_exactly_k(&all, d as usize);
        enc
    }

    /// EU or EH encoder with initial budgets: one copy of each start clause.
    pub fn core(problem: &'p Problem, table: &'p ConnectionTable, mode: MatrixMode, sym: Symmetry) -> Self {
        let mu = (0..problem.clauses.len()).map(|c| u32::from(problem.is_start(c))).collect();
        MatrixEncoder::new(problem, table, mode, sym, 0, mu)
    }

    fn new(
        problem: &'p Problem,
        table: &'p ConnectionTable,
        mode: MatrixMode,
        sym: Symmetry,
        d: u32,
        mu: Vec<u32>,
    ) -> Self {
        let mut order: Vec<usize> = (0..problem.clauses.len()).collect();
        order.sort_by_key(|&c| (!problem.is_start(c), c));
        let mut rank = vec![0; problem.clauses.len()];
        for (r, &c) in order.iter().enumerate() {
            rank[c] = r;
        }
        MatrixEncoder {
            problem,
            table,
            mode,
            sym,
            d,
            mu,
            rank,
            selectors: vec![Vec::new(); problem.clauses.len()],
            expanded: HashSet::new(),
            conns: HashMap::new(),
            conns_by_copy: HashMap::new(),
            tails: HashMap::new(),
            atoms: HashMap::new(),
            literals: HashMap::new(),
            store: SubstitutionStore::new(),
            trail: LevelTrail::default(),
            active: HashSet::new(),
            active_trail: Vec::new(),
            log: ConstraintLog::default(),
        }
    }

    pub fn mode(&self) -> MatrixMode {
        self.mode
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.mu
    }

    pub fn set_multiplicity(&mut self, clause: usize, m: u32) {
        assert!(m >= self.mu[clause], "multiplicities never decrease");
        self.mu[clause] = m;
    }

    /// Highest copy index that may ever be selected, if bounded.
    fn cap(&self, clause: usize) -> Option<u32> {
        match self.mode {
            MatrixMode::Em => Some(self.d),
            MatrixMode::Eu => None,
            MatrixMode::Eh => self.problem.clauses[clause].is_ground().then_some(1),
        }
    }

    fn within_cap(&self, clause: usize, k: u32) -> bool {
        self.cap(clause).is_none_or(|c| k <= c)
    }

    /// Copies of `clause` offered directly as connection targets.
    fn direct_range(&self, clause: usize) -> u32 {
        match self.mode {
            MatrixMode::Em => self.d,
            _ => self.cap(clause).map_or(self.mu[clause], |c| c.min(self.mu[clause])),
        }
    }

    /// The assumption `¬S^{μ+1}` for every clause that has one.
    pub fn kappa(&mut self, solver: &mut Solver) -> Vec<(usize, Lit)> {
        let mut out = Vec::new();
        for c in 0..self.problem.clauses.len() {
            let next = self.mu[c] + 1;
            if self.within_cap(c, next) {
                out.push((c, self.selector(solver, c, next).neg()));
            }
        }
        out
    }

    /// Selector `S^k_C`, creating it and its lower copies on first use.
    pub fn selector(&mut self, solver: &mut Solver, clause: usize, k: u32) -> Var {
        assert!(k >= 1);
        while self.selectors[clause].len() < k as usize {
            let v = solver.new_var();
            let idx = self.selectors[clause].len() as u32 + 1;
            if self.sym.copy_order && idx >= 2 {
                let prev = self.selectors[clause][idx as usize - 2];
                solver.add_clause(&[v.neg(), prev.pos()]);
            }
            self.selectors[clause].push(v);
            self.atoms.insert(v, Atom::Selector(CopyRef { clause, copy: idx }));
        }
        self.selectors[clause][k as usize - 1]
    }

    fn existing_selector(&self, c: CopyRef) -> Option<Var> {
        self.selectors[c.clause].get(c.copy as usize - 1).copied()
    }

    fn conn(&mut self, solver: &mut Solver, a: LitRef, b: LitRef) -> Var {
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&v) = self.conns.get(&key) {
            return v;
        }
        let v = solver.new_var();
        self.conns.insert(key, v);
        self.atoms.insert(v, Atom::Conn(key.0, key.1));
        self.conns_by_copy.entry(a.copy).or_default().push(v);
        if b.copy != a.copy {
            self.conns_by_copy.entry(b.copy).or_default().push(v);
        }
        v
    }

    fn tail(&mut self, solver: &mut Solver, from: LitRef, clause: usize, m: u32) -> Var {
        if let Some(&v) = self.tails.get(&(from, clause, m)) {
            return v;
        }
        let v = solver.new_var();
        let s = self.selector(solver, clause, m);
        solver.add_clause(&[v.neg(), s.pos()]);
        self.tails.insert((from, clause, m), v);
        self.atoms.insert(v, Atom::Tail { from, clause, m });
        v
    }

    fn copy_literals(&mut self, c: CopyRef) -> &[Literal] {
        let problem = self.problem;
        self.literals
            .entry(c)
            .or_insert_with(|| problem.clauses[c.clause].literals.iter().map(|l| l.rename(c.copy)).collect())
    }

    fn literal(&mut self, r: LitRef) -> Literal {
        self.copy_literals(r.copy)[r.lit].clone()
    }

    /// Clauses with a partner of the literal, shortest first.
    fn targets(&self, clause: usize, lit: usize) -> Vec<usize> {
        let mut out = self.table.partner_clauses(clause, lit);
        out.sort_by_key(|&d| (self.problem.clauses[d].literals.len(), d));
        out
    }

    fn site(r: LitRef) -> Site {
        (r.copy.clause, r.lit)
    }

    /// Disjuncts `S^k_D ∧ ⟨L∼K⟩` for every partner `K` of `L` in copy `k` of `D`.
    fn connect_options(&mut self, solver: &mut Solver, from: LitRef, target: CopyRef, out: &mut Vec<Formula>) {
        if target == from.copy {
            return;
        }
        let partners: Vec<usize> = self
            .table
            .partners(from.copy.clause, from.lit)
            .iter()
            .filter(|s| s.0 == target.clause)
            .map(|s| s.1)
            .collect();
        if partners.is_empty() {
            return;
        }
        let s = self.selector(solver, target.clause, target.copy);
        for j in partners {
            let c = self.conn(solver, from, LitRef { copy: target, lit: j });
            out.push(Formula::and_lits([s.pos(), c.pos()]));
        }
    }

    /// Every literal of a newly selected copy must connect to another copy.
    /// Returns the indices of the recorded constraints. Idempotent.
    pub fn expand_selector(&mut self, solver: &mut Solver, c: CopyRef) -> Vec<usize> {
        let s = self.selector(solver, c.clause, c.copy);
        if !self.expanded.insert(s) {
            return Vec::new();
        }
        let width = self.problem.clauses[c.clause].literals.len();
        let mut out = Vec::new();
        for lit in 0..width {
            let from = LitRef { copy: c, lit };
            let mut options = Vec::new();
            for d in self.targets(c.clause, lit) {
                for k in 1..=self.direct_range(d) {
                    self.connect_options(solver, from, CopyRef { clause: d, copy: k }, &mut options);
                }
                if self.mode != MatrixMode::Em {
                    let next = self.mu[d] + 1;
                    if self.within_cap(d, next) {
                        let t = self.tail(solver, from, d, next);
                        options.push(Formula::Lit(t.pos()));
                    }
                }
            }
            out.push(self.log.propagate(solver, vec![s.pos()], options));
        }
        out
    }

    fn expand_tail(&mut self, solver: &mut Solver, t: Var) {
        if !self.expanded.insert(t) {
            return;
        }
        let Some(&Atom::Tail { from, clause, m }) = self.atoms.get(&t) else { return };
        let mut options = Vec::new();
        self.connect_options(solver, from, CopyRef { clause, copy: m }, &mut options);
        if self.within_cap(clause, m + 1) {
            let next = self.tail(solver, from, clause, m + 1);
            options.push(Formula::Lit(next.pos()));
        }
        self.log.propagate(solver, vec![t.pos()], options);
    }

    /// Assert the first selector of some start clause.
    pub fn assert_start(&mut self, solver: &mut Solver) {
        let options: Vec<Formula> =
            self.problem.start.clone().into_iter().map(|c| Formula::Lit(self.selector(solver, c, 1).pos())).collect();
        self.log.propagate(solver, Vec::new(), options);
    }

    /// Unify a connection once it and both of its copies are selected.
    fn try_activate(&mut self, solver: &mut Solver, conn: Var, level: u32) {
        if self.active.contains(&conn) || !self.trail.is_true(conn) {
            return;
        }
        let Some(&Atom::Conn(a, b)) = self.atoms.get(&conn) else { return };
        for c in [a.copy, b.copy] {
            match self.existing_selector(c) {
                Some(s) if self.trail.is_true(s) => {}
                _ => return,
            }
        }
        let la = self.literal(a);
        let lb = self.literal(b);
        self.trail.mark(level, &self.store);
        match self.store.assert_connection(&la, &lb, tag(conn)) {
            Ok(()) => {
                self.active.insert(conn);
                self.active_trail.push((level, conn));
            }
            Err(e) => solver.add_clause(&conflict_clause(&e)),
        }
    }

    fn on_true(&mut self, solver: &mut Solver, v: Var, level: u32) {
        match self.atoms.get(&v).copied() {
            Some(Atom::Selector(c)) => {
                self.expand_selector(solver, c);
                let conns = self.conns_by_copy.get(&c).cloned().unwrap_or_default();
                for conn in conns {
                    self.try_activate(solver, conn, level);
                }
            }
            Some(Atom::Conn(..)) => self.try_activate(solver, v, level),
            Some(Atom::Tail { .. }) => self.expand_tail(solver, v),
            None => {}
        }
    }

    fn selected(&self) -> Vec<CopyRef> {
        let mut out = Vec::new();
        for (clause, sels) in self.selectors.iter().enumerate() {
            for (i, &s) in sels.iter().enumerate() {
                if self.trail.is_true(s) {
                    out.push(CopyRef { clause, copy: i as u32 + 1 });
                }
            }
        }
        out
    }

    /// Run the redundancy checks and the spanning check on the current
    /// complete assignment. Returns true when the matrix is accepted.
    fn final_check(&mut self, solver: &mut Solver) -> bool {
        let selected = self.selected();
        let mut resolved: Vec<Vec<(Literal, Vec<Tag>)>> = Vec::new();
        for &c in &selected {
            let lits = self.copy_literals(c).to_vec();
            resolved.push(
                lits.iter()
                    .map(|l| {
                        let mut deps = Vec::new();
                        let r = self.store.resolve_literal_with_deps(l, &mut deps);
                        (r, deps)
                    })
                    .collect(),
            );
        }
        let sel_lit = |enc: &Self, c: CopyRef| enc.existing_selector(c).expect("selected copy has a selector");
        let deps_of = |lits: &[(Literal, Vec<Tag>)]| -> Vec<Tag> {
            let mut d: Vec<Tag> = lits.iter().flat_map(|(_, d)| d.iter().copied()).collect();
            d.sort_unstable();
            d.dedup();
            d
        };
        let blocking = |sels: &[Var], deps: &[Tag], extra: &[Lit]| -> Vec<Lit> {
            let mut cl: Vec<Lit> = sels.iter().map(|s| s.neg()).collect();
            cl.extend(deps.iter().map(|&t| Var(t).neg()));
            cl.extend_from_slice(extra);
            cl
        };

        // copies that became tautologies under σ
        let mut clauses = Vec::new();
        for (i, c) in selected.iter().enumerate() {
            let lits = &resolved[i];
            for a in 0..lits.len() {
                for b in a + 1..lits.len() {
                    if is_dual(&lits[a].0, &lits[b].0) {
                        let mut deps: Vec<Tag> = lits[a].1.iter().chain(&lits[b].1).copied().collect();
                        deps.sort_unstable();
                        deps.dedup();
                        clauses.push(blocking(&[sel_lit(self, *c)], &deps, &[]));
                    }
                }
            }
        }
        if self.add_all(solver, clauses) {
            return false;
        }

        if self.sym.subsumption {
            let mut clauses = Vec::new();
            for i in 0..selected.len() {
                for j in 0..selected.len() {
                    if i != j && (i < j || !multiset_subset(&resolved[j], &resolved[i])) && multiset_subset(&resolved[i], &resolved[j]) {
                        let mut deps = deps_of(&resolved[i]);
                        deps.extend(deps_of(&resolved[j]));
                        deps.sort_unstable();
                        deps.dedup();
                        clauses.push(blocking(&[sel_lit(self, selected[i]), sel_lit(self, selected[j])], &deps, &[]));
                    }
                }
            }
            if self.add_all(solver, clauses) {
                return false;
            }
        }

        if self.sym.instance {
            let mut clauses = Vec::new();
            for (j, &dj) in selected.iter().enumerate() {
                let target: Vec<Literal> = resolved[j].iter().map(|(l, _)| l.clone()).collect();
                for c in 0..self.problem.clauses.len() {
                    if self.rank[c] >= self.rank[dj.clause] {
                        continue;
                    }
                    let base = &self.problem.clauses[c];
                    if base.literals.len() != target.len() || !instance_of(&base.literals, &target) {
                        continue;
                    }
                    let deps = deps_of(&resolved[j]);
                    let taken: HashSet<u32> = selected.iter().filter(|s| s.clause == c).map(|s| s.copy).collect();
                    let mut extra = Vec::new();
                    if !(base.is_ground() && taken.contains(&1)) {
                        let k = (1..).find(|k| !taken.contains(k)).unwrap();
                        let cap = match self.mode {
                            MatrixMode::Em => self.d,
                            _ => self.cap(c).map_or(self.mu[c] + 1, |cap| cap.min(self.mu[c] + 1)),
                        };
                        if k <= cap {
                            extra.push(self.selector(solver, c, k).pos());
                        }
                    }
                    clauses.push(blocking(&[sel_lit(self, dj)], &deps, &extra));
                    break;
                }
            }
            if self.add_all(solver, clauses) {
                return false;
            }
        }

        if self.sym.subst_order {
            let mut clauses = Vec::new();
            for i in 0..selected.len() {
                for j in i + 1..selected.len() {
                    let (ci, cj) = (selected[i], selected[j]);
                    if ci.clause != cj.clause || self.problem.clauses[ci.clause].is_ground() {
                        continue;
                    }
                    let mut deps = Vec::new();
                    let xi: Vec<Term> = self.problem.clauses[ci.clause]
                        .var_vector(ci.copy)
                        .into_iter()
                        .map(|v| self.store.resolve_with_deps(&Term::Var(v), &mut deps))
                        .collect();
                    let xj: Vec<Term> = self.problem.clauses[cj.clause]
                        .var_vector(cj.copy)
                        .into_iter()
                        .map(|v| self.store.resolve_with_deps(&Term::Var(v), &mut deps))
                        .collect();
                    if compare_lex(&xi, &xj) == TermOrder::Greater {
                        deps.sort_unstable();
                        deps.dedup();
                        clauses.push(blocking(&[sel_lit(self, ci), sel_lit(self, cj)], &deps, &[]));
                    }
                }
            }
            if self.add_all(solver, clauses) {
                return false;
            }
        }

        let lits: Vec<Vec<Literal>> = resolved.iter().map(|c| c.iter().map(|(l, _)| l.clone()).collect()).collect();
        let Some(path) = find_open_path(&lits, &SubstitutionStore::new()) else { return true };
        let path: Vec<LitRef> = path.iter().enumerate().map(|(i, &l)| LitRef { copy: selected[i], lit: l }).collect();
        self.block_path(solver, &selected, &path);
        false
    }

    fn add_all(&mut self, solver: &mut Solver, clauses: Vec<Vec<Lit>>) -> bool {
        let any = !clauses.is_empty();
        for c in clauses {
            solver.add_clause(&c);
        }
        any
    }

    /// Require the open path to be closed, or (EU, EH) one of its literals
    /// to connect to a copy that is not selected yet.
    pub fn block_path(&mut self, solver: &mut Solver, selected: &[CopyRef], path: &[LitRef]) -> usize {
        let antecedents: Vec<Lit> = selected.iter().map(|&c| self.existing_selector(c).unwrap().pos()).collect();
        let mut options = Vec::new();
        for (i, &a) in path.iter().enumerate() {
            for &b in &path[i + 1..] {
                if self.table.connects(Self::site(a), Self::site(b)) {
                    options.push(Formula::Lit(self.conn(solver, a, b).pos()));
                }
            }
        }
        if self.mode != MatrixMode::Em {
            let taken: HashSet<CopyRef> = selected.iter().copied().collect();
            for &l in path {
                for d in self.targets(l.copy.clause, l.lit) {
                    for k in 1..=self.direct_range(d) {
                        let target = CopyRef { clause: d, copy: k };
                        if !taken.contains(&target) {
                            self.connect_options(solver, l, target, &mut options);
                        }
                    }
                    let next = self.mu[d] + 1;
                    if self.within_cap(d, next) {
                        let t = self.tail(solver, l, d, next);
                        options.push(Formula::Lit(t.pos()));
                    }
                }
            }
        }
        self.log.propagate(solver, antecedents, options)
    }

    /// Disjuncts of a recorded constraint, rendered with `X^k` variables.
    pub fn describe_constraint(&self, idx: usize) -> Vec<String> {
        let name = |v: Var| self.describe_var(v);
        self.log.constraints[idx].formulas.iter().map(|f| describe(f, &name)).collect()
    }

    pub fn describe_var(&self, v: Var) -> String {
        let fmt = self.problem.fmt().with_style(VarStyle::Superscript);
        let lit = |r: LitRef| fmt.literal(&self.problem.clauses[r.copy.clause].literals[r.lit].rename(r.copy.copy));
        match self.atoms.get(&v) {
            Some(Atom::Selector(c)) => format!("S^{}_{}", c.copy, self.problem.clauses[c.clause].name),
            Some(Atom::Tail { clause, m, .. }) => format!("S^{}_{}", m, self.problem.clauses[*clause].name),
            Some(Atom::Conn(a, b)) => format!("<{} ~ {}>", lit(*a), lit(*b)),
            None => format!("v{}", v.0),
        }
    }

    /// Decode the matrix proof from an accepted model.
    pub fn extract(&self, model: &Model) -> Proof {
        let mut copies = Vec::new();
        for (clause, sels) in self.selectors.iter().enumerate() {
            for (i, &s) in sels.iter().enumerate() {
                if model.value(s.pos()) {
                    copies.push(CopyRef { clause, copy: i as u32 + 1 });
                }
            }
        }
        let chosen: HashSet<CopyRef> = copies.iter().copied().collect();
        let lit = |r: LitRef| self.problem.clauses[r.copy.clause].literals[r.lit].rename(r.copy.copy);
        let mut active: Vec<(LitRef, LitRef)> = self
            .conns
            .iter()
            .filter(|(k, v)| model.value(v.pos()) && chosen.contains(&k.0.copy) && chosen.contains(&k.1.copy))
            .map(|(k, _)| *k)
            .collect();
        active.sort_unstable();
        let mut store = SubstitutionStore::new();
        for (a, b) in &active {
            store.assert_connection(&lit(*a), &lit(*b), 0).expect("active connections are consistent");
        }
        let mut vars: Vec<TermVar> = Vec::new();
        for c in &copies {
            vars.extend(self.problem.clauses[c.clause].var_vector(c.copy));
        }
        let mut connections = Vec::new();
        for (i, &a) in copies.iter().enumerate() {
            for &b in &copies[i + 1..] {
                for x in 0..self.problem.clauses[a.clause].literals.len() {
                    for y in 0..self.problem.clauses[b.clause].literals.len() {
                        let (ra, rb) = (LitRef { copy: a, lit: x }, LitRef { copy: b, lit: y });
                        if store.are_dual_under(&lit(ra), &lit(rb)) {
                            connections.push(Connection::new(ra, rb));
                        }
                    }
                }
            }
        }
        let mut proof = Proof { copies, substitution: resolved_substitution(&store, vars), connections, tree: None };
        proof.normalize();
        proof
    }
}

fn is_dual(a: &Literal, b: &Literal) -> bool {
    a.positive != b.positive && a.pred == b.pred && a.args == b.args
}

/// Whether the literals of `a` form a sub-multiset of those of `b`.
fn multiset_subset(a: &[(Literal, Vec<Tag>)], b: &[(Literal, Vec<Tag>)]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    'outer: for (l, _) in a {
        for (i, (k, _)) in b.iter().enumerate() {
            if !used[i] && k == l {
                used[i] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Whether some substitution for the variables of `pattern` maps its
/// literals one-to-one onto `target`. Variables of `target` are constants.
pub fn instance_of(pattern: &[Literal], target: &[Literal]) -> bool {
    fn match_term(p: &Term, t: &Term, rho: &mut HashMap<TermVar, Term>, bound: &mut Vec<TermVar>) -> bool {
        match (p, t) {
            (Term::Var(v), _) => match rho.get(v) {
                Some(s) => s == t,
                None => {
                    rho.insert(*v, t.clone());
                    bound.push(*v);
                    true
                }
            },
            (Term::App(f, fa), Term::App(g, ga)) => {
                f == g && fa.len() == ga.len() && fa.iter().zip(ga.iter()).all(|(x, y)| match_term(x, y, rho, bound))
            }
            _ => false,
        }
    }
    fn go(pattern: &[Literal], target: &[Literal], used: &mut [bool], rho: &mut HashMap<TermVar, Term>) -> bool {
        let Some((l, rest)) = pattern.split_first() else { return true };
        for i in 0..target.len() {
            let k = &target[i];
            if used[i] || k.positive != l.positive || k.pred != l.pred {
                continue;
            }
            let mut bound = Vec::new();
            let ok = l.args.iter().zip(k.args.iter()).all(|(x, y)| match_term(x, y, rho, &mut bound));
            if ok {
                used[i] = true;
                if go(rest, target, used, rho) {
                    return true;
                }
                used[i] = false;
            }
            for v in bound {
                rho.remove(&v);
            }
        }
        false
    }
    pattern.len() == target.len() && go(pattern, target, &mut vec![false; target.len()], &mut HashMap::new())
}

/// A choice of one literal per copy with no two of them complementary
/// under `store`, as literal indices. `None` when every path is closed.
pub fn find_open_path(copies: &[Vec<Literal>], store: &SubstitutionStore) -> Option<Vec<usize>> {
    fn go(copies: &[Vec<Literal>], store: &SubstitutionStore, chosen: &mut Vec<usize>) -> bool {
        let i = chosen.len();
        if i == copies.len() {
            return true;
        }
        for (li, l) in copies[i].iter().enumerate() {
            if chosen.iter().enumerate().any(|(j, &lj)| store.are_dual_under(&copies[j][lj], l)) {
                continue;
            }
            chosen.push(li);
            if go(copies, store, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::new();
    go(copies, store, &mut chosen).then_some(chosen)
}

impl Propagator for MatrixEncoder<'_> {
    fn on_assign(&mut self, ctx: &mut SolverCtx<'_>, lit: Lit, level: u32) {
        if !lit.is_positive() {
            return;
        }
        self.trail.assign(level, lit.var());
        self.on_true(ctx, lit.var(), level);
    }

    fn on_backtrack(&mut self, level: u32) {
        while let Some(&(l, v)) = self.active_trail.last() {
            if l <= level {
                break;
            }
            self.active_trail.pop();
            self.active.remove(&v);
        }
        self.trail.backtrack(level, &mut self.store);
    }

    fn on_decide(&mut self, solver: &Solver) -> Option<Lit> {
        self.log.relevant_decision(solver)
    }

    fn on_final(&mut self, ctx: &mut SolverCtx<'_>) -> FinalCheck {
        if self.final_check(ctx) {
            FinalCheck::Accept
        } else {
            FinalCheck::Reject
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatrixOutcome {
    Proof(Proof),
    /// An unsat core without budget assumptions: no proof of any size.
    NoProof,
    /// EM found nothing up to the given size.
    Exhausted(usize),
    /// The summed budgets of EU or EH exceeded the size limit.
    GaveUp,
    Timeout,
}

#[derive(Clone, Copy, Debug)]
pub struct MatrixOptions {
    pub mode: MatrixMode,
    /// EM: largest matrix size tried. EU, EH: limit on the summed budgets.
    pub max_size: usize,
    pub symmetry: Symmetry,
    pub deadline: Option<Instant>,
}

pub fn prove_matrix(problem: &Problem, opts: &MatrixOptions, stats: &mut SearchStats) -> MatrixOutcome {
    let table = ConnectionTable::new(problem);
    match opts.mode {
        MatrixMode::Em => prove_em(problem, &table, opts, stats),
        _ => prove_core(problem, &table, opts, stats),
    }
}

fn prove_em(problem: &Problem, table: &ConnectionTable, opts: &MatrixOptions, stats: &mut SearchStats) -> MatrixOutcome {
    for d in 1..=opts.max_size {
        if opts.deadline.is_some_and(|t| Instant::now() >= t) {
            return MatrixOutcome::Timeout;
        }
        stats.steps += 1;
        let mut solver = Solver::new();
        solver.set_deadline(opts.deadline);
        let mut enc = MatrixEncoder::em(problem, table, d as u32, opts.symmetry, &mut solver);
        enc.assert_start(&mut solver);
        let result = solver.solve_with(&[], &mut enc);
        stats.absorb(solver.stats());
        match result {
            SolveResult::Sat(model) => return MatrixOutcome::Proof(enc.extract(&model)),
            SolveResult::Unsat(_) => {}
            SolveResult::Interrupted => return MatrixOutcome::Timeout,
        }
    }
    MatrixOutcome::Exhausted(opts.max_size)
}

fn prove_core(problem: &Problem, table: &ConnectionTable, opts: &MatrixOptions, stats: &mut SearchStats) -> MatrixOutcome {
    let mut solver = Solver::new();
    solver.set_deadline(opts.deadline);
    let mut enc = MatrixEncoder::core(problem, table, opts.mode, opts.symmetry);
    enc.assert_start(&mut solver);
    let outcome = loop {
        stats.steps += 1;
        let kappa = enc.kappa(&mut solver);
        let assumptions: Vec<Lit> = kappa.iter().map(|(_, l)| *l).collect();
        match solver.solve_with(&assumptions, &mut enc) {
            SolveResult::Sat(model) => break MatrixOutcome::Proof(enc.extract(&model)),
            SolveResult::Interrupted => break MatrixOutcome::Timeout,
            SolveResult::Unsat(core) => {
                let in_core: Vec<usize> = kappa.iter().filter(|(_, l)| core.contains(l)).map(|(c, _)| *c).collect();
                stats.cores.push(in_core.clone());
                if in_core.is_empty() {
                    break MatrixOutcome::NoProof;
                }
                for c in in_core {
                    let m = enc.multiplicities()[c] + 1;
                    enc.set_multiplicity(c, m);
                }
                let total: u64 = enc.multiplicities().iter().map(|&m| m as u64).sum();
                if total > opts.max_size as u64 {
                    break MatrixOutcome::GaveUp;
                }
            }
        }
    };
    stats.absorb(solver.stats());
    stats.multiplicities = enc.multiplicities().iter().map(|&m| m as usize).collect();
    outcome
}
