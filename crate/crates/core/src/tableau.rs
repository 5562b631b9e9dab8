//! Connection tableaux as SAT: one variable per (literal, path) node,
//! extension and reduction options propagated lazily, iterative deepening
//! on the path length.

use std::collections::HashMap;
use std::time::Instant;

use connsat_sat::{FinalCheck, Formula, Lit, Model, Propagator, SolveResult, Solver, SolverCtx, Var};

use crate::encoding::{conflict_clause, describe, tag, ConstraintLog, LevelTrail, SearchStats};
use crate::problem::{make_copy, ConnectionTable};
use crate::proof::{Closure, Connection, CopyRef, LitRef, Proof, TreeNode};
use crate::term::{Literal, Problem, VarStyle};
use crate::unify::SubstitutionStore;

pub type NodeId = usize;
type CopyId = usize;

#[derive(Clone, Debug)]
struct TCopy {
    clause: usize,
    k: u32,
    parent: Option<NodeId>,
    literals: Vec<Literal>,
    nodes: Vec<Option<NodeId>>,
}

#[derive(Clone, Copy, Debug)]
enum Step {
    Extension { copy: CopyId, entry: usize, conn: Var },
    Reduction { target: NodeId, conn: Var },
}

#[derive(Clone, Debug)]
struct Node {
    copy: CopyId,
    lit: usize,
    var: Var,
    depth: usize,
    steps: Option<Vec<Step>>,
}

#[derive(Clone, Copy, Debug)]
enum Atom {
    Node(NodeId),
    Conn(LitRef, LitRef),
}

/// The encoder for one path limit. It is also the propagator for that
/// solver instance.
pub struct TableauEncoder<'p> {
    problem: &'p Problem,
    table: &'p ConnectionTable,
    limit: usize,
    regularity: bool,
    copies: Vec<TCopy>,
    copy_index: HashMap<(Option<NodeId>, usize), CopyId>,
    counters: Vec<u32>,
    nodes: Vec<Node>,
    conns: HashMap<(LitRef, LitRef), Var>,
    atoms: HashMap<Var, Atom>,
    store: SubstitutionStore,
    trail: LevelTrail,
    log: ConstraintLog,
}

impl<'p> TableauEncoder<'p> {
    pub fn new(problem: &'p Problem, table: &'p ConnectionTable, limit: usize, regularity: bool) -> Self {
        TableauEncoder {
            problem,
            table,
            limit,
            regularity,
            copies: Vec::new(),
            copy_index: HashMap::new(),
            counters: vec![0; problem.clauses.len()],
            nodes: Vec::new(),
            conns: HashMap::new(),
            atoms: HashMap::new(),
            store: SubstitutionStore::new(),
            trail: LevelTrail::default(),
            log: ConstraintLog::default(),
        }
    }

    fn copy_for(&mut self, parent: Option<NodeId>, clause: usize) -> CopyId {
        if let Some(&c) = self.copy_index.get(&(parent, clause)) {
            return c;
        }
        self.counters[clause] += 1;
        let k = self.counters[clause];
        let cc = make_copy(&self.problem.clauses[clause], k);
        let id = self.copies.len();
        self.copies.push(TCopy { clause, k, parent, nodes: vec![None; cc.literals.len()], literals: cc.literals });
        self.copy_index.insert((parent, clause), id);
        id
    }

    fn node(&mut self, solver: &mut Solver, copy: CopyId, lit: usize) -> NodeId {
        if let Some(n) = self.copies[copy].nodes[lit] {
            return n;
        }
        let depth = match self.copies[copy].parent {
            None => 0,
            Some(p) => self.nodes[p].depth + 1,
        };
        let var = solver.new_var();
        let id = self.nodes.len();
        self.nodes.push(Node { copy, lit, var, depth, steps: None });
        self.copies[copy].nodes[lit] = Some(id);
        self.atoms.insert(var, Atom::Node(id));
        id
    }

    fn lit_ref(&self, copy: CopyId, lit: usize) -> LitRef {
        let c = &self.copies[copy];
        LitRef::new(c.clause, c.k, lit)
    }

    fn conn(&mut self, solver: &mut Solver, a: LitRef, b: LitRef) -> Var {
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&v) = self.conns.get(&key) {
            return v;
        }
        let v = solver.new_var();
        self.conns.insert(key, v);
        self.atoms.insert(v, Atom::Conn(key.0, key.1));
        v
    }

    fn literal_of(&self, r: LitRef) -> Literal {
        self.problem.clauses[r.copy.clause].literals[r.lit].rename(r.copy.copy)
    }

    /// Nodes on the path above `n`, root first.
    fn path(&self, n: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = self.copies[self.nodes[n].copy].parent;
        while let Some(p) = cur {
            out.push(p);
            cur = self.copies[self.nodes[p].copy].parent;
        }
        out.reverse();
        out
    }

    /// One of the start clauses must be the root, with all of its literals
    /// in the tableau.
    pub fn assert_start(&mut self, solver: &mut Solver) {
        let mut options = Vec::new();
        for &c in &self.problem.start {
            let copy = self.copy_for(None, c);
            let lits: Vec<Lit> =
                (0..self.copies[copy].literals.len()).map(|i| self.nodes_var(solver, copy, i)).collect();
            options.push(Formula::and_lits(lits));
        }
        self.log.propagate(solver, Vec::new(), options);
    }

    fn nodes_var(&mut self, solver: &mut Solver, copy: CopyId, lit: usize) -> Lit {
        let n = self.node(solver, copy, lit);
        self.nodes[n].var.pos()
    }

    /// Root node of `clause` for literal `lit`, if the root copy exists.
    pub fn root_node(&self, clause: usize, lit: usize) -> Option<NodeId> {
        let c = *self.copy_index.get(&(None, clause))?;
        self.copies[c].nodes[lit]
    }

    /// Node for literal `lit` of the copy of `clause` attached below `parent`.
    pub fn child_node(&self, parent: NodeId, clause: usize, lit: usize) -> Option<NodeId> {
        let c = *self.copy_index.get(&(Some(parent), clause))?;
        self.copies[c].nodes[lit]
    }

    pub fn node_var(&self, n: NodeId) -> Var {
        self.nodes[n].var
    }

    /// Propagate the extension and reduction options of node `n`. Returns
    /// the index of the recorded constraint. Idempotent.
    pub fn expand(&mut self, solver: &mut Solver, n: NodeId) -> Option<usize> {
        if self.nodes[n].steps.is_some() {
            return None;
        }
        let copy = self.nodes[n].copy;
        let lit = self.nodes[n].lit;
        let clause = self.copies[copy].clause;
        let me = self.lit_ref(copy, lit);
        let mut steps = Vec::new();
        let mut options = Vec::new();

        if self.nodes[n].depth < self.limit {
            let mut targets: Vec<usize> = self.table.partner_clauses(clause, lit);
            targets.sort_by_key(|&d| (self.problem.clauses[d].literals.len(), d));
            for d in targets {
                let partners: Vec<usize> =
                    self.table.partners(clause, lit).iter().filter(|s| s.0 == d).map(|s| s.1).collect();
                let child = self.copy_for(Some(n), d);
                for j in partners {
                    let k_ref = self.lit_ref(child, j);
                    let conn = self.conn(solver, me, k_ref);
                    let mut conj = Vec::new();
                    for i in 0..self.copies[child].literals.len() {
                        if i != j {
                            conj.push(Formula::Lit(self.nodes_var(solver, child, i)));
                        }
                    }
                    conj.push(Formula::Lit(conn.pos()));
                    options.push(if conj.len() == 1 { conj.pop().unwrap() } else { Formula::And(conj) });
                    steps.push(Step::Extension { copy: child, entry: j, conn });
                }
            }
        }
        for a in self.path(n) {
            let a_site = (self.copies[self.nodes[a].copy].clause, self.nodes[a].lit);
            if self.table.connects((clause, lit), a_site) {
                let a_ref = self.lit_ref(self.nodes[a].copy, self.nodes[a].lit);
                let conn = self.conn(solver, me, a_ref);
                options.push(Formula::Lit(conn.pos()));
                steps.push(Step::Reduction { target: a, conn });
            }
        }
        self.nodes[n].steps = Some(steps);
        Some(self.log.propagate(solver, vec![self.nodes[n].var.pos()], options))
    }

    /// Disjuncts of a recorded constraint, rendered with `X^k` variables.
    pub fn describe_constraint(&self, idx: usize) -> Vec<String> {
        let name = |v: Var| self.describe_var(v);
        self.log.constraints[idx].formulas.iter().map(|f| describe(f, &name)).collect()
    }

    pub fn describe_var(&self, v: Var) -> String {
        let fmt = self.problem.fmt().with_style(VarStyle::Superscript);
        match self.atoms.get(&v) {
            Some(Atom::Node(n)) => {
                let node = &self.nodes[*n];
                let path: Vec<String> = self
                    .path(*n)
                    .into_iter()
                    .map(|a| fmt.literal(&self.copies[self.nodes[a].copy].literals[self.nodes[a].lit]))
                    .collect();
                format!("<{}; {{{}}}>", fmt.literal(&self.copies[node.copy].literals[node.lit]), path.join(", "))
            }
            Some(Atom::Conn(a, b)) => {
                format!("<{} ~ {}>", fmt.literal(&self.literal_of(*a)), fmt.literal(&self.literal_of(*b)))
            }
            None => format!("v{}", v.0),
        }
    }

    fn on_true(&mut self, solver: &mut Solver, v: Var, level: u32) {
        match self.atoms.get(&v).copied() {
            Some(Atom::Node(n)) => {
                if self.regularity {
                    self.assert_regular(solver, n, level);
                }
                self.expand(solver, n);
            }
            Some(Atom::Conn(a, b)) => {
                let la = self.literal_of(a);
                let lb = self.literal_of(b);
                self.trail.mark(level, &self.store);
                if let Err(e) = self.store.assert_connection(&la, &lb, tag(v)) {
                    solver.add_clause(&conflict_clause(&e));
                }
            }
            None => {}
        }
    }

    fn assert_regular(&mut self, solver: &mut Solver, n: NodeId, level: u32) {
        let l = self.copies[self.nodes[n].copy].literals[self.nodes[n].lit].clone();
        for a in self.path(n) {
            let k = self.copies[self.nodes[a].copy].literals[self.nodes[a].lit].clone();
            if k.positive != l.positive || k.pred != l.pred {
                continue;
            }
            self.trail.mark(level, &self.store);
            if let Err(e) = self.store.assert_disequality_args(&l.args, &k.args, Some(tag(self.nodes[n].var))) {
                solver.add_clause(&conflict_clause(&e));
                return;
            }
        }
    }

    /// Read the closed tableau off a model.
    pub fn extract(&self, model: &Model) -> Option<Proof> {
        let root = self.problem.start.iter().find_map(|&c| {
            let copy = *self.copy_index.get(&(None, c))?;
            let all = self.copies[copy].nodes.iter().all(|n| n.is_some_and(|n| model.value(self.nodes[n].var.pos())));
            all.then_some(copy)
        })?;
        let mut conns = Vec::new();
        let tree = self.build(model, root, None, &mut conns)?;
        let mut store = SubstitutionStore::new();
        for c in &conns {
            store.assert_connection(&self.literal_of(c.a), &self.literal_of(c.b), 0).ok()?;
        }
        let mut copies = Vec::new();
        let mut vars = Vec::new();
        collect(&tree, &mut copies);
        for c in &copies {
            vars.extend(self.problem.clauses[c.clause].var_vector(c.copy));
        }
        let mut proof = Proof {
            copies,
            substitution: crate::proof::resolved_substitution(&store, vars),
            connections: conns,
            tree: Some(tree),
        };
        proof.normalize();
        Some(proof)
    }

    fn build(&self, model: &Model, copy: CopyId, entry: Option<usize>, conns: &mut Vec<Connection>) -> Option<TreeNode> {
        let c = &self.copies[copy];
        let mut closures = Vec::new();
        for i in 0..c.literals.len() {
            if Some(i) == entry {
                closures.push(Closure::Entry);
                continue;
            }
            let n = c.nodes[i]?;
            let me = self.lit_ref(copy, i);
            let steps = self.nodes[n].steps.as_ref()?;
            let chosen = steps.iter().find(|s| match **s {
                Step::Extension { copy: child, entry: j, conn } => {
                    model.value(conn.pos())
                        && self.copies[child]
                            .nodes
                            .iter()
                            .enumerate()
                            .all(|(i, m)| i == j || m.is_some_and(|m| model.value(self.nodes[m].var.pos())))
                }
                Step::Reduction { conn, .. } => model.value(conn.pos()),
            })?;
            match *chosen {
                Step::Extension { copy: child, entry: j, .. } => {
                    conns.push(Connection::new(me, self.lit_ref(child, j)));
                    closures.push(Closure::Extension(self.build(model, child, Some(j), conns)?));
                }
                Step::Reduction { target, .. } => {
                    let t = self.lit_ref(self.nodes[target].copy, self.nodes[target].lit);
                    conns.push(Connection::new(me, t));
                    closures.push(Closure::Reduction(t));
                }
            }
        }
        Some(TreeNode { copy: CopyRef { clause: c.clause, copy: c.k }, entry, closures })
    }
}

fn collect(n: &TreeNode, out: &mut Vec<CopyRef>) {
    out.push(n.copy);
    for c in &n.closures {
        if let Closure::Extension(child) = c {
            collect(child, out);
        }
    }
}

impl Propagator for TableauEncoder<'_> {
    fn on_assign(&mut self, ctx: &mut SolverCtx<'_>, lit: Lit, level: u32) {
        if !lit.is_positive() {
            return;
        }
        self.trail.assign(level, lit.var());
        self.on_true(ctx, lit.var(), level);
    }

    fn on_backtrack(&mut self, level: u32) {
        self.trail.backtrack(level, &mut self.store);
    }

    fn on_decide(&mut self, solver: &Solver) -> Option<Lit> {
        self.log.relevant_decision(solver)
    }

    fn on_final(&mut self, _ctx: &mut SolverCtx<'_>) -> FinalCheck {
        FinalCheck::Accept
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableauOutcome {
    Proof(Proof),
    /// Every limit of the schedule failed; carries the last one.
    Exhausted(usize),
    Timeout,
}

/// Iterative deepening over `limits`, one fresh solver per limit.
pub fn prove_tableau(
    problem: &Problem,
    limits: &[usize],
    regularity: bool,
    deadline: Option<Instant>,
    stats: &mut SearchStats,
) -> TableauOutcome {
    let table = ConnectionTable::new(problem);
    for &limit in limits {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return TableauOutcome::Timeout;
        }
        stats.steps += 1;
        let mut solver = Solver::new();
        solver.set_deadline(deadline);
        let mut enc = TableauEncoder::new(problem, &table, limit, regularity);
        enc.assert_start(&mut solver);
        let result = solver.solve_with(&[], &mut enc);
        stats.absorb(solver.stats());
        match result {
            SolveResult::Sat(model) => match enc.extract(&model) {
                Some(proof) => return TableauOutcome::Proof(proof),
                None => panic!("accepted model does not describe a closed tableau"),
            },
            SolveResult::Unsat(_) => {}
            SolveResult::Interrupted => return TableauOutcome::Timeout,
        }
    }
    TableauOutcome::Exhausted(limits.last().copied().unwrap_or(0))
}
