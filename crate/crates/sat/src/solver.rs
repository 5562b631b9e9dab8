//! Conflict-driven clause learning with two watched literals, first-UIP
//! learning, Luby restarts, VSIDS branching, solving under assumptions and
//! user propagation.

use std::collections::HashMap;
use std::mem;
use std::time::Instant;

use crate::formula::Formula;
use crate::heap::VarHeap;
use crate::lit::{LBool, Lit, Var};
use crate::propagator::{FinalCheck, NoPropagator, Propagator, SolverCtx};

type CRef = u32;

#[derive(Debug, Clone)]
struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: CRef,
    blocker: Lit,
}

/// Assignment of every variable, as returned with a satisfiable verdict.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn value(&self, lit: Lit) -> bool {
        self.values[lit.var().index()] == lit.is_positive()
    }

    pub fn var_value(&self, var: Var) -> bool {
        self.values[var.index()]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn satisfies(&self, clause: &[Lit]) -> bool {
        clause.iter().any(|&l| self.value(l))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Model),
    /// The assumption literals that were used to derive the conflict.
    Unsat(Vec<Lit>),
    /// Deadline or conflict budget reached.
    Interrupted,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveResult::Unsat(_))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learnt_clauses: u64,
    pub injected_clauses: u64,
    pub final_checks: u64,
    pub solves: u64,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub restart_unit: u64,
    pub var_decay: f64,
    pub clause_decay: f64,
    /// Remember the last value of unassigned variables as their next phase.
    pub phase_saving: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { restart_unit: 100, var_decay: 0.95, clause_decay: 0.999, phase_saving: false }
    }
}

#[derive(Debug, Clone)]
pub struct Solver {
    config: SolverConfig,
    clauses: Vec<ClauseData>,
    learnts: Vec<CRef>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<Option<CRef>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    notified: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    in_search: bool,
    pending: Vec<Vec<Lit>>,
    definitions: HashMap<(bool, Vec<Lit>), Lit>,
    constant_true: Option<Lit>,
    max_learnts: f64,
    deadline: Option<Instant>,
    conflict_budget: Option<u64>,
    stats: SolverStats,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

/// Luby sequence value for index `i` (0-based): 1 1 2 1 1 2 4 ...
pub fn luby(mut i: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1u64 << seq
}

impl Solver {
    pub fn new() -> Solver {
        Solver::with_config(SolverConfig::default())
    }

    pub fn with_config(config: SolverConfig) -> Solver {
        Solver {
            config,
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            notified: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            phase: Vec::new(),
            seen: Vec::new(),
            ok: true,
            in_search: false,
            pending: Vec::new(),
            definitions: HashMap::new(),
            constant_true: None,
            max_learnts: 2000.0,
            deadline: None,
            conflict_budget: None,
            stats: SolverStats::default(),
        }
    }

    // ----- public surface -------------------------------------------------

    pub fn new_var(&mut self) -> Var {
        let v = Var(self.assigns.len() as u32);
        self.assigns.push(LBool::Undef);
        self.level.push(0);
        self.reason.push(None);
        self.activity.push(0.0);
        self.phase.push(false);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.insert(v, &self.activity);
        v
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    /// Number of non-learnt clauses of length at least two.
    pub fn num_clauses(&self) -> usize {
        self.clauses.iter().filter(|c| !c.learnt && !c.deleted).count()
    }

    pub fn stats(&self) -> &SolverStats {
        &self.stats
    }

    pub fn is_ok(&self) -> bool {
        self.ok
    }

    pub fn set_phase(&mut self, var: Var, phase: bool) {
        self.phase[var.index()] = phase;
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    pub fn set_conflict_budget(&mut self, budget: Option<u64>) {
        self.conflict_budget = budget;
    }

    /// Current value of `lit` on the trail.
    #[inline]
    pub fn value(&self, lit: Lit) -> LBool {
        match self.assigns[lit.var().index()] {
            LBool::Undef => LBool::Undef,
            v => LBool::from_bool((v == LBool::True) == lit.is_positive()),
        }
    }

    #[inline]
    pub fn var_level(&self, var: Var) -> u32 {
        self.level[var.index()]
    }

    #[inline]
    pub fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    pub fn trail(&self) -> &[Lit] {
        &self.trail
    }

    /// Permanently add a clause. During search (from a hook) the clause is
    /// queued and integrated at the appropriate level once the hook returns.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        for l in lits {
            while l.var().index() >= self.num_vars() {
                self.new_var();
            }
        }
        if self.in_search {
            self.pending.push(lits.to_vec());
            return;
        }
        debug_assert_eq!(self.decision_level(), 0);
        if !self.ok {
            return;
        }
        let Some(c) = self.normalize(lits) else { return };
        match c.len() {
            0 => self.ok = false,
            1 => {
                if self.value(c[0]) == LBool::Undef {
                    self.enqueue(c[0], None);
                }
            }
            _ => {
                self.attach(c, false);
            }
        }
    }

    /// Add `¬J₁ ∨ … ∨ ¬Jₙ ∨ F`, introducing cached definition variables for
    /// any non-literal disjunct of `F`. Returns the literal standing for each
    /// top-level disjunct of `F`, in order.
    pub fn propagate_constraint(&mut self, antecedents: &[Lit], f: &Formula) -> Vec<Lit> {
        let disjuncts: Vec<Lit> = match f {
            Formula::Or(items) => items.iter().map(|it| self.define(it)).collect(),
            other => vec![self.define(other)],
        };
        let mut clause: Vec<Lit> = antecedents.iter().map(|&l| !l).collect();
        clause.extend_from_slice(&disjuncts);
        self.add_clause(&clause);
        disjuncts
    }

    /// A literal equivalent to `f`.
    pub fn define(&mut self, f: &Formula) -> Lit {
        match f {
            Formula::Lit(l) => *l,
            Formula::And(items) => {
                let lits: Vec<Lit> = items.iter().map(|it| self.define(it)).collect();
                self.define_gate(true, lits)
            }
            Formula::Or(items) => {
                let lits: Vec<Lit> = items.iter().map(|it| self.define(it)).collect();
                self.define_gate(false, lits)
            }
        }
    }

    fn define_gate(&mut self, is_and: bool, mut lits: Vec<Lit>) -> Lit {
        lits.sort_unstable();
        lits.dedup();
        if lits.is_empty() {
            let t = self.constant_true();
            return if is_and { t } else { !t };
        }
        if lits.len() == 1 {
            return lits[0];
        }
        if let Some(&t) = self.definitions.get(&(is_and, lits.clone())) {
            return t;
        }
        let t = self.new_var().pos();
        if is_and {
            for &l in &lits {
                self.add_clause(&[!t, l]);
            }
            let mut big: Vec<Lit> = lits.iter().map(|&l| !l).collect();
            big.push(t);
            self.add_clause(&big);
        } else {
            for &l in &lits {
                self.add_clause(&[t, !l]);
            }
            let mut big = lits.clone();
            big.push(!t);
            self.add_clause(&big);
        }
        self.definitions.insert((is_and, lits), t);
        t
    }

    fn constant_true(&mut self) -> Lit {
        if let Some(t) = self.constant_true {
            return t;
        }
        let t = self.new_var().pos();
        self.constant_true = Some(t);
        self.add_clause(&[t]);
        t
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveResult {
        self.solve_with(assumptions, &mut NoPropagator)
    }

    pub fn solve_with<P: Propagator + ?Sized>(&mut self, assumptions: &[Lit], hooks: &mut P) -> SolveResult {
        assert!(!self.in_search, "solve called from inside a propagator hook");
        self.stats.solves += 1;
        for a in assumptions {
            while a.var().index() >= self.num_vars() {
                self.new_var();
            }
        }
        if !self.ok {
            return SolveResult::Unsat(Vec::new());
        }
        self.in_search = true;
        let result = self.search(assumptions, hooks);
        self.cancel_until(0, hooks);
        self.in_search = false;
        // clauses queued after the last processing point (e.g. by an accepting
        // final check) still become part of the database
        let leftover = mem::take(&mut self.pending);
        for c in leftover {
            self.add_clause(&c);
        }
        result
    }

    // ----- core search ----------------------------------------------------

    fn search<P: Propagator + ?Sized>(&mut self, assumptions: &[Lit], hooks: &mut P) -> SolveResult {
        let mut restart_index = 0u64;
        let mut restart_limit = luby(restart_index) * self.config.restart_unit;
        let mut conflicts_since_restart = 0u64;
        let start_conflicts = self.stats.conflicts;
        let mut ticks = 0u64;
        let mut idle_rejections = 0u32;

        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts_since_restart += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SolveResult::Unsat(Vec::new());
                }
                self.handle_conflict(confl, hooks);
                continue;
            }

            if hooks.observes_assignments() {
                while self.notified < self.trail.len() {
                    let lit = self.trail[self.notified];
                    self.notified += 1;
                    let lvl = self.level[lit.var().index()];
                    let mut ctx = SolverCtx { solver: self };
                    hooks.on_assign(&mut ctx, lit, lvl);
                    if !self.pending.is_empty() {
                        break;
                    }
                }
            }
            if !self.pending.is_empty() {
                if !self.process_pending(hooks) {
                    return SolveResult::Unsat(Vec::new());
                }
                continue;
            }
            if self.qhead < self.trail.len() {
                continue;
            }

            ticks += 1;
            if ticks.is_multiple_of(64) {
                if let Some(d) = self.deadline {
                    if Instant::now() >= d {
                        return SolveResult::Interrupted;
                    }
                }
            }
            if let Some(b) = self.conflict_budget {
                if self.stats.conflicts - start_conflicts >= b {
                    return SolveResult::Interrupted;
                }
            }

            if conflicts_since_restart >= restart_limit {
                self.stats.restarts += 1;
                conflicts_since_restart = 0;
                restart_index += 1;
                restart_limit = luby(restart_index) * self.config.restart_unit;
                self.cancel_until(0, hooks);
                continue;
            }
            if self.learnts.len() as f64 >= self.max_learnts + self.trail.len() as f64 {
                self.reduce_db();
                self.max_learnts *= 1.1;
            }

            let mut next = None;
            while (self.decision_level() as usize) < assumptions.len() {
                let a = assumptions[self.decision_level() as usize];
                match self.value(a) {
                    LBool::True => self.trail_lim.push(self.trail.len()),
                    LBool::False => {
                        let core = self.analyze_final(a, assumptions);
                        return SolveResult::Unsat(core);
                    }
                    LBool::Undef => {
                        next = Some(a);
                        break;
                    }
                }
            }
            if next.is_none() {
                if let Some(l) = hooks.on_decide(self) {
                    if self.value(l) == LBool::Undef {
                        next = Some(l);
                    }
                }
            }
            if next.is_none() {
                next = self.pick_branch();
            }

            match next {
                Some(l) => {
                    self.stats.decisions += 1;
                    self.trail_lim.push(self.trail.len());
                    self.enqueue(l, None);
                }
                None => {
                    self.stats.final_checks += 1;
                    let verdict = {
                        let mut ctx = SolverCtx { solver: self };
                        hooks.on_final(&mut ctx)
                    };
                    if !self.pending.is_empty() {
                        let before = (self.trail.len(), self.num_vars(), self.stats.conflicts);
                        if !self.process_pending(hooks) {
                            return SolveResult::Unsat(Vec::new());
                        }
                        let after = (self.trail.len(), self.num_vars(), self.stats.conflicts);
                        if verdict == FinalCheck::Reject && before == after {
                            idle_rejections += 1;
                            assert!(
                                idle_rejections < 1000,
                                "propagator keeps rejecting models without adding a falsified clause"
                            );
                        } else {
                            idle_rejections = 0;
                        }
                        continue;
                    }
                    match verdict {
                        FinalCheck::Accept => {
                            let values = self.assigns.iter().map(|&v| v == LBool::True).collect();
                            return SolveResult::Sat(Model { values });
                        }
                        FinalCheck::Reject => {
                            panic!("propagator rejected a model without adding a clause")
                        }
                    }
                }
            }
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v.index()] == LBool::Undef {
                return Some(Lit::new(v, self.phase[v.index()]));
            }
        }
        None
    }

    #[inline]
    fn enqueue(&mut self, lit: Lit, reason: Option<CRef>) {
        let v = lit.var().index();
        debug_assert_eq!(self.assigns[v], LBool::Undef);
        self.assigns[v] = LBool::from_bool(lit.is_positive());
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    fn cancel_until<P: Propagator + ?Sized>(&mut self, level: u32, hooks: &mut P) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let lit = self.trail[i];
            let v = lit.var().index();
            if self.config.phase_saving {
                self.phase[v] = lit.is_positive();
            }
            self.assigns[v] = LBool::Undef;
            self.reason[v] = None;
            self.heap.insert(lit.var(), &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = self.qhead.min(lim);
        self.notified = self.notified.min(lim);
        hooks.on_backtrack(level);
    }

    /// Unit propagation. Returns a falsified clause on conflict.
    fn propagate(&mut self) -> Option<CRef> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == LBool::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let c = &mut self.clauses[cref].lits;
                    if c[0] == false_lit {
                        c.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.value(first) == LBool::True {
                    ws[j] = Watcher { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != LBool::False {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[l.code()].push(Watcher { cref: w.cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher { cref: w.cref, blocker: first };
                j += 1;
                if self.value(first) == LBool::False {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(w.cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn handle_conflict<P: Propagator + ?Sized>(&mut self, confl: CRef, hooks: &mut P) {
        let (learnt, bt_level) = self.analyze(confl);
        self.cancel_until(bt_level, hooks);
        self.stats.learnt_clauses += 1;
        if learnt.len() == 1 {
            self.enqueue(learnt[0], None);
        } else {
            let asserting = learnt[0];
            let cref = self.attach(learnt, true);
            self.bump_clause(cref);
            self.enqueue(asserting, Some(cref));
        }
        self.var_inc /= self.config.var_decay;
        self.cla_inc /= self.config.clause_decay;
    }

    /// First-UIP conflict analysis. The asserting literal is at index 0 and
    /// a literal of the backjump level at index 1.
    fn analyze(&mut self, mut confl: CRef) -> (Vec<Lit>, u32) {
        let current = self.decision_level();
        let mut learnt: Vec<Lit> = vec![Lit::new(Var(0), true)];
        let mut path_count = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let start = usize::from(p.is_some());
            let n = self.clauses[confl as usize].lits.len();
            for k in start..n {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(q.var());
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        path_count += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().index()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[lit.var().index()] = false;
            path_count -= 1;
            if path_count == 0 {
                break;
            }
            confl = self.reason[lit.var().index()].expect("implied literal without a reason");
        }
        learnt[0] = !p.unwrap();

        // drop literals whose reason is subsumed by the rest of the clause
        let mut kept = vec![learnt[0]];
        for &l in &learnt[1..] {
            let v = l.var().index();
            let redundant = match self.reason[v] {
                None => false,
                Some(r) => self.clauses[r as usize].lits[1..].iter().all(|q| {
                    let qv = q.var().index();
                    self.seen[qv] || self.level[qv] == 0
                }),
            };
            if !redundant {
                kept.push(l);
            }
        }
        for &l in &learnt[1..] {
            self.seen[l.var().index()] = false;
        }
        let mut learnt = kept;

        let bt_level = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().index()]
        };
        (learnt, bt_level)
    }

    /// Assumptions responsible for `failed` (an assumption found false).
    fn analyze_final(&mut self, failed: Lit, assumptions: &[Lit]) -> Vec<Lit> {
        let mut core = vec![failed];
        if self.decision_level() == 0 || self.level[failed.var().index()] == 0 {
            return core;
        }
        self.seen[failed.var().index()] = true;
        let start = self.trail_lim[0];
        for i in (start..self.trail.len()).rev() {
            let lit = self.trail[i];
            let v = lit.var().index();
            if !self.seen[v] {
                continue;
            }
            match self.reason[v] {
                None => {
                    debug_assert!(assumptions.contains(&lit));
                    if lit != failed {
                        core.push(lit);
                    }
                }
                Some(r) => {
                    for k in 1..self.clauses[r as usize].lits.len() {
                        let q = self.clauses[r as usize].lits[k];
                        if self.level[q.var().index()] > 0 {
                            self.seen[q.var().index()] = true;
                        }
                    }
                }
            }
            self.seen[v] = false;
        }
        self.seen[failed.var().index()] = false;
        core.sort_unstable();
        core.dedup();
        core
    }

    fn bump_var(&mut self, v: Var) {
        let a = &mut self.activity[v.index()];
        *a += self.var_inc;
        if *a > 1e100 {
            for x in self.activity.iter_mut() {
                *x *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: CRef) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &r in &self.learnts {
                self.clauses[r as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> CRef {
        debug_assert!(lits.len() >= 2);
        let cref = self.clauses.len() as CRef;
        self.watches[lits[0].code()].push(Watcher { cref, blocker: lits[1] });
        self.watches[lits[1].code()].push(Watcher { cref, blocker: lits[0] });
        self.clauses.push(ClauseData { lits, learnt, deleted: false, activity: 0.0 });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    fn locked(&self, cref: CRef) -> bool {
        let l0 = self.clauses[cref as usize].lits[0];
        self.value(l0) == LBool::True && self.reason[l0.var().index()] == Some(cref)
    }

    fn reduce_db(&mut self) {
        let mut ls = mem::take(&mut self.learnts);
        ls.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            ca.activity.partial_cmp(&cb.activity).unwrap().then(a.cmp(&b))
        });
        let half = ls.len() / 2;
        let mut kept = Vec::with_capacity(ls.len());
        for (i, &cref) in ls.iter().enumerate() {
            let c = &self.clauses[cref as usize];
            if i < half && c.lits.len() > 2 && !self.locked(cref) {
                let c = &mut self.clauses[cref as usize];
                c.deleted = true;
                c.lits = Vec::new();
            } else {
                kept.push(cref);
            }
        }
        self.learnts = kept;
        for ws in self.watches.iter_mut() {
            ws.retain(|w| !self.clauses[w.cref as usize].deleted);
        }
    }

    /// Deduplicate, drop tautologies and clauses satisfied at the root,
    /// strip literals false at the root.
    fn normalize(&self, lits: &[Lit]) -> Option<Vec<Lit>> {
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        for w in c.windows(2) {
            if w[0].var() == w[1].var() {
                return None;
            }
        }
        let root = |l: Lit| self.level[l.var().index()] == 0;
        if c.iter().any(|&l| self.value(l) == LBool::True && root(l)) {
            return None;
        }
        c.retain(|&l| !(self.value(l) == LBool::False && root(l)));
        Some(c)
    }

    /// Integrate clauses queued by hooks. Returns false when the database
    /// became unsatisfiable.
    fn process_pending<P: Propagator + ?Sized>(&mut self, hooks: &mut P) -> bool {
        let batch = mem::take(&mut self.pending);
        for lits in batch {
            self.stats.injected_clauses += 1;
            if !self.ok {
                return false;
            }
            let Some(mut c) = self.normalize(&lits) else { continue };
            match c.len() {
                0 => {
                    self.ok = false;
                    return false;
                }
                1 => {
                    self.cancel_until(0, hooks);
                    if self.value(c[0]) == LBool::Undef {
                        self.enqueue(c[0], None);
                    }
                }
                _ => {
                    // watch order: true (lowest level first), unassigned,
                    // false (highest level first)
                    c.sort_by_key(|&l| match self.value(l) {
                        LBool::True => (0u8, self.level[l.var().index()] as i64),
                        LBool::Undef => (1, 0),
                        LBool::False => (2, -(self.level[l.var().index()] as i64)),
                    });
                    let (l0, l1) = (c[0], c[1]);
                    let (v0, v1) = (self.value(l0), self.value(l1));
                    let (lv0, lv1) = (self.level[l0.var().index()], self.level[l1.var().index()]);
                    let cref = self.attach(c, false);
                    if v0 == LBool::False {
                        if lv0 > lv1 {
                            self.cancel_until(lv1, hooks);
                            self.enqueue(l0, Some(cref));
                        } else {
                            self.cancel_until(lv0, hooks);
                            self.stats.conflicts += 1;
                            self.handle_conflict(cref, hooks);
                        }
                    } else if v0 == LBool::Undef && v1 == LBool::False {
                        self.cancel_until(lv1, hooks);
                        self.enqueue(l0, Some(cref));
                    }
                }
            }
        }
        true
    }

    /// Every stored original clause (for debugging and DIMACS export);
    /// root-level units are reported as unit clauses.
    pub fn original_clauses(&self) -> Vec<Vec<Lit>> {
        let mut out: Vec<Vec<Lit>> = Vec::new();
        let root_end = self.trail_lim.first().copied().unwrap_or(self.trail.len());
        for &l in &self.trail[..root_end] {
            out.push(vec![l]);
        }
        for c in &self.clauses {
            if !c.learnt && !c.deleted {
                out.push(c.lits.clone());
            }
        }
        if !self.ok {
            out.push(Vec::new());
        }
        out
    }
}
