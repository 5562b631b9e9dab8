//! The global substitution: bindings with a chronological trail,
//! disequality constraints, conflict explanations and the term order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::term::{Literal, Term, Var};

/// Identifies the constraint (usually a SAT literal) that caused a binding.
pub type Tag = u32;

/// Tags whose constraints are jointly unsatisfiable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Explanation {
    pub tags: Vec<Tag>,
}

impl Explanation {
    fn from_deps(mut tags: Vec<Tag>) -> Explanation {
        tags.sort_unstable();
        tags.dedup();
        Explanation { tags }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mark {
    trail: usize,
    diseqs: usize,
}

#[derive(Clone, Debug)]
struct Binding {
    term: Term,
    deps: Arc<[Tag]>,
}

#[derive(Clone, Debug)]
struct Diseq {
    lhs: Arc<[Term]>,
    rhs: Arc<[Term]>,
    tag: Option<Tag>,
}

/// Bindings and disequalities in a form suitable for equality checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub bindings: BTreeMap<Var, Term>,
    pub disequalities: Vec<(Vec<Term>, Vec<Term>)>,
}

#[derive(Clone, Debug, Default)]
pub struct SubstitutionStore {
    bindings: HashMap<Var, Binding>,
    trail: Vec<Var>,
    diseqs: Vec<Diseq>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermOrder {
    Less,
    Greater,
    Equal,
    Incomparable,
}

impl SubstitutionStore {
    pub fn new() -> SubstitutionStore {
        SubstitutionStore::default()
    }

    pub fn mark(&self) -> Mark {
        Mark { trail: self.trail.len(), diseqs: self.diseqs.len() }
    }

    pub fn retract_to(&mut self, mark: Mark) {
        assert!(mark.trail <= self.trail.len() && mark.diseqs <= self.diseqs.len(), "stale mark");
        for v in self.trail.drain(mark.trail..) {
            self.bindings.remove(&v);
        }
        self.diseqs.truncate(mark.diseqs);
    }

    pub fn num_bindings(&self) -> usize {
        self.trail.len()
    }

    pub fn binding(&self, v: Var) -> Option<&Term> {
        self.bindings.get(&v).map(|b| &b.term)
    }

    /// Bound variables in binding order.
    pub fn bound_vars(&self) -> &[Var] {
        &self.trail
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            bindings: self.bindings.iter().map(|(v, b)| (*v, b.term.clone())).collect(),
            disequalities: self.diseqs.iter().map(|d| (d.lhs.to_vec(), d.rhs.to_vec())).collect(),
        }
    }

    /// Follow bindings at the root of `t`.
    pub fn deref(&self, t: &Term) -> Term {
        self.walk(t, &mut Vec::new())
    }

    fn walk(&self, t: &Term, deps: &mut Vec<Tag>) -> Term {
        let mut cur = t;
        while let Term::Var(v) = cur {
            match self.bindings.get(v) {
                Some(b) => {
                    deps.extend_from_slice(&b.deps);
                    cur = &b.term;
                }
                None => break,
            }
        }
        cur.clone()
    }

    /// Apply the substitution exhaustively.
    pub fn resolve(&self, t: &Term) -> Term {
        self.resolve_with_deps(t, &mut Vec::new())
    }

    /// As [`resolve`](Self::resolve), collecting the tags of every binding used.
    pub fn resolve_with_deps(&self, t: &Term, deps: &mut Vec<Tag>) -> Term {
        match self.walk(t, deps) {
            Term::App(f, args) if !args.is_empty() => {
                Term::App(f, args.iter().map(|a| self.resolve_with_deps(a, deps)).collect())
            }
            other => other,
        }
    }

    pub fn resolve_literal(&self, l: &Literal) -> Literal {
        self.resolve_literal_with_deps(l, &mut Vec::new())
    }

    pub fn resolve_literal_with_deps(&self, l: &Literal, deps: &mut Vec<Tag>) -> Literal {
        Literal { positive: l.positive, pred: l.pred, args: l.args.iter().map(|a| self.resolve_with_deps(a, deps)).collect() }
    }

    fn occurs(&self, v: Var, t: &Term, deps: &mut Vec<Tag>) -> bool {
        match self.walk(t, deps) {
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| self.occurs(v, a, deps)),
        }
    }

    /// Unify two terms. On failure the store is unchanged.
    pub fn unify(&mut self, s: &Term, t: &Term) -> Result<Mark, Explanation> {
        self.unify_args(std::slice::from_ref(s), std::slice::from_ref(t), None)
    }

    pub fn unify_tagged(&mut self, s: &Term, t: &Term, tag: Option<Tag>) -> Result<Mark, Explanation> {
        self.unify_args(std::slice::from_ref(s), std::slice::from_ref(t), tag)
    }

    /// Unify two argument lists pointwise as one constraint labelled `tag`.
    /// Returns the mark taken before any binding was made.
    pub fn unify_args(&mut self, a: &[Term], b: &[Term], tag: Option<Tag>) -> Result<Mark, Explanation> {
        let mark = self.mark();
        let mut deps: Vec<Tag> = tag.into_iter().collect();
        if a.len() != b.len() {
            return Err(Explanation::from_deps(deps));
        }
        let mut work: Vec<(Term, Term)> = a.iter().cloned().zip(b.iter().cloned()).rev().collect();
        let mut ok = true;
        while let Some((s, t)) = work.pop() {
            let s = self.walk(&s, &mut deps);
            let t = self.walk(&t, &mut deps);
            match (s, t) {
                (Term::Var(x), Term::Var(y)) if x == y => {}
                (Term::Var(x), t) | (t, Term::Var(x)) => {
                    if self.occurs(x, &t, &mut deps) {
                        ok = false;
                        break;
                    }
                    self.bindings.insert(x, Binding { term: t, deps: Arc::from(Vec::new()) });
                    self.trail.push(x);
                }
                (Term::App(f, fa), Term::App(g, ga)) => {
                    if f != g || fa.len() != ga.len() {
                        ok = false;
                        break;
                    }
                    work.extend(fa.iter().cloned().zip(ga.iter().cloned()).rev());
                }
            }
        }
        if !ok {
            self.retract_to(mark);
            return Err(Explanation::from_deps(deps));
        }
        if self.trail.len() == mark.trail {
            return Ok(mark);
        }
        deps.sort_unstable();
        deps.dedup();
        let shared: Arc<[Tag]> = Arc::from(deps);
        for v in &self.trail[mark.trail..] {
            self.bindings.get_mut(v).unwrap().deps = shared.clone();
        }
        if let Some(e) = self.violated_disequality() {
            self.retract_to(mark);
            return Err(e);
        }
        Ok(mark)
    }

    fn violated_disequality(&self) -> Option<Explanation> {
        for d in &self.diseqs {
            let mut deps: Vec<Tag> = d.tag.into_iter().collect();
            if self.identical_args(&d.lhs, &d.rhs, &mut deps) {
                return Some(Explanation::from_deps(deps));
            }
        }
        None
    }

    fn identical(&self, s: &Term, t: &Term, deps: &mut Vec<Tag>) -> bool {
        match (self.walk(s, deps), self.walk(t, deps)) {
            (Term::Var(x), Term::Var(y)) => x == y,
            (Term::App(f, fa), Term::App(g, ga)) => f == g && self.identical_args(&fa, &ga, deps),
            _ => false,
        }
    }

    fn identical_args(&self, a: &[Term], b: &[Term], deps: &mut Vec<Tag>) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(s, t)| self.identical(s, t, deps))
    }

    /// Whether `s` and `t` are syntactically equal under the substitution.
    pub fn equal_under(&self, s: &Term, t: &Term) -> bool {
        self.identical(s, t, &mut Vec::new())
    }

    /// Require that `l` and `k` become dual: opposite polarity, same
    /// predicate, unified arguments.
    pub fn assert_connection(&mut self, l: &Literal, k: &Literal, tag: Tag) -> Result<(), Explanation> {
        if l.positive == k.positive || l.pred != k.pred {
            return Err(Explanation { tags: vec![tag] });
        }
        self.unify_args(&l.args, &k.args, Some(tag)).map(|_| ())
    }

    pub fn assert_disequality(&mut self, s: &Term, t: &Term, tag: Option<Tag>) -> Result<(), Explanation> {
        self.assert_disequality_args(std::slice::from_ref(s), std::slice::from_ref(t), tag)
    }

    /// Forbid the two argument lists from ever becoming identical.
    pub fn assert_disequality_args(&mut self, s: &[Term], t: &[Term], tag: Option<Tag>) -> Result<(), Explanation> {
        let mut deps: Vec<Tag> = tag.into_iter().collect();
        if self.identical_args(s, t, &mut deps) {
            return Err(Explanation::from_deps(deps));
        }
        self.diseqs.push(Diseq { lhs: Arc::from(s), rhs: Arc::from(t), tag });
        Ok(())
    }

    /// Opposite polarity, same predicate and identical arguments without
    /// creating bindings.
    pub fn are_dual_under(&self, l: &Literal, k: &Literal) -> bool {
        l.positive != k.positive && l.pred == k.pred && self.identical_args(&l.args, &k.args, &mut Vec::new())
    }

    /// Tags of the bindings that `are_dual_under(l, k)` relied on.
    pub fn dual_deps(&self, l: &Literal, k: &Literal, deps: &mut Vec<Tag>) -> bool {
        l.positive != k.positive && l.pred == k.pred && self.identical_args(&l.args, &k.args, deps)
    }

    pub fn compare_terms(&self, s: &Term, t: &Term) -> TermOrder {
        compare_terms(&self.resolve(s), &self.resolve(t))
    }
}

/// Precedence on function symbols by id, extended lexicographically to
/// arguments. Distinct variables are incomparable so that the result is
/// stable under instantiation.
pub fn compare_terms(s: &Term, t: &Term) -> TermOrder {
    match (s, t) {
        (Term::Var(x), Term::Var(y)) if x == y => TermOrder::Equal,
        (Term::Var(_), _) | (_, Term::Var(_)) => TermOrder::Incomparable,
        (Term::App(f, fa), Term::App(g, ga)) => match f.cmp(g) {
            Ordering::Less => TermOrder::Less,
            Ordering::Greater => TermOrder::Greater,
            Ordering::Equal => compare_lex(fa, ga),
        },
    }
}

/// Lexicographic extension of [`compare_terms`] to sequences.
pub fn compare_lex(a: &[Term], b: &[Term]) -> TermOrder {
    for (s, t) in a.iter().zip(b) {
        match compare_terms(s, t) {
            TermOrder::Equal => continue,
            other => return other,
        }
    }
    match a.len().cmp(&b.len()) {
        Ordering::Equal => TermOrder::Equal,
        Ordering::Less => TermOrder::Less,
        Ordering::Greater => TermOrder::Greater,
    }
}

/// Whether the argument lists unify after renaming the two sides apart.
pub fn unifiable_apart(l: &Literal, k: &Literal) -> bool {
    let mut left: Vec<Var> = Vec::new();
    let mut right: Vec<Var> = Vec::new();
    let rename = |lit: &Literal, seen: &mut Vec<Var>, side: u32| {
        lit.map_vars(&mut |v| {
            let pos = match seen.iter().position(|w| *w == v) {
                Some(p) => p,
                None => {
                    seen.push(v);
                    seen.len() - 1
                }
            };
            Term::Var(Var { clause: u32::MAX, copy: side, pos: pos as u32 })
        })
    };
    let l = rename(l, &mut left, 0);
    let k = rename(k, &mut right, 1);
    SubstitutionStore::new().unify_args(&l.args, &k.args, None).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::FunId;

    fn v(pos: u32) -> Term {
        Term::Var(Var { clause: 0, copy: 1, pos })
    }

    fn c(f: u32) -> Term {
        Term::constant(FunId(f))
    }

    fn f(id: u32, args: Vec<Term>) -> Term {
        Term::app(FunId(id), args)
    }

    #[test]
    fn binds_variable() {
        let mut s = SubstitutionStore::new();
        let m = s.unify(&v(0), &f(5, vec![v(1)])).unwrap();
        assert_eq!(s.resolve(&v(0)), f(5, vec![v(1)]));
        s.retract_to(m);
        assert_eq!(s.num_bindings(), 0);
    }

    #[test]
    fn occurs_check_fails_cleanly() {
        let mut s = SubstitutionStore::new();
        assert!(s.unify(&v(0), &f(5, vec![v(0)])).is_err());
        assert_eq!(s.num_bindings(), 0);
    }

    #[test]
    fn clash_explanation_names_both_tags() {
        let mut s = SubstitutionStore::new();
        s.unify_tagged(&v(0), &c(1), Some(10)).unwrap();
        s.unify_tagged(&v(5), &c(3), Some(11)).unwrap();
        let e = s.unify_tagged(&v(0), &c(2), Some(12)).unwrap_err();
        assert_eq!(e.tags, vec![10, 12]);
        assert_eq!(s.num_bindings(), 2);
    }

    #[test]
    fn disequality() {
        let mut s = SubstitutionStore::new();
        s.assert_disequality(&v(0), &c(1), Some(7)).unwrap();
        let e = s.unify_tagged(&v(0), &c(1), Some(8)).unwrap_err();
        assert_eq!(e.tags, vec![7, 8]);
        assert!(s.assert_disequality(&c(1), &c(2), None).is_ok());
        assert!(s.assert_disequality(&v(3), &v(3), Some(9)).is_err());
    }

    #[test]
    fn nested_marks() {
        let mut s = SubstitutionStore::new();
        let m0 = s.mark();
        let m1 = s.unify(&v(0), &c(1)).unwrap();
        assert_eq!(m0, m1);
        s.unify(&v(1), &c(2)).unwrap();
        s.retract_to(m0);
        assert_eq!(s.snapshot(), SubstitutionStore::new().snapshot());
        s.retract_to(s.mark());
    }

    #[test]
    fn order() {
        assert_eq!(compare_terms(&f(2, vec![c(0)]), &f(2, vec![c(1)])), TermOrder::Less);
        assert_eq!(compare_terms(&f(3, vec![v(0)]), &f(3, vec![v(0)])), TermOrder::Equal);
        assert_eq!(compare_terms(&v(0), &v(1)), TermOrder::Incomparable);
        assert_eq!(compare_terms(&c(1), &c(0)), TermOrder::Greater);
        assert_eq!(compare_lex(&[v(0), c(0)], &[v(1), c(1)]), TermOrder::Incomparable);
    }
}
