//! Operations on parsed problems: copies, the potential-connection
//! relation, start clauses, equality axioms and tautology removal.

use std::collections::HashSet;

use crate::term::{Clause, Literal, PredId, Problem, Role, SymbolKind, Term, Var, EQUALITY};
use crate::unify::unifiable_apart;

/// The `k`-th copy of an input clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseCopy {
    pub clause: usize,
    pub copy: u32,
    pub literals: Vec<Literal>,
    pub vars: Vec<Var>,
}

pub fn make_copy(c: &Clause, k: u32) -> ClauseCopy {
    ClauseCopy { clause: c.id, copy: k, literals: c.literals.iter().map(|l| l.rename(k)).collect(), vars: c.var_vector(k) }
}

/// `l ⋈ k`: dual polarity, same predicate, and unifiable arguments once the
/// two literals are renamed apart.
pub fn can_connect(l: &Literal, k: &Literal) -> bool {
    l.positive != k.positive && l.pred == k.pred && unifiable_apart(l, k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StartPolicy {
    #[default]
    Conjecture,
    All,
}

/// Conjecture clauses, or every clause when there are none (or when asked).
pub fn select_start_clauses(p: &Problem, policy: StartPolicy) -> Vec<usize> {
    let conj: Vec<usize> = p.clauses.iter().filter(|c| c.role == Role::Conjecture).map(|c| c.id).collect();
    match policy {
        StartPolicy::Conjecture if !conj.is_empty() => conj,
        _ => p.clauses.iter().map(|c| c.id).collect(),
    }
}

/// Literal occurrence in an input clause: (clause id, literal index).
pub type Site = (usize, usize);

/// Precomputed `⋈` partners of every input literal.
#[derive(Clone, Debug, Default)]
pub struct ConnectionTable {
    partners: Vec<Vec<Vec<Site>>>,
}

impl ConnectionTable {
    pub fn new(p: &Problem) -> ConnectionTable {
        let mut partners: Vec<Vec<Vec<Site>>> = p.clauses.iter().map(|c| vec![Vec::new(); c.literals.len()]).collect();
        let sites: Vec<(Site, &Literal)> = p
            .clauses
            .iter()
            .flat_map(|c| c.literals.iter().enumerate().map(move |(i, l)| ((c.id, i), l)))
            .collect();
        for (a, (sa, la)) in sites.iter().enumerate() {
            for (sb, lb) in &sites[a..] {
                if can_connect(la, lb) {
                    partners[sa.0][sa.1].push(*sb);
                    if sa != sb {
                        partners[sb.0][sb.1].push(*sa);
                    }
                }
            }
        }
        for per_clause in &mut partners {
            for list in per_clause {
                list.sort_unstable();
            }
        }
        ConnectionTable { partners }
    }

    pub fn partners(&self, clause: usize, lit: usize) -> &[Site] {
        &self.partners[clause][lit]
    }

    pub fn connects(&self, a: Site, b: Site) -> bool {
        self.partners[a.0][a.1].binary_search(&b).is_ok()
    }

    /// Clauses with at least one literal connectable to `(clause, lit)`.
    pub fn partner_clauses(&self, clause: usize, lit: usize) -> Vec<usize> {
        let mut cs: Vec<usize> = self.partners(clause, lit).iter().map(|s| s.0).collect();
        cs.dedup();
        cs
    }
}

fn fresh_name(p: &Problem, taken: &mut HashSet<String>, base: &str) -> String {
    let mut name = base.to_string();
    let mut i = 1;
    while taken.contains(&name) || p.empty_clauses.contains(&name) {
        name = format!("{base}_{i}");
        i += 1;
    }
    taken.insert(name.clone());
    name
}

/// Append reflexivity, symmetry, transitivity and congruence axioms for
/// every function and predicate argument. No-op without equality.
pub fn axiomatize_equality(p: &Problem) -> Problem {
    let Some(eq) = p.symbols.equality() else { return p.clone() };
    if !p.has_equality() {
        return p.clone();
    }
    let mut out = p.clone();
    let mut taken: HashSet<String> = p.clauses.iter().map(|c| c.name.clone()).collect();
    let lit = |positive: bool, pred: PredId, args: Vec<Term>| Literal::new(positive, pred, args);
    let add = |out: &mut Problem, name: String, lits: Vec<Literal>, names: Vec<String>| {
        let id = out.clauses.len();
        let literals = lits
            .iter()
            .map(|l| l.map_vars(&mut |v| Term::Var(Var { clause: id as u32, ..v })))
            .collect();
        out.clauses.push(Clause { id, name, role: Role::Axiom, literals, var_names: names });
    };
    let x = |pos: u32| Term::Var(Var { clause: 0, copy: 0, pos });
    let names = |n: usize| -> Vec<String> {
        (0..n).map(|i| if i < 3 { ["X", "Y", "Z"][i].to_string() } else { format!("X{i}") }).collect()
    };

    let name = fresh_name(p, &mut taken, "eq_reflexivity");
    add(&mut out, name, vec![lit(true, eq, vec![x(0), x(0)])], names(1));
    let name = fresh_name(p, &mut taken, "eq_symmetry");
    add(&mut out, name, vec![lit(false, eq, vec![x(0), x(1)]), lit(true, eq, vec![x(1), x(0)])], names(2));
    let name = fresh_name(p, &mut taken, "eq_transitivity");
    add(
        &mut out,
        name,
        vec![lit(false, eq, vec![x(0), x(1)]), lit(false, eq, vec![x(1), x(2)]), lit(true, eq, vec![x(0), x(2)])],
        names(3),
    );

    // positions 0 and 1 are the two sides; the remaining arguments share
    // variables 2.. between both sides
    let shared = |arity: usize, i: usize, side: u32| -> Vec<Term> {
        let mut next = 2;
        (0..arity)
            .map(|j| {
                if j == i {
                    x(side)
                } else {
                    next += 1;
                    x(next - 1)
                }
            })
            .collect()
    };
    let funcs: Vec<_> = p.symbols.functions().map(|(f, s)| (f, s.name.clone(), s.arity)).collect();
    for (f, fname, arity) in funcs {
        for i in 0..arity {
            let name = fresh_name(p, &mut taken, &format!("eq_congruence_{}_{}", sanitize(&fname), i + 1));
            add(
                &mut out,
                name,
                vec![
                    lit(false, eq, vec![x(0), x(1)]),
                    lit(true, eq, vec![Term::app(f, shared(arity, i, 0)), Term::app(f, shared(arity, i, 1))]),
                ],
                names(arity + 1),
            );
        }
    }
    let preds: Vec<_> = p
        .symbols
        .predicates()
        .filter(|(_, s)| s.name != EQUALITY && s.kind == SymbolKind::Predicate)
        .map(|(q, s)| (q, s.name.clone(), s.arity))
        .collect();
    for (q, qname, arity) in preds {
        for i in 0..arity {
            let name = fresh_name(p, &mut taken, &format!("eq_substitution_{}_{}", sanitize(&qname), i + 1));
            add(
                &mut out,
                name,
                vec![
                    lit(false, eq, vec![x(0), x(1)]),
                    lit(false, q, shared(arity, i, 0)),
                    lit(true, q, shared(arity, i, 1)),
                ],
                names(arity + 1),
            );
        }
    }
    out
}

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect()
}

/// Whether the clause contains two syntactically dual literals.
pub fn is_tautology(c: &Clause) -> bool {
    c.literals.iter().enumerate().any(|(i, l)| {
        c.literals[i + 1..].iter().any(|k| k.positive != l.positive && k.pred == l.pred && k.args == l.args)
    })
}

/// Drop tautological clauses, renumbering the survivors.
pub fn remove_tautologies(p: &Problem) -> Problem {
    if !p.clauses.iter().any(is_tautology) {
        return p.clone();
    }
    let mut out = Problem { symbols: p.symbols.clone(), clauses: Vec::new(), start: Vec::new(), empty_clauses: p.empty_clauses.clone() };
    for c in &p.clauses {
        if is_tautology(c) {
            continue;
        }
        let id = out.clauses.len();
        let literals = c.literals.iter().map(|l| l.map_vars(&mut |v| Term::Var(Var { clause: id as u32, ..v }))).collect();
        if p.start.contains(&c.id) {
            out.start.push(id);
        }
        out.clauses.push(Clause { id, literals, ..c.clone() });
    }
    out
}
