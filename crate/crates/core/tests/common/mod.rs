#![allow(dead_code)]

use std::collections::HashMap;
use std::path::Path;

use connsat::parse::{load_problem, parse_problem};
use connsat::problem::is_tautology;
use connsat::proof::Proof;
use connsat::term::{Literal, Problem, Term, Var};
use rand::Rng;

pub fn corpus_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/problems")
}

pub fn corpus(name: &str) -> Problem {
    let dir = corpus_dir();
    load_problem(&dir.join(name), Some(&dir)).unwrap()
}

pub fn corpus_files() -> Vec<String> {
    let mut out: Vec<String> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| {
            let name = e.unwrap().file_name().to_string_lossy().into_owned();
            name.ends_with(".p").then_some(name)
        })
        .collect();
    out.sort();
    out
}

// ---- substitutions, independent of the prover's store ----

pub type Subst = HashMap<Var, Term>;

pub fn apply(t: &Term, s: &Subst) -> Term {
    match t {
        Term::Var(v) => match s.get(v) {
            Some(u) => apply(u, s),
            None => t.clone(),
        },
        Term::App(f, args) => Term::App(*f, args.iter().map(|a| apply(a, s)).collect()),
    }
}

pub fn apply_literal(l: &Literal, s: &Subst) -> Literal {
    Literal { args: l.args.iter().map(|a| apply(a, s)).collect(), ..l.clone() }
}

/// Robinson unification on fully substituted terms.
pub fn unify(a: &Term, b: &Term, s: &mut Subst) -> bool {
    let (a, b) = (apply(a, s), apply(b, s));
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), t) | (t, Term::Var(x)) => {
            if t.contains_var(*x) {
                return false;
            }
            s.insert(*x, t.clone());
            true
        }
        (Term::App(f, fa), Term::App(g, ga)) => {
            f == g && fa.len() == ga.len() && fa.iter().zip(ga.iter()).all(|(x, y)| unify(x, y, s))
        }
    }
}

pub fn complementary(l: &Literal, k: &Literal) -> bool {
    l.positive != k.positive && l.pred == k.pred && l.args == k.args
}

/// Whether `a` and `b` are equal up to a bijective renaming of variables.
pub fn variant(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, fw: &mut HashMap<Var, Var>, bw: &mut HashMap<Var, Var>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                *fw.entry(*x).or_insert(*y) == *y && *bw.entry(*y).or_insert(*x) == *x
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                f == g && fa.len() == ga.len() && fa.iter().zip(ga.iter()).all(|(x, y)| go(x, y, fw, bw))
            }
            _ => false,
        }
    }
    go(a, b, &mut HashMap::new(), &mut HashMap::new())
}

// ---- paths ----

/// First path (one literal index per copy) without a complementary pair,
/// by plain enumeration of the full product.
pub fn enumerate_open_path(copies: &[Vec<Literal>]) -> Option<Vec<usize>> {
    if copies.iter().any(|c| c.is_empty()) {
        return None;
    }
    let mut idx = vec![0; copies.len()];
    loop {
        let lits: Vec<&Literal> = idx.iter().enumerate().map(|(i, &j)| &copies[i][j]).collect();
        let closed = (0..lits.len()).any(|i| (i + 1..lits.len()).any(|j| complementary(lits[i], lits[j])));
        if !closed {
            return Some(idx);
        }
        let mut i = 0;
        loop {
            if i == idx.len() {
                return None;
            }
            idx[i] += 1;
            if idx[i] < copies[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Copies of a proof with its substitution applied.
pub fn instantiate(p: &Problem, proof: &Proof) -> Vec<Vec<Literal>> {
    let s: Subst = proof.substitution.iter().cloned().collect();
    proof
        .copies
        .iter()
        .map(|c| p.clauses[c.clause].literals.iter().map(|l| apply_literal(&l.rename(c.copy), &s)).collect())
        .collect()
}

// ---- brute-force matrix search ----

fn spanning_from(copies: &[Vec<Literal>], s: &Subst) -> bool {
    let inst: Vec<Vec<Literal>> = copies.iter().map(|c| c.iter().map(|l| apply_literal(l, s)).collect()).collect();
    let Some(path) = enumerate_open_path(&inst) else { return true };
    for i in 0..path.len() {
        for j in i + 1..path.len() {
            let (l, k) = (&copies[i][path[i]], &copies[j][path[j]]);
            if l.positive == k.positive || l.pred != k.pred {
                continue;
            }
            let mut s2 = s.clone();
            if l.args.iter().zip(k.args.iter()).all(|(a, b)| unify(a, b, &mut s2)) && spanning_from(copies, &s2) {
                return true;
            }
        }
    }
    false
}

/// Whether the matrix with `counts[c]` copies of clause `c` has a
/// substitution making every path complementary.
pub fn spanning_exists(p: &Problem, counts: &[u32]) -> bool {
    let mut copies = Vec::new();
    for (c, &n) in counts.iter().enumerate() {
        for k in 1..=n {
            copies.push(p.clauses[c].literals.iter().map(|l| l.rename(k)).collect::<Vec<_>>());
        }
    }
    !copies.is_empty() && spanning_from(&copies, &Subst::new())
}

fn count_vectors(n: usize, total: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in count_vectors(n - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Smallest number of clause copies of a spanning matrix that contains a
/// start clause, searched up to `max`.
pub fn minimal_size(p: &Problem, max: u32) -> Option<u32> {
    (1..=max).find(|&s| {
        count_vectors(p.clauses.len(), s)
            .into_iter()
            .any(|v| p.start.iter().any(|&c| v[c] > 0) && spanning_exists(p, &v))
    })
}

/// Whether no spanning matrix of at most `max` copies avoids every start
/// clause, so that every spanning matrix needs one.
pub fn axioms_consistent(p: &Problem, max: u32) -> bool {
    (1..=max).all(|s| {
        count_vectors(p.clauses.len(), s)
            .into_iter()
            .all(|v| p.start.iter().any(|&c| v[c] > 0) || !spanning_exists(p, &v))
    })
}

// ---- random problems ----

fn random_term(rng: &mut impl Rng, depth: u32) -> String {
    match rng.gen_range(0..if depth == 0 { 4 } else { 5 }) {
        0 => "X".into(),
        1 => "Y".into(),
        2 => "a".into(),
        3 => "b".into(),
        _ => format!("f({})", random_term(rng, depth - 1)),
    }
}

fn random_literal(rng: &mut impl Rng) -> String {
    let sign = if rng.gen_bool(0.5) { "~" } else { "" };
    match rng.gen_range(0..5) {
        0 => format!("{sign}r"),
        1 | 2 => format!("{sign}p({})", random_term(rng, 1)),
        _ => format!("{sign}q({})", random_term(rng, 1)),
    }
}

/// A small problem whose first clause is the conjecture; no tautologies.
pub fn random_problem(rng: &mut impl Rng) -> (String, Problem) {
    loop {
        let n = rng.gen_range(2..=4);
        let mut text = String::new();
        for i in 0..n {
            let width = rng.gen_range(1..=3);
            let lits: Vec<String> = (0..width).map(|_| random_literal(rng)).collect();
            let role = if i == 0 { "negated_conjecture" } else { "axiom" };
            text.push_str(&format!("cnf(c{i},{role},({})).\n", lits.join(" | ")));
        }
        let p = parse_problem(&text).unwrap();
        if !p.clauses.iter().any(is_tautology) {
            return (text, p);
        }
    }
}

// ---- propositional brute force ----

/// Satisfiability by backtracking in variable order; each clause is tested
/// once its largest variable is assigned.
pub fn sat_brute_force(num_vars: usize, clauses: &[Vec<i64>]) -> bool {
    let mut by_last: Vec<Vec<&Vec<i64>>> = vec![Vec::new(); num_vars];
    for c in clauses {
        let last = c.iter().map(|l| l.unsigned_abs() as usize - 1).max().unwrap();
        by_last[last].push(c);
    }
    if clauses.iter().any(|c| c.is_empty()) {
        return false;
    }
    fn go(i: usize, vals: &mut Vec<bool>, by_last: &[Vec<&Vec<i64>>]) -> bool {
        if i == vals.len() {
            return true;
        }
        for b in [false, true] {
            vals[i] = b;
            let ok = by_last[i].iter().all(|c| c.iter().any(|&l| vals[l.unsigned_abs() as usize - 1] == (l > 0)));
            if ok && go(i + 1, vals, by_last) {
                return true;
            }
        }
        false
    }
    go(0, &mut vec![false; num_vars], &by_last)
}
