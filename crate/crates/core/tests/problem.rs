mod common;

use common::{corpus, corpus_files, random_problem};
use connsat::parse::{parse_problem, ParseError};
use connsat::problem::{axiomatize_equality, can_connect, make_copy, select_start_clauses, ConnectionTable, StartPolicy};
use connsat::term::{atom_name, Problem, Role, VarStyle};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn render(p: &Problem) -> String {
    let fmt = p.fmt();
    p.clauses
        .iter()
        .map(|c| {
            let role = if c.role == Role::Conjecture { "negated_conjecture" } else { "axiom" };
            let lits: Vec<String> = c.literals.iter().map(|l| fmt.literal(l)).collect();
            format!("cnf({},{role},({})).\n", atom_name(&c.name), lits.join(" | "))
        })
        .collect()
}

#[test]
fn example_one_clauses_and_copies() {
    let p = corpus("ex1.p");
    let fmt = p.fmt().with_style(VarStyle::Superscript);
    assert_eq!(fmt.literals(&make_copy(&p.clauses[0], 1).literals), "p(Z^1) | p(f(Z^1))");
    assert_eq!(fmt.literals(&make_copy(&p.clauses[1], 2).literals), "~p(X^2) | ~p(f(Y^2))");
    assert_eq!(make_copy(&p.clauses[1], 2), make_copy(&p.clauses[1], 2));
}

#[test]
fn potential_connections() {
    let p = parse_problem("cnf(a,axiom,(p(X) | p(a))). cnf(b,axiom,(~p(X) | ~p(f(X)))).").unwrap();
    let (a, b) = (&p.clauses[0].literals, &p.clauses[1].literals);
    assert!(can_connect(&a[0], &b[0]));
    assert!(!can_connect(&a[1], &a[1]));
    assert!(can_connect(&a[0], &b[1]));
    assert!(!can_connect(&a[1], &b[1]));
}

#[test]
fn connection_relation_is_symmetric() {
    for f in corpus_files() {
        let p = corpus(&f);
        let lits: Vec<_> = p.clauses.iter().flat_map(|c| c.literals.iter()).collect();
        for a in &lits {
            for b in &lits {
                assert_eq!(can_connect(a, b), can_connect(b, a), "{f}");
            }
        }
        let table = ConnectionTable::new(&p);
        for c in &p.clauses {
            for i in 0..c.literals.len() {
                for &(d, j) in table.partners(c.id, i) {
                    assert!(table.connects((d, j), (c.id, i)));
                }
            }
        }
    }
}

#[test]
fn copies_share_no_variables() {
    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..50 {
        let (_, p) = random_problem(&mut rng);
        let mut seen = std::collections::HashSet::new();
        for c in &p.clauses {
            for k in 1..4 {
                for v in make_copy(c, k).vars {
                    assert!(seen.insert(v));
                }
            }
        }
    }
}

#[test]
fn printed_problems_reparse_identically() {
    let mut rng = StdRng::seed_from_u64(2);
    let mut problems: Vec<Problem> = corpus_files().iter().map(|f| corpus(f)).collect();
    problems.extend((0..50).map(|_| random_problem(&mut rng).1));
    for p in problems {
        let text = render(&p);
        let q = parse_problem(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        assert_eq!(render(&q), text);
        assert_eq!(q.clauses.len(), p.clauses.len());
        for (a, b) in p.clauses.iter().zip(&q.clauses) {
            assert_eq!(a.var_names, b.var_names);
            assert_eq!(a.role, b.role);
        }
    }
}

#[test]
fn includes_and_quoted_names() {
    let p = corpus("quoted.p");
    assert!(p.clauses.iter().any(|c| c.name == "the goal"));
    assert!(p.clauses.len() > 2, "included axioms missing");
}

#[test]
fn start_clauses() {
    let p = corpus("ex4.p");
    assert_eq!(select_start_clauses(&p, StartPolicy::Conjecture), [0]);
    assert_eq!(select_start_clauses(&p, StartPolicy::All), [0, 1, 2]);
    let q = parse_problem("cnf(a,axiom,p). cnf(b,axiom,~p).").unwrap();
    assert_eq!(select_start_clauses(&q, StartPolicy::Conjecture), [0, 1]);
}

#[test]
fn arity_clash_is_an_error() {
    let e = parse_problem("cnf(a,axiom,(p(X,Y))). cnf(b,axiom,(~p(X))).").unwrap_err();
    assert!(matches!(e, ParseError::Arity { .. }));
}

#[test]
fn equality_axioms() {
    let p = parse_problem("cnf(a,axiom,(f(X,Y) = g(X))). cnf(b,axiom,(p(X) | X != a)).").unwrap();
    let q = axiomatize_equality(&p);
    // reflexivity, symmetry, transitivity, f:2, g:1, p:1
    assert_eq!(q.clauses.len() - p.clauses.len(), 3 + 2 + 1 + 1);
    let plain = corpus("ex1.p");
    assert_eq!(axiomatize_equality(&plain), plain);
}
