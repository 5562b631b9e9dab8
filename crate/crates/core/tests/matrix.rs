use std::path::Path;

use connsat::encoding::SearchStats;
use connsat::matrix::{prove_matrix, MatrixEncoder, MatrixMode, MatrixOptions, MatrixOutcome, Symmetry};
use connsat::parse::load_problem;
use connsat::problem::ConnectionTable;
use connsat::proof::{check_proof, print_proof, CopyRef, LitRef};
use connsat::term::Problem;
use connsat_sat::Solver;

fn corpus(name: &str) -> Problem {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/problems");
    load_problem(&dir.join(name), Some(&dir)).unwrap()
}

fn sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v
}

fn opts(mode: MatrixMode, max_size: usize) -> MatrixOptions {
    MatrixOptions { mode, max_size, symmetry: Symmetry::default(), deadline: None }
}

#[test]
fn four_options_at_size_two() {
    let p = corpus("ex1.p");
    let table = ConnectionTable::new(&p);
    let mut solver = Solver::new();
    let mut enc = MatrixEncoder::em(&p, &table, 2, Symmetry::default(), &mut solver);
    let idx = enc.expand_selector(&mut solver, CopyRef { clause: 0, copy: 1 });
    assert_eq!(idx.len(), 2);
    let got = enc.describe_constraint(idx[1]);
    let want = vec![
        "S^1_neg & <p(f(Z^1)) ~ ~p(X^1)>",
        "S^1_neg & <p(f(Z^1)) ~ ~p(f(Y^1))>",
        "S^2_neg & <p(f(Z^1)) ~ ~p(X^2)>",
        "S^2_neg & <p(f(Z^1)) ~ ~p(f(Y^2))>",
    ];
    assert_eq!(got, want);
    // expanding again records nothing
    assert!(enc.expand_selector(&mut solver, CopyRef { clause: 0, copy: 1 }).is_empty());
}

#[test]
fn budget_two_adds_next_copy_of_negative_clause() {
    let p = corpus("ex1.p");
    let table = ConnectionTable::new(&p);
    let mut solver = Solver::new();
    let mut enc = MatrixEncoder::core(&p, &table, MatrixMode::Eu, Symmetry::default());
    enc.set_multiplicity(0, 2);
    enc.set_multiplicity(1, 2);
    let idx = enc.expand_selector(&mut solver, CopyRef { clause: 0, copy: 1 });
    let got = enc.describe_constraint(idx[1]);
    assert_eq!(got.len(), 5);
    assert_eq!(got[4], "S^3_neg");
    assert!(!got.iter().any(|d| d.contains("S^3_pos")));
}

#[test]
fn open_path_blocking_lists_outside_copies() {
    let p = corpus("ex1.p");
    let table = ConnectionTable::new(&p);
    let mut solver = Solver::new();
    let mut enc = MatrixEncoder::core(&p, &table, MatrixMode::Eu, Symmetry::default());
    enc.set_multiplicity(0, 2);
    enc.set_multiplicity(1, 2);
    let pos1 = CopyRef { clause: 0, copy: 1 };
    let neg1 = CopyRef { clause: 1, copy: 1 };
    let neg2 = CopyRef { clause: 1, copy: 2 };
    for c in [pos1, neg1, neg2] {
        enc.selector(&mut solver, c.clause, c.copy);
    }
    let path = [LitRef { copy: pos1, lit: 1 }, LitRef { copy: neg1, lit: 1 }, LitRef { copy: neg2, lit: 0 }];
    let idx = enc.block_path(&mut solver, &[pos1, neg1, neg2], &path);
    let got = enc.describe_constraint(idx);
    let mut want = vec![
        "<p(f(Z^1)) ~ ~p(f(Y^1))>",
        "<p(f(Z^1)) ~ ~p(X^2)>",
        "S^3_neg",
        "S^2_pos & <p(Z^2) ~ ~p(f(Y^1))>",
        "S^2_pos & <p(f(Z^2)) ~ ~p(f(Y^1))>",
        "S^3_pos",
        "S^2_pos & <p(Z^2) ~ ~p(X^2)>",
        "S^2_pos & <p(f(Z^2)) ~ ~p(X^2)>",
        "S^3_pos",
    ];
    want.sort();
    assert_eq!(sorted(got), want);
}

#[test]
fn example_one_needs_three_copies() {
    let p = corpus("ex1.p");
    let mut stats = SearchStats::default();
    assert_eq!(prove_matrix(&p, &opts(MatrixMode::Em, 2), &mut stats), MatrixOutcome::Exhausted(2));
    let MatrixOutcome::Proof(proof) = prove_matrix(&p, &opts(MatrixMode::Em, 3), &mut stats) else { panic!() };
    println!("{}", print_proof(&p, &proof));
    check_proof(&p, &proof).unwrap();
    assert_eq!(proof.size(), 3);
    assert_eq!(proof.copies.iter().filter(|c| c.clause == 0).count(), 1);
    assert_eq!(proof.connections.len(), 4);
}

#[test]
fn core_modes_find_example_one() {
    for mode in [MatrixMode::Eu, MatrixMode::Eh] {
        let p = corpus("ex1.p");
        let mut stats = SearchStats::default();
        let MatrixOutcome::Proof(proof) = prove_matrix(&p, &opts(mode, 16), &mut stats) else { panic!("{mode:?}") };
        check_proof(&p, &proof).unwrap();
        assert_eq!(proof.size(), 3);
        assert!(!stats.cores.is_empty());
    }
}

#[test]
fn example_four_uses_two_clauses() {
    let p = corpus("ex4.p");
    let mut stats = SearchStats::default();
    let MatrixOutcome::Proof(proof) = prove_matrix(&p, &opts(MatrixMode::Eu, 16), &mut stats) else { panic!() };
    check_proof(&p, &proof).unwrap();
    let names: Vec<&str> = proof.copies.iter().map(|c| p.clauses[c.clause].name.as_str()).collect();
    assert_eq!(names, ["c", "e"]);
    let d = p.clauses.iter().position(|c| c.name == "d").unwrap();
    let e = p.clauses.iter().position(|c| c.name == "e").unwrap();
    assert!(stats.cores.iter().any(|core| core.contains(&d)));
    assert_eq!(stats.multiplicities[e], 1);
    let MatrixOutcome::Proof(_) = prove_matrix(&p, &opts(MatrixMode::Em, 2), &mut SearchStats::default()) else { panic!() };
}

#[test]
fn non_theorem_has_empty_core() {
    let p = corpus("nonthm.p");
    for mode in [MatrixMode::Eu, MatrixMode::Eh] {
        let mut stats = SearchStats::default();
        assert_eq!(prove_matrix(&p, &opts(mode, 32), &mut stats), MatrixOutcome::NoProof);
    }
    assert_eq!(prove_matrix(&p, &opts(MatrixMode::Em, 4), &mut SearchStats::default()), MatrixOutcome::Exhausted(4));
}

#[test]
fn corpus_problems_with_all_modes() {
    for f in ["units.p", "chain.p", "grandparent.p", "prop4.p", "barber.p", "twocopies.p", "instance.p", "quoted.p"] {
        let p = corpus(f);
        for mode in [MatrixMode::Em, MatrixMode::Eu, MatrixMode::Eh] {
            let mut stats = SearchStats::default();
            match prove_matrix(&p, &opts(mode, 12), &mut stats) {
                MatrixOutcome::Proof(proof) => check_proof(&p, &proof).unwrap_or_else(|e| panic!("{f} {mode:?}: {e}")),
                other => panic!("{f} {mode:?}: {other:?}"),
            }
        }
    }
}

mod common;

#[test]
fn instance_pruning_keeps_the_proof_through_the_general_clause() {
    let p = corpus("instance.p");
    for mode in [MatrixMode::Em, MatrixMode::Eu, MatrixMode::Eh] {
        let MatrixOutcome::Proof(proof) = prove_matrix(&p, &opts(mode, 6), &mut SearchStats::default()) else { panic!() };
        let names: Vec<&str> = proof.copies.iter().map(|c| p.clauses[c.clause].name.as_str()).collect();
        assert_eq!(names, ["c", "e", "f"], "{mode:?}");
    }
}

#[test]
fn copies_of_one_clause_come_in_substitution_order() {
    let p = corpus("twocopies.p");
    let fmt = p.fmt().with_style(connsat::term::VarStyle::Qualified);
    for mode in [MatrixMode::Em, MatrixMode::Eu, MatrixMode::Eh] {
        let MatrixOutcome::Proof(proof) = prove_matrix(&p, &opts(mode, 6), &mut SearchStats::default()) else { panic!() };
        let bound: Vec<String> =
            proof.substitution.iter().filter(|(v, _)| v.clause == 0).map(|(v, t)| format!("{} := {}", fmt.var(*v), fmt.term(t))).collect();
        assert_eq!(bound, ["X@ax.1 := a", "X@ax.2 := b"], "{mode:?}");
    }
}

#[test]
fn duplicate_ground_copies_are_never_both_selected() {
    let p = connsat::parse::parse_problem("cnf(g,negated_conjecture,(~p | ~q)). cnf(a,axiom,p). cnf(b,axiom,q).").unwrap();
    for sym in [Symmetry::default(), Symmetry { subsumption: true, ..Symmetry::none() }] {
        let o = MatrixOptions { symmetry: sym, ..opts(MatrixMode::Em, 4) };
        let MatrixOutcome::Proof(proof) = prove_matrix(&p, &o, &mut SearchStats::default()) else { panic!() };
        assert_eq!(proof.size(), 3);
    }
}

#[test]
fn core_modes_agree_with_brute_force() {
    use rand::SeedableRng;
    let mut rng = rand::rngs::StdRng::seed_from_u64(21);
    let mut provable = 0;
    for _ in 0..1000 {
        let (text, p) = common::random_problem(&mut rng);
        if !common::axioms_consistent(&p, 4) {
            continue;
        }
        let Some(_) = common::minimal_size(&p, 4) else { continue };
        provable += 1;
        for mode in [MatrixMode::Eu, MatrixMode::Eh] {
            match prove_matrix(&p, &opts(mode, 10), &mut SearchStats::default()) {
                MatrixOutcome::Proof(proof) => check_proof(&p, &proof).unwrap(),
                other => panic!("{mode:?} {other:?}\n{text}"),
            }
        }
    }
    assert!(provable > 40, "{provable}");
}
