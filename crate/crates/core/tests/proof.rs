mod common;

use common::corpus;
use connsat::encoding::SearchStats;
use connsat::matrix::{prove_matrix, MatrixMode, MatrixOptions, MatrixOutcome, Symmetry};
use connsat::proof::{check_proof, parse_proof, print_proof, resolved_substitution, Connection, CopyRef, LitRef, Proof, ProofError};
use connsat::tableau::{prove_tableau, TableauOutcome};
use connsat::term::Problem;
use connsat::unify::SubstitutionStore;

fn example_one_proof(p: &Problem) -> Proof {
    let opts = MatrixOptions { mode: MatrixMode::Em, max_size: 3, symmetry: Symmetry::default(), deadline: None };
    let MatrixOutcome::Proof(proof) = prove_matrix(p, &opts, &mut SearchStats::default()) else { panic!() };
    proof
}

/// A proof object built from explicit connections, with the substitution
/// they induce.
fn from_connections(p: &Problem, copies: &[CopyRef], conns: &[(LitRef, LitRef)]) -> Proof {
    let mut store = SubstitutionStore::new();
    let mut proof = Proof { copies: copies.to_vec(), ..Default::default() };
    for &(a, b) in conns {
        store.assert_connection(&proof.literal(p, a), &proof.literal(p, b), 0).unwrap();
        proof.connections.push(Connection::new(a, b));
    }
    let vars = copies.iter().flat_map(|c| p.clauses[c.clause].var_vector(c.copy));
    proof.substitution = resolved_substitution(&store, vars);
    proof.normalize();
    proof
}

#[test]
fn example_one_proof_listing() {
    let p = corpus("ex1.p");
    let proof = example_one_proof(&p);
    check_proof(&p, &proof).unwrap();
    let text = print_proof(&p, &proof);
    let section = |name: &str| -> usize {
        let mut lines = text.lines().skip_while(|l| *l != name).skip(1);
        lines.by_ref().take_while(|l| l.starts_with("  ")).count()
    };
    assert_eq!(section("copies:"), 3);
    assert_eq!(section("connections:"), 4);
    // four of the five variables are bound
    assert_eq!(section("substitution:"), 4);
}

#[test]
fn open_matrix_is_rejected_with_witness() {
    let p = corpus("ex1.p");
    let pos1 = CopyRef { clause: 0, copy: 1 };
    let neg1 = CopyRef { clause: 1, copy: 1 };
    let neg2 = CopyRef { clause: 1, copy: 2 };
    let l = |c, i| LitRef { copy: c, lit: i };
    let proof = from_connections(
        &p,
        &[pos1, neg1, neg2],
        &[(l(pos1, 0), l(neg1, 0)), (l(pos1, 0), l(neg1, 1)), (l(pos1, 1), l(neg2, 1)), (l(pos1, 0), l(neg2, 0))],
    );
    let Err(ProofError::OpenPath(witness)) = check_proof(&p, &proof) else { panic!() };
    assert_eq!(witness.len(), 3);
    // the path P(f(z1)), ~P(f(y1)), ~P(x2) is open as well
    let path = [l(pos1, 1), l(neg1, 1), l(neg2, 0)];
    for a in path {
        for b in path {
            assert!(!proof.connections.contains(&Connection::new(a, b)));
        }
    }
}

#[test]
fn deleting_any_connection_opens_a_path() {
    let p = corpus("ex1.p");
    let proof = example_one_proof(&p);
    for i in 0..proof.connections.len() {
        let mut broken = proof.clone();
        broken.connections.remove(i);
        assert!(matches!(check_proof(&p, &broken), Err(ProofError::OpenPath(_))));
    }
}

#[test]
fn wrong_substitution_is_rejected() {
    let p = corpus("ex4.p");
    let c = CopyRef { clause: 0, copy: 1 };
    let e = CopyRef { clause: 2, copy: 1 };
    let mut proof = from_connections(&p, &[c, e], &[(LitRef { copy: c, lit: 0 }, LitRef { copy: e, lit: 0 })]);
    assert_eq!(proof.substitution.len(), 1);
    check_proof(&p, &proof).unwrap();
    proof.substitution.clear();
    assert!(matches!(check_proof(&p, &proof), Err(ProofError::NotDual(_))));
}

#[test]
fn unit_proof_listing() {
    let p = corpus("units.p");
    let opts = MatrixOptions { mode: MatrixMode::Eu, max_size: 4, symmetry: Symmetry::default(), deadline: None };
    let MatrixOutcome::Proof(proof) = prove_matrix(&p, &opts, &mut SearchStats::default()) else { panic!() };
    assert_eq!((proof.size(), proof.substitution.len(), proof.connections.len()), (2, 0, 1));
}

#[test]
fn non_start_proof_is_rejected() {
    let p = corpus("ex4.p");
    let d = CopyRef { clause: 1, copy: 1 };
    let e = CopyRef { clause: 2, copy: 1 };
    let c = CopyRef { clause: 0, copy: 1 };
    let good = from_connections(&p, &[c, d, e], &[
        (LitRef { copy: c, lit: 0 }, LitRef { copy: d, lit: 0 }),
        (LitRef { copy: d, lit: 1 }, LitRef { copy: e, lit: 0 }),
    ]);
    check_proof(&p, &good).unwrap();
    let mut q = p.clone();
    q.start = vec![1];
    let bad = from_connections(&q, &[e], &[]);
    assert!(check_proof(&q, &bad).is_err());
}

#[test]
fn printouts_round_trip() {
    for f in ["ex1.p", "ex4.p", "chain.p", "grandparent.p", "twocopies.p", "quoted.p", "barber.p"] {
        let p = corpus(f);
        let mut proofs = Vec::new();
        if let TableauOutcome::Proof(t) = prove_tableau(&p, &[1, 2, 3, 4], false, None, &mut SearchStats::default()) {
            proofs.push(t);
        }
        let opts = MatrixOptions { mode: MatrixMode::Eu, max_size: 12, symmetry: Symmetry::default(), deadline: None };
        if let MatrixOutcome::Proof(m) = prove_matrix(&p, &opts, &mut SearchStats::default()) {
            proofs.push(m);
        }
        assert!(!proofs.is_empty(), "{f}");
        for proof in proofs {
            let text = print_proof(&p, &proof);
            let back = parse_proof(&p, &text).unwrap_or_else(|e| panic!("{f}: {e:?}\n{text}"));
            assert_eq!(back, proof, "{f}");
            assert_eq!(print_proof(&p, &back), text);
            check_proof(&p, &back).unwrap();
        }
    }
}

#[test]
fn malformed_printouts_are_rejected() {
    let p = corpus("ex4.p");
    for text in ["copies:\n  zz.1: p(a)\n", "copies:\n  c.1: p(b)\n", "bogus:\n", "copies:\n  c.x: p(a)\n"] {
        assert!(parse_proof(&p, text).is_err(), "{text}");
    }
}
