#![allow(dead_code)]

use connsat_sat::Lit;
use rand::Rng;

/// Satisfiability by chronological backtracking over variables in index
/// order, pruning as soon as a clause is falsified.
pub fn brute_force(num_vars: usize, clauses: &[Vec<Lit>]) -> Option<Vec<bool>> {
    let mut vals: Vec<Option<bool>> = vec![None; num_vars];
    fn falsified(clauses: &[Vec<Lit>], vals: &[Option<bool>]) -> bool {
        clauses.iter().any(|c| {
            c.iter().all(|l| vals[l.var().index()].is_some_and(|v| v != l.is_positive()))
        })
    }
    fn go(i: usize, clauses: &[Vec<Lit>], vals: &mut Vec<Option<bool>>) -> bool {
        if falsified(clauses, vals) {
            return false;
        }
        if i == vals.len() {
            return true;
        }
        for b in [false, true] {
            vals[i] = Some(b);
            if go(i + 1, clauses, vals) {
                return true;
            }
        }
        vals[i] = None;
        false
    }
    if go(0, clauses, &mut vals) {
        Some(vals.into_iter().map(|v| v.unwrap_or(false)).collect())
    } else {
        None
    }
}

pub fn random_3cnf(rng: &mut impl Rng, num_vars: usize, num_clauses: usize) -> Vec<Vec<Lit>> {
    (0..num_clauses)
        .map(|_| {
            (0..3)
                .map(|_| {
                    let v = rng.gen_range(0..num_vars) as i64 + 1;
                    Lit::from_dimacs(if rng.gen_bool(0.5) { v } else { -v }).unwrap()
                })
                .collect()
        })
        .collect()
}
