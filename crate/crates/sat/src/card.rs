//! Cardinality constraints by sequential counters.

use crate::lit::Lit;
use crate::solver::Solver;

impl Solver {
    /// Constrain exactly `k` of `lits` to be true.
    ///
    /// Counter variable `s[i][j]` holds iff at least `j` of the first `i`
    /// inputs are true; both directions are encoded so the counter is fully
    /// determined by the inputs.
    pub fn add_exactly_k(&mut self, lits: &[Lit], k: usize) {
        let n = lits.len();
        if k > n {
            self.add_clause(&[]);
            return;
        }
        let t = self.define(&crate::Formula::And(Vec::new()));
        // row[j] for j in 0..=k+1 over the first i inputs
        let mut row: Vec<Lit> = (0..=k + 1).map(|j| if j == 0 { t } else { !t }).collect();
        for &x in lits {
            let mut next = Vec::with_capacity(k + 2);
            next.push(t);
            for j in 1..=k + 1 {
                let keep = row[j];
                let step = row[j - 1];
                let s = self.new_var().pos();
                // s <-> keep | (x & step)
                self.add_clause(&[!keep, s]);
                self.add_clause(&[!x, !step, s]);
                self.add_clause(&[!s, keep, x]);
                self.add_clause(&[!s, keep, step]);
                next.push(s);
            }
            row = next;
        }
        self.add_clause(&[row[k]]);
        self.add_clause(&[!row[k + 1]]);
    }
}
