//! DIMACS CNF reading and writing.

use std::fmt::Write as _;

use crate::lit::Lit;
use crate::solver::Solver;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// Parsed DIMACS problem: declared variable count and clauses.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn parse(text: &str) -> Result<Cnf, DimacsError> {
        let mut cnf = Cnf::default();
        let mut current = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return Err(DimacsError::Syntax { line: i + 1, msg: "malformed header".into() });
                }
                cnf.num_vars = parts[1]
                    .parse()
                    .map_err(|_| DimacsError::Syntax { line: i + 1, msg: "bad variable count".into() })?;
                continue;
            }
            for tok in line.split_whitespace() {
                let x: i64 = tok
                    .parse()
                    .map_err(|_| DimacsError::Syntax { line: i + 1, msg: format!("bad literal `{tok}`") })?;
                match Lit::from_dimacs(x) {
                    None => cnf.clauses.push(std::mem::take(&mut current)),
                    Some(l) => {
                        cnf.num_vars = cnf.num_vars.max(l.var().index() + 1);
                        current.push(l);
                    }
                }
            }
        }
        if !current.is_empty() {
            cnf.clauses.push(current);
        }
        Ok(cnf)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                write!(out, "{} ", l.to_dimacs()).unwrap();
            }
            out.push_str("0\n");
        }
        out
    }

    /// Fresh solver holding these clauses.
    pub fn into_solver(&self) -> Solver {
        let mut s = Solver::new();
        while s.num_vars() < self.num_vars {
            s.new_var();
        }
        for c in &self.clauses {
            s.add_clause(c);
        }
        s
    }
}

impl Solver {
    /// Original clauses of the solver in DIMACS form.
    pub fn to_dimacs(&self) -> String {
        Cnf { num_vars: self.num_vars(), clauses: self.original_clauses() }.to_dimacs()
    }
}
