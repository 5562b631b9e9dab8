use std::fmt;

use crate::lit::Lit;

/// Boolean formula over solver literals, as accepted by
/// [`Solver::propagate_constraint`](crate::Solver::propagate_constraint).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Lit(Lit),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn and_lits(lits: impl IntoIterator<Item = Lit>) -> Formula {
        Formula::And(lits.into_iter().map(Formula::Lit).collect())
    }

    pub fn or_lits(lits: impl IntoIterator<Item = Lit>) -> Formula {
        Formula::Or(lits.into_iter().map(Formula::Lit).collect())
    }

    /// Evaluate under a total assignment.
    pub fn eval(&self, value: &impl Fn(Lit) -> bool) -> bool {
        match self {
            Formula::Lit(l) => value(*l),
            Formula::And(fs) => fs.iter().all(|f| f.eval(value)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(value)),
        }
    }
}

impl From<Lit> for Formula {
    fn from(l: Lit) -> Self {
        Formula::Lit(l)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, items: &[Formula], op: &str, empty: &str| {
            if items.is_empty() {
                return write!(f, "{empty}");
            }
            write!(f, "(")?;
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{it}")?;
            }
            write!(f, ")")
        };
        match self {
            Formula::Lit(l) => write!(f, "{l}"),
            Formula::And(items) => join(f, items, "&", "true"),
            Formula::Or(items) => join(f, items, "|", "false"),
        }
    }
}
