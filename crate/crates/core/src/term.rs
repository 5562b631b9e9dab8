//! First-order syntax: symbols, terms, literals, clauses and problems.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredId(pub u32);

/// A variable is owned by one clause copy. Copy 0 is the input clause
/// itself; `pos` is the index in first-occurrence order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub clause: u32,
    pub copy: u32,
    pub pos: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    App(FunId, Arc<[Term]>),
}

impl Term {
    pub fn constant(f: FunId) -> Term {
        Term::App(f, Arc::from(Vec::new()))
    }

    pub fn app(f: FunId, args: Vec<Term>) -> Term {
        Term::App(f, Arc::from(args))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn contains_var(&self, v: Var) -> bool {
        match self {
            Term::Var(w) => *w == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    /// Push variables in left-to-right order, repeats included.
    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => out.push(*v),
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Move every variable into copy `copy` of its clause.
    pub fn rename(&self, copy: u32) -> Term {
        match self {
            Term::Var(v) => Term::Var(Var { copy, ..*v }),
            Term::App(_, args) if args.is_empty() => self.clone(),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| a.rename(copy)).collect()),
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Term {
        match self {
            Term::Var(v) => f(*v),
            Term::App(_, args) if args.is_empty() => self.clone(),
            Term::App(g, args) => Term::App(*g, args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub positive: bool,
    pub pred: PredId,
    pub args: Arc<[Term]>,
}

impl Literal {
    pub fn new(positive: bool, pred: PredId, args: Vec<Term>) -> Literal {
        Literal { positive, pred, args: Arc::from(args) }
    }

    pub fn rename(&self, copy: u32) -> Literal {
        Literal { positive: self.positive, pred: self.pred, args: self.args.iter().map(|a| a.rename(copy)).collect() }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Literal {
        Literal { positive: self.positive, pred: self.pred, args: self.args.iter().map(|a| a.map_vars(f)).collect() }
    }

    pub fn negated(&self) -> Literal {
        Literal { positive: !self.positive, ..self.clone() }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Axiom,
    Conjecture,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub id: usize,
    pub name: String,
    pub role: Role,
    pub literals: Vec<Literal>,
    /// Source names of the variables, indexed by `Var::pos`.
    pub var_names: Vec<String>,
}

impl Clause {
    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn is_ground(&self) -> bool {
        self.var_names.is_empty()
    }

    /// The variable vector x̄ of copy `copy`, in first-occurrence order.
    pub fn var_vector(&self, copy: u32) -> Vec<Var> {
        (0..self.num_vars() as u32).map(|pos| Var { clause: self.id as u32, copy, pos }).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Function,
    Predicate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
    pub arity: usize,
}

/// Function and predicate symbols. The index of a function symbol is its
/// precedence in the term order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    funcs: Vec<Symbol>,
    preds: Vec<Symbol>,
    func_index: HashMap<String, FunId>,
    pred_index: HashMap<String, PredId>,
}

pub const EQUALITY: &str = "=";

impl SymbolTable {
    pub fn new() -> SymbolTable {
        SymbolTable::default()
    }

    /// Look up or insert; `Err` carries the previously recorded arity.
    pub fn function(&mut self, name: &str, arity: usize) -> Result<FunId, usize> {
        if let Some(&id) = self.func_index.get(name) {
            let known = self.funcs[id.0 as usize].arity;
            return if known == arity { Ok(id) } else { Err(known) };
        }
        let id = FunId(self.funcs.len() as u32);
        self.funcs.push(Symbol { name: name.to_string(), kind: SymbolKind::Function, arity });
        self.func_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn predicate(&mut self, name: &str, arity: usize) -> Result<PredId, usize> {
        if let Some(&id) = self.pred_index.get(name) {
            let known = self.preds[id.0 as usize].arity;
            return if known == arity { Ok(id) } else { Err(known) };
        }
        let id = PredId(self.preds.len() as u32);
        self.preds.push(Symbol { name: name.to_string(), kind: SymbolKind::Predicate, arity });
        self.pred_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn find_function(&self, name: &str) -> Option<FunId> {
        self.func_index.get(name).copied()
    }

    pub fn find_predicate(&self, name: &str) -> Option<PredId> {
        self.pred_index.get(name).copied()
    }

    pub fn func(&self, f: FunId) -> &Symbol {
        &self.funcs[f.0 as usize]
    }

    pub fn pred(&self, p: PredId) -> &Symbol {
        &self.preds[p.0 as usize]
    }

    pub fn functions(&self) -> impl Iterator<Item = (FunId, &Symbol)> {
        self.funcs.iter().enumerate().map(|(i, s)| (FunId(i as u32), s))
    }

    pub fn predicates(&self) -> impl Iterator<Item = (PredId, &Symbol)> {
        self.preds.iter().enumerate().map(|(i, s)| (PredId(i as u32), s))
    }

    pub fn equality(&self) -> Option<PredId> {
        self.find_predicate(EQUALITY)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub symbols: SymbolTable,
    pub clauses: Vec<Clause>,
    /// Ids of the clauses allowed as start clauses.
    pub start: Vec<usize>,
    /// Names of input clauses without literals. Any such clause makes the
    /// input trivially unsatisfiable.
    pub empty_clauses: Vec<String>,
}

impl Problem {
    pub fn has_equality(&self) -> bool {
        let Some(eq) = self.symbols.equality() else { return false };
        self.clauses.iter().any(|c| c.literals.iter().any(|l| l.pred == eq))
    }

    pub fn clause_by_name(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }

    pub fn is_start(&self, clause: usize) -> bool {
        self.start.contains(&clause)
    }

    /// Display helper for terms and literals of this problem.
    pub fn fmt(&self) -> Fmt<'_> {
        Fmt { problem: self, style: VarStyle::Source }
    }
}

/// How variables are rendered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarStyle {
    /// Source name only (suitable for input clauses).
    Source,
    /// `X^k`, the source name with the copy index as superscript.
    Superscript,
    /// `X@name.k`, unambiguous across clauses.
    Qualified,
}

#[derive(Clone, Copy)]
pub struct Fmt<'a> {
    pub problem: &'a Problem,
    pub style: VarStyle,
}

fn needs_quotes(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => !chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        Some(c) if c.is_ascii_digit() => !name.chars().all(|c| c.is_ascii_digit()),
        Some('"') => false,
        _ => true,
    }
}

/// A TPTP name, single-quoted when it is not a plain lower-case word.
pub fn atom_name(name: &str) -> String {
    if needs_quotes(name) {
        format!("'{}'", name.replace('\\', "\\\\").replace('\'', "\\'"))
    } else {
        name.to_string()
    }
}

impl<'a> Fmt<'a> {
    pub fn with_style(self, style: VarStyle) -> Fmt<'a> {
        Fmt { style, ..self }
    }

    pub fn var(&self, v: Var) -> String {
        let clause = &self.problem.clauses[v.clause as usize];
        let name = clause.var_names.get(v.pos as usize).map(String::as_str).unwrap_or("_");
        match self.style {
            VarStyle::Source => name.to_string(),
            VarStyle::Superscript => format!("{name}^{}", v.copy),
            VarStyle::Qualified => format!("{name}@{}.{}", atom_name(&clause.name), v.copy),
        }
    }

    pub fn term(&self, t: &Term) -> String {
        let mut s = String::new();
        self.write_term(&mut s, t);
        s
    }

    fn write_term(&self, out: &mut String, t: &Term) {
        match t {
            Term::Var(v) => out.push_str(&self.var(*v)),
            Term::App(f, args) => {
                out.push_str(&atom_name(&self.problem.symbols.func(*f).name));
                if !args.is_empty() {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        self.write_term(out, a);
                    }
                    out.push(')');
                }
            }
        }
    }

    pub fn literal(&self, l: &Literal) -> String {
        let mut s = String::new();
        let sym = self.problem.symbols.pred(l.pred);
        if sym.name == EQUALITY && l.args.len() == 2 {
            self.write_term(&mut s, &l.args[0]);
            s.push_str(if l.positive { " = " } else { " != " });
            self.write_term(&mut s, &l.args[1]);
            return s;
        }
        if !l.positive {
            s.push('~');
        }
        s.push_str(&atom_name(&sym.name));
        if !l.args.is_empty() {
            s.push('(');
            for (i, a) in l.args.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                self.write_term(&mut s, a);
            }
            s.push(')');
        }
        s
    }

    pub fn literals(&self, lits: &[Literal]) -> String {
        let mut s = String::new();
        for (i, l) in lits.iter().enumerate() {
            if i > 0 {
                s.push_str(" | ");
            }
            s.push_str(&self.literal(l));
        }
        s
    }
}

impl fmt::Display for Problem {
    /// TPTP CNF rendering; reparses to an equal problem.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.fmt();
        let mut out = String::new();
        for c in &self.clauses {
            let role = match c.role {
                Role::Conjecture => "negated_conjecture",
                Role::Axiom => "axiom",
            };
            writeln!(out, "cnf({}, {}, ({})).", atom_name(&c.name), role, p.literals(&c.literals))?;
        }
        for name in &self.empty_clauses {
            writeln!(out, "cnf({}, axiom, ($false)).", atom_name(name))?;
        }
        f.write_str(&out)
    }
}
