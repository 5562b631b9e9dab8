//! Decoded proofs, the independent proof checker, and the text format.
//!
//! The checker deliberately shares nothing with the encoders beyond the
//! syntax types and the unifier: path closure is decided by the listed
//! connections, not by duality under the substitution.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::term::{atom_name, Literal, Problem, Term, Var, VarStyle};
use crate::unify::SubstitutionStore;

/// A clause copy `name.k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CopyRef {
    pub clause: usize,
    pub copy: u32,
}

/// A literal of a clause copy, printed `name.k[i]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LitRef {
    pub copy: CopyRef,
    pub lit: usize,
}

impl LitRef {
    pub fn new(clause: usize, copy: u32, lit: usize) -> LitRef {
        LitRef { copy: CopyRef { clause, copy }, lit }
    }
}

/// Unordered pair of literal occurrences; `a <= b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Connection {
    pub a: LitRef,
    pub b: LitRef,
}

impl Connection {
    pub fn new(x: LitRef, y: LitRef) -> Connection {
        if x <= y {
            Connection { a: x, b: y }
        } else {
            Connection { a: y, b: x }
        }
    }
}

/// How a literal of a tableau node is closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Closure {
    /// The literal connected to the parent leaf.
    Entry,
    Extension(TreeNode),
    /// Connected to a literal on the branch above.
    Reduction(LitRef),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub copy: CopyRef,
    /// Literal connected to the parent leaf; `None` at the root.
    pub entry: Option<usize>,
    /// One closure per literal of the clause.
    pub closures: Vec<Closure>,
}

impl TreeNode {
    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a TreeNode)) {
        f(self);
        for c in &self.closures {
            if let Closure::Extension(child) = c {
                child.visit(f);
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Proof {
    /// Selected copies, sorted.
    pub copies: Vec<CopyRef>,
    /// Idempotent substitution, sorted by variable.
    pub substitution: Vec<(Var, Term)>,
    /// Sorted and deduplicated.
    pub connections: Vec<Connection>,
    /// Present for tableau proofs.
    pub tree: Option<TreeNode>,
}

impl Proof {
    pub fn size(&self) -> usize {
        self.copies.len()
    }

    pub fn copy_literals(&self, p: &Problem, c: CopyRef) -> Vec<Literal> {
        p.clauses[c.clause].literals.iter().map(|l| l.rename(c.copy)).collect()
    }

    pub fn literal(&self, p: &Problem, r: LitRef) -> Literal {
        p.clauses[r.copy.clause].literals[r.lit].rename(r.copy.copy)
    }

    /// Sort and deduplicate every list.
    pub fn normalize(&mut self) {
        self.copies.sort_unstable();
        self.copies.dedup();
        self.substitution.sort_by_key(|a| a.0);
        self.substitution.dedup_by(|a, b| a.0 == b.0);
        self.connections.sort_unstable();
        self.connections.dedup();
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("no clause copies")]
    Empty,
    #[error("reference to a clause copy or literal outside the problem: {0}")]
    BadReference(String),
    #[error("connection {0} references a copy that is not part of the proof")]
    StrayConnection(String),
    #[error("connections are not simultaneously unifiable; first failure at {0}")]
    Inconsistent(String),
    #[error("substitution is cyclic at {0}")]
    CyclicSubstitution(String),
    #[error("connection {0} is not complementary under the substitution")]
    NotDual(String),
    #[error("open path: {}", .0.join(", "))]
    OpenPath(Vec<String>),
    #[error("no start clause in the proof")]
    NoStartClause,
    #[error("malformed tableau: {0}")]
    Tableau(String),
}

fn label(p: &Problem, c: CopyRef) -> String {
    format!("{}.{}", atom_name(&p.clauses[c.clause].name), c.copy)
}

fn lit_label(p: &Problem, r: LitRef) -> String {
    format!("{}[{}]", label(p, r.copy), r.lit)
}

fn conn_label(p: &Problem, c: &Connection) -> String {
    format!("{} ~ {}", lit_label(p, c.a), lit_label(p, c.b))
}

fn apply(sigma: &HashMap<Var, Term>, t: &Term, depth: usize) -> Option<Term> {
    if depth > sigma.len() + 1 {
        return None;
    }
    match t {
        Term::Var(v) => match sigma.get(v) {
            Some(s) => apply(sigma, s, depth + 1),
            None => Some(t.clone()),
        },
        Term::App(f, args) => {
            let args: Option<Vec<Term>> = args.iter().map(|a| apply(sigma, a, depth)).collect();
            Some(Term::app(*f, args?))
        }
    }
}

fn apply_literal(sigma: &HashMap<Var, Term>, l: &Literal) -> Option<Literal> {
    let args: Option<Vec<Term>> = l.args.iter().map(|a| apply(sigma, a, 0)).collect();
    Some(Literal::new(l.positive, l.pred, args?))
}

/// Verify that `proof` is a proof of `p`. Returns the first violated
/// condition.
pub fn check_proof(p: &Problem, proof: &Proof) -> Result<(), ProofError> {
    if proof.copies.is_empty() {
        return Err(ProofError::Empty);
    }
    let copies: HashSet<CopyRef> = proof.copies.iter().copied().collect();
    for c in &proof.copies {
        if c.clause >= p.clauses.len() || c.copy == 0 {
            return Err(ProofError::BadReference(format!("clause {} copy {}", c.clause, c.copy)));
        }
    }
    for c in &proof.connections {
        for r in [c.a, c.b] {
            if r.copy.clause >= p.clauses.len() || r.lit >= p.clauses[r.copy.clause].literals.len() {
                return Err(ProofError::BadReference(format!("{r:?}")));
            }
            if !copies.contains(&r.copy) {
                return Err(ProofError::StrayConnection(conn_label(p, c)));
            }
        }
    }
    for (v, _) in &proof.substitution {
        if v.clause as usize >= p.clauses.len() || v.pos as usize >= p.clauses[v.clause as usize].num_vars() {
            return Err(ProofError::BadReference(format!("{v:?}")));
        }
    }

    // (a) the connections have a simultaneous unifier
    let mut store = SubstitutionStore::new();
    for (i, c) in proof.connections.iter().enumerate() {
        if store.assert_connection(&proof.literal(p, c.a), &proof.literal(p, c.b), i as u32).is_err() {
            return Err(ProofError::Inconsistent(conn_label(p, c)));
        }
    }

    // (b) the stated substitution closes every connection
    let sigma: HashMap<Var, Term> = proof.substitution.iter().cloned().collect();
    let fmt = p.fmt().with_style(VarStyle::Qualified);
    for c in &proof.connections {
        let la = apply_literal(&sigma, &proof.literal(p, c.a));
        let lb = apply_literal(&sigma, &proof.literal(p, c.b));
        let (Some(la), Some(lb)) = (la, lb) else {
            let v = proof.substitution.first().map(|(v, _)| fmt.var(*v)).unwrap_or_default();
            return Err(ProofError::CyclicSubstitution(v));
        };
        if la.positive == lb.positive || la.pred != lb.pred || la.args != lb.args {
            return Err(ProofError::NotDual(conn_label(p, c)));
        }
    }

    // (c) spanning
    match &proof.tree {
        None => {
            if let Some(path) = open_path_by_connections(p, proof) {
                return Err(ProofError::OpenPath(path.iter().map(|r| lit_label(p, *r)).collect()));
            }
        }
        Some(root) => check_tree(p, proof, root)?,
    }

    // (d)
    let has_start = match &proof.tree {
        Some(root) => p.is_start(root.copy.clause),
        None => proof.copies.iter().any(|c| p.is_start(c.clause)),
    };
    if !has_start {
        return Err(ProofError::NoStartClause);
    }
    Ok(())
}

/// Exhaustive path enumeration where a path is closed when it contains both
/// ends of a listed connection.
pub fn open_path_by_connections(p: &Problem, proof: &Proof) -> Option<Vec<LitRef>> {
    let conns: HashSet<(LitRef, LitRef)> = proof.connections.iter().flat_map(|c| [(c.a, c.b), (c.b, c.a)]).collect();
    let mut path = Vec::new();
    fn go(
        p: &Problem,
        copies: &[CopyRef],
        conns: &HashSet<(LitRef, LitRef)>,
        path: &mut Vec<LitRef>,
    ) -> bool {
        let Some((&c, rest)) = copies.split_first() else { return true };
        for i in 0..p.clauses[c.clause].literals.len() {
            let r = LitRef { copy: c, lit: i };
            if path.iter().any(|q| conns.contains(&(*q, r))) {
                continue;
            }
            path.push(r);
            if go(p, rest, conns, path) {
                return true;
            }
            path.pop();
        }
        false
    }
    go(p, &proof.copies, &conns, &mut path).then_some(path)
}

fn check_tree(p: &Problem, proof: &Proof, root: &TreeNode) -> Result<(), ProofError> {
    let bad = |msg: String| Err(ProofError::Tableau(msg));
    if root.entry.is_some() {
        return bad("root has an entry literal".into());
    }
    if !p.is_start(root.copy.clause) {
        return bad(format!("root {} is not a start clause", label(p, root.copy)));
    }
    let mut seen = Vec::new();
    root.visit(&mut |n| seen.push(n.copy));
    let mut sorted = seen.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != seen.len() {
        return bad("a clause copy occurs twice in the tree".into());
    }
    if sorted != proof.copies {
        return bad("tree copies differ from the listed copies".into());
    }
    let conns: HashSet<Connection> = proof.connections.iter().copied().collect();
    let mut branch = Vec::new();
    node_ok(p, root, &conns, &mut branch)
}

fn node_ok(p: &Problem, n: &TreeNode, conns: &HashSet<Connection>, branch: &mut Vec<LitRef>) -> Result<(), ProofError> {
    let bad = |msg: String| Err(ProofError::Tableau(msg));
    let width = p.clauses[n.copy.clause].literals.len();
    if n.closures.len() != width {
        return bad(format!("{} lists {} closures for {} literals", label(p, n.copy), n.closures.len(), width));
    }
    for (i, c) in n.closures.iter().enumerate() {
        let me = LitRef { copy: n.copy, lit: i };
        match c {
            Closure::Entry => {
                if n.entry != Some(i) {
                    return bad(format!("{} is not the entry literal", lit_label(p, me)));
                }
            }
            Closure::Reduction(target) => {
                if !branch.contains(target) {
                    return bad(format!("reduction from {} to {} which is not on its branch", lit_label(p, me), lit_label(p, *target)));
                }
                if !conns.contains(&Connection::new(me, *target)) {
                    return bad(format!("reduction {} ~ {} is not a listed connection", lit_label(p, me), lit_label(p, *target)));
                }
            }
            Closure::Extension(child) => {
                let Some(j) = child.entry else { return bad(format!("extension below {} has no entry", lit_label(p, me))) };
                if j >= child.closures.len() || child.closures[j] != Closure::Entry {
                    return bad(format!("entry literal of {} is not marked", label(p, child.copy)));
                }
                let entry = LitRef { copy: child.copy, lit: j };
                if !conns.contains(&Connection::new(me, entry)) {
                    return bad(format!("extension {} ~ {} is not a listed connection", lit_label(p, me), lit_label(p, entry)));
                }
                branch.push(me);
                let r = node_ok(p, child, conns, branch);
                branch.pop();
                r?;
            }
        }
    }
    if n.entry.is_some_and(|j| j >= width) {
        return bad(format!("entry index out of range in {}", label(p, n.copy)));
    }
    Ok(())
}

/// Deterministic text rendering; [`parse_proof`] reads it back.
pub fn print_proof(p: &Problem, proof: &Proof) -> String {
    let fmt = p.fmt().with_style(VarStyle::Qualified);
    let mut out = String::new();
    out.push_str("copies:\n");
    for c in &proof.copies {
        let _ = writeln!(out, "  {}: {}", label(p, *c), fmt.literals(&proof.copy_literals(p, *c)));
    }
    out.push_str("substitution:\n");
    for (v, t) in &proof.substitution {
        let _ = writeln!(out, "  {} := {}", fmt.var(*v), fmt.term(t));
    }
    out.push_str("connections:\n");
    for c in &proof.connections {
        let _ = writeln!(out, "  {}", conn_label(p, c));
    }
    if let Some(root) = &proof.tree {
        out.push_str("tree:\n");
        let _ = writeln!(out, "  {}", label(p, root.copy));
        print_node(p, root, 2, &mut out);
    }
    out
}

fn print_node(p: &Problem, n: &TreeNode, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    for (i, c) in n.closures.iter().enumerate() {
        match c {
            Closure::Entry => {}
            Closure::Reduction(t) => {
                let _ = writeln!(out, "{pad}[{i}] reduction {}", lit_label(p, *t));
            }
            Closure::Extension(child) => {
                let entry = LitRef { copy: child.copy, lit: child.entry.unwrap_or(0) };
                let _ = writeln!(out, "{pad}[{i}] extension {}", lit_label(p, entry));
                print_node(p, child, depth + 1, out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("proof line {line}: {msg}")]
pub struct ProofParseError {
    pub line: usize,
    pub msg: String,
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Cursor<'a> {
        Cursor { s, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), String> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(format!("expected `{lit}` at `{}`", self.rest()))
        }
    }

    fn skip_spaces(&mut self) {
        while self.rest().starts_with(' ') {
            self.pos += 1;
        }
    }

    /// A TPTP atom, quoted or plain, as the unquoted name.
    fn atom(&mut self) -> Result<String, String> {
        let rest = self.rest();
        if let Some(body) = rest.strip_prefix('\'') {
            let mut name = String::new();
            let mut chars = body.char_indices();
            while let Some((i, ch)) = chars.next() {
                match ch {
                    '\\' => {
                        if let Some((_, esc)) = chars.next() {
                            name.push(esc);
                        }
                    }
                    '\'' => {
                        self.pos += 2 + i;
                        return Ok(name);
                    }
                    c => name.push(c),
                }
            }
            return Err("unterminated quoted name".into());
        }
        if let Some(body) = rest.strip_prefix('"') {
            let end = body.find('"').ok_or("unterminated distinct object")?;
            self.pos += end + 2;
            return Ok(rest[..end + 2].to_string());
        }
        let len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '$')).unwrap_or(rest.len());
        if len == 0 {
            return Err(format!("expected a name at `{rest}`"));
        }
        self.pos += len;
        Ok(rest[..len].to_string())
    }

    fn number(&mut self) -> Result<usize, String> {
        let rest = self.rest();
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        let n = rest[..len].parse().map_err(|_| format!("expected a number at `{rest}`"))?;
        self.pos += len;
        Ok(n)
    }

    fn copy_ref(&mut self, names: &HashMap<&str, usize>) -> Result<CopyRef, String> {
        let name = self.atom()?;
        self.expect(".")?;
        let clause = *names.get(name.as_str()).ok_or_else(|| format!("unknown clause `{name}`"))?;
        let copy = self.number()? as u32;
        if copy == 0 {
            return Err("copy indices start at 1".into());
        }
        Ok(CopyRef { clause, copy })
    }

    fn lit_ref(&mut self, p: &Problem, names: &HashMap<&str, usize>) -> Result<LitRef, String> {
        let copy = self.copy_ref(names)?;
        self.expect("[")?;
        let lit = self.number()?;
        self.expect("]")?;
        if lit >= p.clauses[copy.clause].literals.len() {
            return Err(format!("literal index {lit} out of range"));
        }
        Ok(LitRef { copy, lit })
    }

    fn var(&mut self, p: &Problem, names: &HashMap<&str, usize>) -> Result<Var, String> {
        let vname = self.atom()?;
        self.expect("@")?;
        let c = self.copy_ref(names)?;
        let pos = p.clauses[c.clause]
            .var_names
            .iter()
            .position(|n| *n == vname)
            .ok_or_else(|| format!("clause has no variable `{vname}`"))?;
        Ok(Var { clause: c.clause as u32, copy: c.copy, pos: pos as u32 })
    }

    fn term(&mut self, p: &Problem, names: &HashMap<&str, usize>) -> Result<Term, String> {
        if self.rest().starts_with(|c: char| c.is_ascii_uppercase()) {
            return Ok(Term::Var(self.var(p, names)?));
        }
        let name = self.atom()?;
        let f = p.symbols.find_function(&name).ok_or_else(|| format!("unknown function `{name}`"))?;
        let mut args = Vec::new();
        if self.eat("(") {
            loop {
                args.push(self.term(p, names)?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        if args.len() != p.symbols.func(f).arity {
            return Err(format!("wrong number of arguments for `{name}`"));
        }
        Ok(Term::app(f, args))
    }
}

/// Read a proof printed by [`print_proof`] for the same problem.
pub fn parse_proof(p: &Problem, text: &str) -> Result<Proof, ProofParseError> {
    let names: HashMap<&str, usize> = p.clauses.iter().map(|c| (c.name.as_str(), c.id)).collect();
    let fmt = p.fmt().with_style(VarStyle::Qualified);
    let mut proof = Proof::default();
    let mut section = "";
    // tree nodes under construction: (indent of their closure lines, node)
    let mut stack: Vec<(usize, TreeNode)> = Vec::new();
    let lines: Vec<&str> = text.lines().collect();
    let err = |line: usize, msg: String| ProofParseError { line: line + 1, msg };
    // literals without a closure line stay `Entry`; the checker rejects
    // those that are not the actual entry literal
    let new_node = |c: CopyRef, entry: Option<usize>| TreeNode {
        copy: c,
        entry,
        closures: vec![Closure::Entry; p.clauses[c.clause].literals.len()],
    };
    let fold = |stack: &mut Vec<(usize, TreeNode)>, indent: usize| {
        while stack.len() > 1 && stack.last().unwrap().0 > indent {
            let (_, child) = stack.pop().unwrap();
            let parent = &mut stack.last_mut().unwrap().1;
            let slot = parent.closures.iter().position(|c| matches!(c, Closure::Extension(n) if n.copy == child.copy));
            if let Some(i) = slot {
                parent.closures[i] = Closure::Extension(child);
            }
        }
    };
    for (ln, raw) in lines.iter().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        if !raw.starts_with(' ') {
            section = match raw.trim_end() {
                "copies:" => "copies",
                "substitution:" => "substitution",
                "connections:" => "connections",
                "tree:" => "tree",
                other => return Err(err(ln, format!("unknown section `{other}`"))),
            };
            continue;
        }
        let indent = raw.len() - raw.trim_start().len();
        let mut cur = Cursor::new(raw.trim());
        let res: Result<(), String> = (|| {
            match section {
                "copies" => {
                    let c = cur.copy_ref(&names)?;
                    cur.expect(":")?;
                    cur.skip_spaces();
                    let expected = fmt.literals(&proof.copy_literals(p, c));
                    if cur.rest() != expected {
                        return Err(format!("literals of {} do not match the problem", label(p, c)));
                    }
                    proof.copies.push(c);
                }
                "substitution" => {
                    let v = cur.var(p, &names)?;
                    cur.skip_spaces();
                    cur.expect(":=")?;
                    cur.skip_spaces();
                    let t = cur.term(p, &names)?;
                    proof.substitution.push((v, t));
                }
                "connections" => {
                    let a = cur.lit_ref(p, &names)?;
                    cur.skip_spaces();
                    cur.expect("~")?;
                    cur.skip_spaces();
                    let b = cur.lit_ref(p, &names)?;
                    proof.connections.push(Connection::new(a, b));
                }
                "tree" => {
                    if stack.is_empty() {
                        let c = cur.copy_ref(&names)?;
                        stack.push((indent + 2, new_node(c, None)));
                    } else {
                        fold(&mut stack, indent);
                        let (want, _) = stack.last().unwrap();
                        if *want != indent {
                            return Err("bad indentation".into());
                        }
                        cur.expect("[")?;
                        let i = cur.number()?;
                        cur.expect("]")?;
                        cur.skip_spaces();
                        let node = &mut stack.last_mut().unwrap().1;
                        if i >= node.closures.len() {
                            return Err(format!("literal index {i} out of range"));
                        }
                        if cur.eat("reduction") {
                            cur.skip_spaces();
                            node.closures[i] = Closure::Reduction(cur.lit_ref(p, &names)?);
                        } else if cur.eat("extension") {
                            cur.skip_spaces();
                            let e = cur.lit_ref(p, &names)?;
                            let child = new_node(e.copy, Some(e.lit));
                            node.closures[i] = Closure::Extension(TreeNode { copy: e.copy, entry: Some(e.lit), closures: vec![] });
                            stack.push((indent + 2, child));
                        } else {
                            return Err(format!("expected `reduction` or `extension` at `{}`", cur.rest()));
                        }
                    }
                }
                _ => return Err("content outside of a section".into()),
            }
            if !cur.rest().is_empty() && section != "copies" {
                return Err(format!("trailing input `{}`", cur.rest()));
            }
            Ok(())
        })();
        res.map_err(|m| err(ln, m))?;
    }
    if !stack.is_empty() {
        fold(&mut stack, 0);
        proof.tree = Some(stack.pop().unwrap().1);
    }
    Ok(proof)
}

/// Bindings of `vars` under `store`, fully resolved, skipping unbound ones.
pub fn resolved_substitution(store: &SubstitutionStore, vars: impl IntoIterator<Item = Var>) -> Vec<(Var, Term)> {
    let mut out: BTreeMap<Var, Term> = BTreeMap::new();
    for v in vars {
        let t = store.resolve(&Term::Var(v));
        if t != Term::Var(v) {
            out.insert(v, t);
        }
    }
    out.into_iter().collect()
}
