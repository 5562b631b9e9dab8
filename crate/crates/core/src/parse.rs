//! TPTP CNF reader.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::term::{Clause, Literal, Problem, Role, SymbolTable, Term, Var, EQUALITY};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{file}:{line}:{col}: {msg}")]
    Syntax { file: String, line: usize, col: usize, msg: String },
    #[error("{file}:{line}:{col}: `{name}` used with arity {found}, previously {expected}")]
    Arity { file: String, line: usize, col: usize, name: String, expected: usize, found: usize },
    #[error("{file}:{line}:{col}: duplicate clause name `{name}`")]
    DuplicateName { file: String, line: usize, col: usize, name: String },
    #[error("cannot include `{path}`: {reason}")]
    Include { path: String, reason: String },
    #[error("cannot read `{path}`: {reason}")]
    Io { path: String, reason: String },
}

impl ParseError {
    /// Line and column of the offending token, when known.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            ParseError::Syntax { line, col, .. }
            | ParseError::Arity { line, col, .. }
            | ParseError::DuplicateName { line, col, .. } => Some((*line, *col)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Quoted(String),
    Distinct(String),
    Number(String),
    Dollar(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Pipe,
    Tilde,
    Eq,
    Neq,
    Other(char),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
    file: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str, file: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, col: 1, file }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { file: self.file.to_string(), line, col, msg: msg.into() }
    }

    fn tokens(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            let (line, col) = (self.line, self.col);
            let Some(&c) = self.chars.peek() else {
                out.push(Token { tok: Tok::Eof, line, col });
                return Ok(out);
            };
            let tok = match c {
                c if c.is_whitespace() => {
                    self.bump();
                    continue;
                }
                '%' => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                    continue;
                }
                '/' => {
                    self.bump();
                    if self.chars.peek() != Some(&'*') {
                        return Err(self.err(line, col, "unexpected `/`"));
                    }
                    self.bump();
                    let mut prev = ' ';
                    loop {
                        match self.bump() {
                            None => return Err(self.err(line, col, "unterminated comment")),
                            Some('/') if prev == '*' => break,
                            Some(c) => prev = c,
                        }
                    }
                    continue;
                }
                '\'' | '"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            None => return Err(self.err(line, col, "unterminated quoted name")),
                            Some('\\') => match self.bump() {
                                Some(e) => s.push(e),
                                None => return Err(self.err(line, col, "unterminated quoted name")),
                            },
                            Some(q) if q == c => break,
                            Some(ch) => s.push(ch),
                        }
                    }
                    if c == '\'' {
                        Tok::Quoted(s)
                    } else {
                        Tok::Distinct(s)
                    }
                }
                c if c.is_ascii_alphanumeric() || c == '$' || c == '_' => {
                    let mut s = String::new();
                    while let Some(&d) = self.chars.peek() {
                        if d.is_ascii_alphanumeric() || d == '_' || (d == '$' && s.is_empty()) {
                            s.push(d);
                            self.bump();
                        } else if d == '.' && s.chars().all(|c| c.is_ascii_digit()) && !s.is_empty() {
                            // decimal numbers: only consume the dot if a digit follows
                            let mut ahead = self.chars.clone();
                            ahead.next();
                            if ahead.peek().is_some_and(|c| c.is_ascii_digit()) {
                                s.push(d);
                                self.bump();
                            } else {
                                break;
                            }
                        } else {
                            break;
                        }
                    }
                    let first = s.chars().next().unwrap();
                    if first == '$' {
                        Tok::Dollar(s)
                    } else if first.is_ascii_digit() {
                        Tok::Number(s)
                    } else if first.is_ascii_uppercase() || first == '_' {
                        Tok::Upper(s)
                    } else {
                        Tok::Lower(s)
                    }
                }
                _ => {
                    self.bump();
                    match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        ',' => Tok::Comma,
                        '.' => Tok::Dot,
                        '|' => Tok::Pipe,
                        '~' => Tok::Tilde,
                        '=' => Tok::Eq,
                        '!' if self.chars.peek() == Some(&'=') => {
                            self.bump();
                            Tok::Neq
                        }
                        other => Tok::Other(other),
                    }
                }
            };
            out.push(Token { tok, line, col });
        }
    }
}

/// Source of included files.
pub trait IncludeResolver {
    /// Returns a display name and the file contents.
    fn resolve(&mut self, from: &str, path: &str) -> Result<(String, String), String>;
}

/// Rejects every include directive.
pub struct NoIncludes;

impl IncludeResolver for NoIncludes {
    fn resolve(&mut self, _from: &str, path: &str) -> Result<(String, String), String> {
        Err(format!("includes are not available here (`{path}`)"))
    }
}

/// Resolves includes relative to the including file, then to a TPTP root.
pub struct FileResolver {
    pub root: Option<PathBuf>,
}

impl IncludeResolver for FileResolver {
    fn resolve(&mut self, from: &str, path: &str) -> Result<(String, String), String> {
        let mut candidates = Vec::new();
        if let Some(dir) = Path::new(from).parent() {
            candidates.push(dir.join(path));
        }
        if let Some(root) = &self.root {
            candidates.push(root.join(path));
        }
        candidates.push(PathBuf::from(path));
        for c in &candidates {
            if let Ok(text) = std::fs::read_to_string(c) {
                return Ok((c.display().to_string(), text));
            }
        }
        Err("file not found".to_string())
    }
}

struct Builder {
    symbols: SymbolTable,
    clauses: Vec<Clause>,
    empty: Vec<String>,
    names: HashMap<String, ()>,
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    file: String,
    out: &'a mut Builder,
    // per-clause variable scope
    vars: Vec<String>,
    depth: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::Syntax { file: self.file.clone(), line, col, msg: msg.into() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match self.next().tok {
            Tok::Lower(s) | Tok::Quoted(s) | Tok::Number(s) => Ok(s),
            _ => {
                self.pos -= 1;
                Err(self.err("expected a name"))
            }
        }
    }

    fn document(&mut self, resolver: &mut dyn IncludeResolver) -> Result<(), ParseError> {
        loop {
            match self.peek().clone() {
                Tok::Eof => return Ok(()),
                Tok::Lower(kw) if kw == "cnf" => {
                    self.next();
                    self.cnf()?;
                }
                Tok::Lower(kw) if kw == "include" => {
                    self.next();
                    self.include(resolver)?;
                }
                Tok::Lower(kw) if matches!(kw.as_str(), "fof" | "tff" | "thf" | "tcf") => {
                    return Err(self.err(format!("only CNF input is supported, found `{kw}`")));
                }
                _ => return Err(self.err("expected `cnf` or `include`")),
            }
        }
    }

    fn include(&mut self, resolver: &mut dyn IncludeResolver) -> Result<(), ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let path = match self.next().tok {
            Tok::Quoted(s) => s,
            _ => {
                self.pos -= 1;
                return Err(self.err("expected a quoted file name"));
            }
        };
        let mut selection: Option<Vec<String>> = None;
        if *self.peek() == Tok::Comma {
            self.next();
            self.expect(Tok::LBracket, "`[`")?;
            let mut names = Vec::new();
            if *self.peek() != Tok::RBracket {
                loop {
                    names.push(self.name()?);
                    if *self.peek() == Tok::Comma {
                        self.next();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RBracket, "`]`")?;
            selection = Some(names);
        }
        self.expect(Tok::RParen, "`)`")?;
        self.expect(Tok::Dot, "`.`")?;
        if self.depth > 32 {
            return Err(ParseError::Include { path, reason: "includes nested too deeply".into() });
        }
        let (name, text) = resolver
            .resolve(&self.file, &path)
            .map_err(|reason| ParseError::Include { path: path.clone(), reason })?;
        let first_new = self.out.clauses.len();
        let empty_before = self.out.empty.len();
        let toks = Lexer::new(&text, &name).tokens()?;
        let mut inner = Parser { toks, pos: 0, file: name, out: self.out, vars: Vec::new(), depth: self.depth + 1 };
        inner.document(resolver)?;
        if let Some(sel) = selection {
            let keep = |n: &String| sel.contains(n);
            let mut kept: Vec<Clause> = self.out.clauses.drain(first_new..).filter(|c| keep(&c.name)).collect();
            for c in &mut kept {
                c.id = self.out.clauses.len();
                renumber(c);
                self.out.clauses.push(c.clone());
            }
            let empties: Vec<String> = self.out.empty.drain(empty_before..).filter(|n| keep(n)).collect();
            self.out.empty.extend(empties);
            self.out.names.clear();
            for c in &self.out.clauses {
                self.out.names.insert(c.name.clone(), ());
            }
        }
        Ok(())
    }

    fn cnf(&mut self) -> Result<(), ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let (nl, nc) = self.here();
        let name = self.name()?;
        self.expect(Tok::Comma, "`,`")?;
        let role = match self.next().tok {
            Tok::Lower(r) => match r.as_str() {
                "conjecture" | "negated_conjecture" => Role::Conjecture,
                "axiom" | "hypothesis" | "definition" | "assumption" | "lemma" | "theorem" | "corollary"
                | "plain" | "unknown" => Role::Axiom,
                other => {
                    self.pos -= 1;
                    return Err(self.err(format!("unknown role `{other}`")));
                }
            },
            _ => {
                self.pos -= 1;
                return Err(self.err("expected a role"));
            }
        };
        self.expect(Tok::Comma, "`,`")?;
        self.vars.clear();
        let mut lits = Vec::new();
        let mut is_true = false;
        self.disjunction(&mut lits, &mut is_true)?;
        if *self.peek() == Tok::Comma {
            self.next();
            self.skip_annotation()?;
        }
        self.expect(Tok::RParen, "`)`")?;
        self.expect(Tok::Dot, "`.`")?;
        if self.out.names.contains_key(&name) {
            return Err(ParseError::DuplicateName { file: self.file.clone(), line: nl, col: nc, name });
        }
        self.out.names.insert(name.clone(), ());
        if is_true {
            return Ok(());
        }
        if lits.is_empty() {
            self.out.empty.push(name);
            return Ok(());
        }
        let id = self.out.clauses.len();
        let mut clause = Clause { id, name, role, literals: lits, var_names: std::mem::take(&mut self.vars) };
        renumber(&mut clause);
        self.out.clauses.push(clause);
        Ok(())
    }

    fn skip_annotation(&mut self) -> Result<(), ParseError> {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return Err(self.err("unterminated annotation")),
                Tok::LParen | Tok::LBracket => depth += 1,
                Tok::RParen | Tok::RBracket => {
                    if depth == 0 {
                        return Ok(());
                    }
                    depth -= 1;
                }
                _ => {}
            }
            self.next();
        }
    }

    fn disjunction(&mut self, lits: &mut Vec<Literal>, is_true: &mut bool) -> Result<(), ParseError> {
        loop {
            self.unit(lits, is_true)?;
            if *self.peek() == Tok::Pipe {
                self.next();
            } else {
                return Ok(());
            }
        }
    }

    fn unit(&mut self, lits: &mut Vec<Literal>, is_true: &mut bool) -> Result<(), ParseError> {
        match self.peek() {
            Tok::LParen => {
                self.next();
                self.disjunction(lits, is_true)?;
                self.expect(Tok::RParen, "`)`")
            }
            Tok::Tilde => {
                self.next();
                let paren = *self.peek() == Tok::LParen;
                if paren {
                    self.next();
                }
                let mut inner = Vec::new();
                let mut inner_true = false;
                self.literal(&mut inner, &mut inner_true)?;
                if paren {
                    self.expect(Tok::RParen, "`)`")?;
                }
                match inner.pop() {
                    Some(l) => lits.push(l.negated()),
                    // ~$false is true, ~$true is false
                    None if !inner_true => *is_true = true,
                    None => {}
                }
                Ok(())
            }
            _ => self.literal(lits, is_true),
        }
    }

    fn literal(&mut self, lits: &mut Vec<Literal>, is_true: &mut bool) -> Result<(), ParseError> {
        if let Tok::Dollar(d) = self.peek().clone() {
            match d.as_str() {
                "$false" => {
                    self.next();
                    return Ok(());
                }
                "$true" => {
                    self.next();
                    *is_true = true;
                    return Ok(());
                }
                _ => {}
            }
        }
        let (line, col) = self.here();
        let lhs = self.term_or_atom()?;
        match self.peek() {
            Tok::Eq | Tok::Neq => {
                let positive = *self.peek() == Tok::Eq;
                self.next();
                let lhs = self.as_term(lhs, line, col)?;
                let (l2, c2) = self.here();
                let rhs = self.term_or_atom()?;
                let rhs = self.as_term(rhs, l2, c2)?;
                let eq = self.pred(EQUALITY, 2, line, col)?;
                lits.push(Literal::new(positive, eq, vec![lhs, rhs]));
            }
            _ => match lhs {
                Raw::Var(_) => return Err(ParseError::Syntax {
                    file: self.file.clone(),
                    line,
                    col,
                    msg: "a variable is not a literal".into(),
                }),
                Raw::App(name, args) => {
                    let pred = self.pred(&name, args.len(), line, col)?;
                    let args = args.into_iter().map(|(a, l, c)| self.as_term(a, l, c)).collect::<Result<_, _>>()?;
                    lits.push(Literal::new(true, pred, args));
                }
            },
        }
        Ok(())
    }

    fn pred(&mut self, name: &str, arity: usize, line: usize, col: usize) -> Result<crate::term::PredId, ParseError> {
        self.out.symbols.predicate(name, arity).map_err(|expected| ParseError::Arity {
            file: self.file.clone(),
            line,
            col,
            name: name.to_string(),
            expected,
            found: arity,
        })
    }

    fn term_or_atom(&mut self) -> Result<Raw, ParseError> {
        let t = self.next();
        let name = match t.tok {
            Tok::Upper(v) => {
                let pos = match self.vars.iter().position(|n| *n == v) {
                    Some(p) => p,
                    None => {
                        self.vars.push(v);
                        self.vars.len() - 1
                    }
                };
                return Ok(Raw::Var(pos as u32));
            }
            Tok::Lower(s) | Tok::Quoted(s) | Tok::Number(s) => s,
            Tok::Distinct(s) => format!("\"{s}\""),
            Tok::Dollar(s) => s,
            _ => {
                self.pos -= 1;
                return Err(self.err("expected a term"));
            }
        };
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.next();
            loop {
                let (l, c) = self.here();
                args.push((self.term_or_atom()?, l, c));
                match self.peek() {
                    Tok::Comma => {
                        self.next();
                    }
                    Tok::RParen => {
                        self.next();
                        break;
                    }
                    _ => return Err(self.err("expected `,` or `)`")),
                }
            }
        }
        Ok(Raw::App(name, args))
    }

    fn as_term(&mut self, raw: Raw, line: usize, col: usize) -> Result<Term, ParseError> {
        match raw {
            Raw::Var(pos) => Ok(Term::Var(Var { clause: 0, copy: 0, pos })),
            Raw::App(name, args) => {
                let f = self.out.symbols.function(&name, args.len()).map_err(|expected| ParseError::Arity {
                    file: self.file.clone(),
                    line,
                    col,
                    name: name.clone(),
                    expected,
                    found: args.len(),
                })?;
                let args = args.into_iter().map(|(a, l, c)| self.as_term(a, l, c)).collect::<Result<Vec<_>, _>>()?;
                Ok(Term::app(f, args))
            }
        }
    }
}

enum Raw {
    Var(u32),
    App(String, Vec<(Raw, usize, usize)>),
}

/// Point every variable of the clause at its id.
fn renumber(c: &mut Clause) {
    let id = c.id as u32;
    c.literals = c.literals.iter().map(|l| l.map_vars(&mut |v| Term::Var(Var { clause: id, ..v }))).collect();
}

/// Parse a CNF document without include support.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    parse_with(text, "<input>", &mut NoIncludes)
}

pub fn parse_with(text: &str, file: &str, resolver: &mut dyn IncludeResolver) -> Result<Problem, ParseError> {
    let mut b = Builder { symbols: SymbolTable::new(), clauses: Vec::new(), empty: Vec::new(), names: HashMap::new() };
    let toks = Lexer::new(text, file).tokens()?;
    Parser { toks, pos: 0, file: file.to_string(), out: &mut b, vars: Vec::new(), depth: 0 }.document(resolver)?;
    let mut p = Problem { symbols: b.symbols, clauses: b.clauses, start: Vec::new(), empty_clauses: b.empty };
    p.start = crate::problem::select_start_clauses(&p, crate::problem::StartPolicy::Conjecture);
    Ok(p)
}

/// Read a problem file, resolving includes next to it and under `root`.
pub fn load_problem(path: &Path, root: Option<&Path>) -> Result<Problem, ParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ParseError::Io { path: path.display().to_string(), reason: e.to_string() })?;
    let mut resolver = FileResolver { root: root.map(Path::to_path_buf) };
    parse_with(&text, &path.display().to_string(), &mut resolver)
}
