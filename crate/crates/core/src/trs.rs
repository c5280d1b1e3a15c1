//! Rewrite rules, TRS classification and the TPDB-style text format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::term::{Symbol, Term, Var};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Rule {
        Rule { lhs, rhs }
    }

    pub fn is_duplicating(&self) -> bool {
        self.lhs
            .vars()
            .into_iter()
            .chain(self.rhs.vars())
            .any(|x| self.rhs.occurrences(x) > self.lhs.occurrences(x))
    }

    pub fn is_collapsing(&self) -> bool {
        self.rhs.is_var()
    }

    fn check(&self) -> Result<()> {
        if self.lhs.is_var() {
            return Err(Error::VariableLhs(self.to_string()));
        }
        let lv = self.lhs.var_set();
        if self.rhs.vars().iter().any(|v| !lv.contains(v)) {
            return Err(Error::FreeVariable(self.to_string()));
        }
        Ok(())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Full,
    Innermost,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Full => "full",
            Strategy::Innermost => "innermost",
        })
    }
}

/// A finite term rewrite system over an explicit signature.
#[derive(Clone, Debug)]
pub struct Trs {
    rules: Arc<[Rule]>,
    signature: Arc<[Symbol]>,
    strategy: Strategy,
}

impl Trs {
    /// Builds a TRS from rules, checking the variable conditions.
    /// The signature is the set of symbols in the rules plus `extra`.
    pub fn new(rules: Vec<Rule>, extra: impl IntoIterator<Item = Symbol>) -> Result<Trs> {
        for r in &rules {
            r.check()?;
        }
        let mut sig: BTreeSet<Symbol> = extra.into_iter().collect();
        for r in &rules {
            sig.extend(r.lhs.symbols());
            sig.extend(r.rhs.symbols());
        }
        Ok(Trs {
            rules: rules.into(),
            signature: sig.into_iter().collect::<Vec<_>>().into(),
            strategy: Strategy::Full,
        })
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Trs {
        self.strategy = strategy;
        self
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn signature(&self) -> &[Symbol] {
        &self.signature
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.signature.iter().copied().find(|f| f.name() == name)
    }

    pub fn defined_symbols(&self) -> BTreeSet<Symbol> {
        self.rules.iter().filter_map(|r| r.lhs.root()).collect()
    }

    pub fn constructors(&self) -> BTreeSet<Symbol> {
        let defined = self.defined_symbols();
        self.signature
            .iter()
            .copied()
            .filter(|f| !defined.contains(f))
            .collect()
    }

    pub fn is_defined(&self, f: Symbol) -> bool {
        self.rules.iter().any(|r| r.lhs.root() == Some(f))
    }

    /// Terms without defined symbols.
    pub fn is_constructor_term(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(f, args) => !self.is_defined(*f) && args.iter().all(|a| self.is_constructor_term(a)),
        }
    }

    /// `f(t1..tn)` with `f` defined and every `ti` a constructor term.
    pub fn is_basic(&self, t: &Term) -> bool {
        match t {
            Term::App(f, args) => self.is_defined(*f) && args.iter().all(|a| self.is_constructor_term(a)),
            Term::Var(_) => false,
        }
    }

    pub fn is_duplicating(&self) -> bool {
        self.rules.iter().any(Rule::is_duplicating)
    }

    pub fn max_arity(&self) -> usize {
        self.signature.iter().map(|f| f.arity()).max().unwrap_or(0)
    }

    /// The union of two rule lists, keeping the order `self` then `other`.
    pub fn union(&self, other: &Trs) -> Trs {
        let rules: Vec<Rule> = self.rules.iter().chain(other.rules.iter()).cloned().collect();
        Trs::new(
            rules,
            self.signature.iter().chain(other.signature.iter()).copied(),
        )
        .expect("union of valid systems")
        .with_strategy(self.strategy)
    }

    /// The subsystem made of the rules at the given 0-based indices.
    pub fn subsystem(&self, indices: &[usize]) -> Trs {
        let rules = indices.iter().map(|&i| self.rules[i].clone()).collect();
        Trs::new(rules, self.signature.iter().copied())
            .expect("subsystem of a valid system")
            .with_strategy(self.strategy)
    }

    /// Parses a term over this signature. Unknown identifiers without arguments are variables.
    pub fn parse_term(&self, text: &str) -> Result<Term> {
        let mut p = Parser::new(text);
        let mut ctx = TermContext {
            vars: None,
            arities: self.signature.iter().map(|f| (f.name().to_string(), *f)).collect(),
            fixed: true,
        };
        let t = p.term(&mut ctx)?;
        p.expect_end()?;
        Ok(t)
    }
}

impl fmt::Display for Trs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_trs(self))
    }
}

/// Parses the TPDB old text format.
pub fn parse_trs(text: &str) -> Result<Trs> {
    let mut p = Parser::new(text);
    let mut vars: BTreeSet<String> = BTreeSet::new();
    let mut raw_rules: Vec<(RawTerm, RawTerm, usize, usize)> = Vec::new();
    let mut strategy = Strategy::Full;
    while let Some(tok) = p.peek()? {
        if tok.kind != Tok::Open {
            return Err(p.error_at(&tok, "expected '('"));
        }
        p.next()?;
        let head = p.next()?.ok_or_else(|| p.eof_error("section name"))?;
        let name = match &head.kind {
            Tok::Ident(s) => s.clone(),
            _ => return Err(p.error_at(&head, "expected section name")),
        };
        match name.as_str() {
            "VAR" => loop {
                let t = p.next()?.ok_or_else(|| p.eof_error("')'"))?;
                match t.kind {
                    Tok::Ident(s) => {
                        vars.insert(s);
                    }
                    Tok::Close => break,
                    _ => return Err(p.error_at(&t, "expected variable name")),
                }
            },
            "RULES" => loop {
                let t = p.peek()?.ok_or_else(|| p.eof_error("')'"))?;
                if t.kind == Tok::Close {
                    p.next()?;
                    break;
                }
                let lhs = p.raw_term()?;
                let arrow = p.next()?.ok_or_else(|| p.eof_error("'->'"))?;
                if arrow.kind != Tok::Arrow {
                    return Err(p.error_at(&arrow, "expected '->'"));
                }
                let rhs = p.raw_term()?;
                raw_rules.push((lhs, rhs, t.line, t.column));
            },
            "STRATEGY" => {
                let t = p.next()?.ok_or_else(|| p.eof_error("strategy"))?;
                strategy = match &t.kind {
                    Tok::Ident(s) if s == "INNERMOST" => Strategy::Innermost,
                    Tok::Ident(s) if s == "FULL" => Strategy::Full,
                    _ => return Err(p.error_at(&t, "unsupported strategy")),
                };
                let close = p.next()?.ok_or_else(|| p.eof_error("')'"))?;
                if close.kind != Tok::Close {
                    return Err(p.error_at(&close, "expected ')'"));
                }
            }
            "COMMENT" => p.skip_balanced()?,
            _ => return Err(p.error_at(&head, &format!("unknown section {name}"))),
        }
    }

    let mut ctx = TermContext {
        vars: Some(vars),
        arities: BTreeMap::new(),
        fixed: false,
    };
    let mut rules = Vec::new();
    for (l, r, line, column) in &raw_rules {
        let lhs = ctx.build(l).map_err(|e| locate(e, *line, *column))?;
        let rhs = ctx.build(r).map_err(|e| locate(e, *line, *column))?;
        rules.push(Rule::new(lhs, rhs));
    }
    let trs = Trs::new(rules, [])?.with_strategy(strategy);
    if !trs.signature().is_empty()
        && !trs.constructors().iter().any(|f| f.arity() == 0)
    {
        return Err(Error::NoConstructorConstant);
    }
    Ok(trs)
}

fn locate(e: Error, line: usize, column: usize) -> Error {
    match e {
        Error::Syntax { message, .. } => Error::Syntax { line, column, message },
        other => other,
    }
}

/// Prints a TRS in the same format `parse_trs` reads. Nullary symbols print as `c()`.
pub fn print_trs(trs: &Trs) -> String {
    if trs.is_empty() {
        return "(RULES )\n".to_string();
    }
    let mut out = String::new();
    let mut vars: Vec<Var> = Vec::new();
    for r in trs.rules() {
        for v in r.lhs.vars() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
    }
    if !vars.is_empty() {
        let names: Vec<String> = vars.iter().map(|v| v.name()).collect();
        out.push_str(&format!("(VAR {})\n", names.join(" ")));
    }
    if trs.strategy() == Strategy::Innermost {
        out.push_str("(STRATEGY INNERMOST)\n");
    }
    out.push_str("(RULES\n");
    for r in trs.rules() {
        out.push_str(&format!("  {} -> {}\n", print_term(&r.lhs), print_term(&r.rhs)));
    }
    out.push_str(")\n");
    out
}

/// Prints a term with nullary symbols written `c()`.
pub fn print_term(t: &Term) -> String {
    match t {
        Term::Var(v) => v.name(),
        Term::App(f, args) => {
            let inner: Vec<String> = args.iter().map(print_term).collect();
            format!("{}({})", f.name(), inner.join(","))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Comma,
    Arrow,
    Ident(String),
}

#[derive(Debug, Clone)]
struct Token {
    kind: Tok,
    line: usize,
    column: usize,
}

#[derive(Debug, Clone)]
enum RawTerm {
    Leaf(String, usize, usize),
    Node(String, Vec<RawTerm>, usize, usize),
}

struct TermContext {
    vars: Option<BTreeSet<String>>,
    arities: BTreeMap<String, Symbol>,
    fixed: bool,
}

impl TermContext {
    fn syntax(line: usize, column: usize, message: String) -> Error {
        Error::Syntax { line, column, message }
    }

    fn symbol(&mut self, name: &str, arity: usize, line: usize, column: usize) -> Result<Symbol> {
        if let Some(f) = self.arities.get(name) {
            if f.arity() != arity {
                return Err(Error::ArityMismatch {
                    symbol: name.to_string(),
                    expected: f.arity(),
                    found: arity,
                });
            }
            return Ok(*f);
        }
        if self.fixed {
            return Err(Self::syntax(line, column, format!("unknown symbol {name}")));
        }
        let f = Symbol::new(name, arity);
        self.arities.insert(name.to_string(), f);
        Ok(f)
    }

    fn is_var(&self, name: &str) -> bool {
        match &self.vars {
            Some(vars) => vars.contains(name),
            None => !self.arities.contains_key(name),
        }
    }

    fn build(&mut self, raw: &RawTerm) -> Result<Term> {
        match raw {
            RawTerm::Leaf(name, line, column) => {
                if self.is_var(name) {
                    Ok(Term::var(name))
                } else {
                    Ok(Term::constant(self.symbol(name, 0, *line, *column)?))
                }
            }
            RawTerm::Node(name, args, line, column) => {
                if self.vars.as_ref().is_some_and(|v| v.contains(name)) {
                    return Err(Self::syntax(*line, *column, format!("variable {name} applied to arguments")));
                }
                let f = self.symbol(name, args.len(), *line, *column)?;
                let args = args.iter().map(|a| self.build(a)).collect::<Result<Vec<_>>>()?;
                Ok(Term::app(f, args))
            }
        }
    }
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
    line: usize,
    column: usize,
    lookahead: Option<Token>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Parser<'a> {
        Parser {
            chars: text.char_indices().peekable(),
            text,
            line: 1,
            column: 1,
            lookahead: None,
        }
    }

    fn error_at(&self, tok: &Token, message: &str) -> Error {
        Error::Syntax {
            line: tok.line,
            column: tok.column,
            message: message.to_string(),
        }
    }

    fn eof_error(&self, expected: &str) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.column,
            message: format!("unexpected end of input, expected {expected}"),
        }
    }

    fn bump(&mut self) -> Option<(usize, char)> {
        let c = self.chars.next()?;
        if c.1 == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn lex(&mut self) -> Result<Option<Token>> {
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
        let (line, column) = (self.line, self.column);
        let Some((start, c)) = self.bump() else {
            return Ok(None);
        };
        let kind = match c {
            '(' => Tok::Open,
            ')' => Tok::Close,
            ',' => Tok::Comma,
            '-' if self.chars.peek().map(|p| p.1) == Some('>') => {
                self.bump();
                Tok::Arrow
            }
            _ => {
                let mut end = start + c.len_utf8();
                while let Some(&(i, d)) = self.chars.peek() {
                    if d.is_whitespace() || matches!(d, '(' | ')' | ',') || self.text[i..].starts_with("->") {
                        break;
                    }
                    self.bump();
                    end = i + d.len_utf8();
                }
                Tok::Ident(self.text[start..end].to_string())
            }
        };
        Ok(Some(Token { kind, line, column }))
    }

    fn peek(&mut self) -> Result<Option<Token>> {
        if self.lookahead.is_none() {
            self.lookahead = self.lex()?;
        }
        Ok(self.lookahead.clone())
    }

    fn next(&mut self) -> Result<Option<Token>> {
        match self.lookahead.take() {
            Some(t) => Ok(Some(t)),
            None => self.lex(),
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        match self.next()? {
            None => Ok(()),
            Some(t) => Err(self.error_at(&t, "trailing input")),
        }
    }

    fn skip_balanced(&mut self) -> Result<()> {
        let mut depth = 1usize;
        while depth > 0 {
            let Some((_, c)) = self.bump() else {
                return Err(self.eof_error("')'"));
            };
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
        }
        Ok(())
    }

    fn raw_term(&mut self) -> Result<RawTerm> {
        let t = self.next()?.ok_or_else(|| self.eof_error("term"))?;
        let Tok::Ident(name) = t.kind.clone() else {
            return Err(self.error_at(&t, "expected identifier"));
        };
        if !matches!(self.peek()?, Some(Token { kind: Tok::Open, .. })) {
            return Ok(RawTerm::Leaf(name, t.line, t.column));
        }
        self.next()?;
        let mut args = Vec::new();
        if matches!(self.peek()?, Some(Token { kind: Tok::Close, .. })) {
            self.next()?;
            return Ok(RawTerm::Node(name, args, t.line, t.column));
        }
        loop {
            args.push(self.raw_term()?);
            let sep = self.next()?.ok_or_else(|| self.eof_error("',' or ')'"))?;
            match sep.kind {
                Tok::Comma => continue,
                Tok::Close => break,
                _ => return Err(self.error_at(&sep, "expected ',' or ')'")),
            }
        }
        Ok(RawTerm::Node(name, args, t.line, t.column))
    }

    fn term(&mut self, ctx: &mut TermContext) -> Result<Term> {
        let raw = self.raw_term()?;
        ctx.build(&raw)
    }
}
