//! First-order terms, positions, substitutions, matching and unification.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Plain,
    /// The marked copy `f#` of a symbol.
    Sharped(Symbol),
    /// A compound symbol `c_k`.
    Compound(usize),
}

#[derive(Debug)]
pub struct SymbolData {
    name: String,
    arity: usize,
    kind: SymbolKind,
}

/// An interned function symbol. Equality and hashing are by identity.
#[derive(Clone, Copy)]
pub struct Symbol(&'static SymbolData);

#[derive(PartialEq, Eq, Hash)]
enum SymbolKey {
    Plain(String, usize),
    Sharped(usize),
    Compound(usize, usize),
}

fn symbol_table() -> &'static Mutex<HashMap<SymbolKey, &'static SymbolData>> {
    static TABLE: OnceLock<Mutex<HashMap<SymbolKey, &'static SymbolData>>> = OnceLock::new();
    TABLE.get_or_init(Default::default)
}

fn intern_symbol(key: SymbolKey, make: impl FnOnce() -> SymbolData) -> Symbol {
    let mut table = symbol_table().lock().unwrap();
    let data = *table
        .entry(key)
        .or_insert_with(|| Box::leak(Box::new(make())));
    Symbol(data)
}

impl Symbol {
    pub fn new(name: &str, arity: usize) -> Symbol {
        intern_symbol(SymbolKey::Plain(name.to_string(), arity), || SymbolData {
            name: name.to_string(),
            arity,
            kind: SymbolKind::Plain,
        })
    }

    /// The marked version `f#` of a plain symbol.
    pub fn sharped(self) -> Symbol {
        match self.0.kind {
            SymbolKind::Plain => {}
            _ => return self,
        }
        let origin = self;
        intern_symbol(SymbolKey::Sharped(self.addr()), || SymbolData {
            name: format!("{}#", origin.name()),
            arity: origin.arity(),
            kind: SymbolKind::Sharped(origin),
        })
    }

    pub fn compound(index: usize, arity: usize) -> Symbol {
        intern_symbol(SymbolKey::Compound(index, arity), || SymbolData {
            name: format!("c_{index}"),
            arity,
            kind: SymbolKind::Compound(index),
        })
    }

    fn addr(self) -> usize {
        self.0 as *const SymbolData as usize
    }

    pub fn name(&self) -> &'static str {
        &self.0.name
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn kind(&self) -> SymbolKind {
        self.0.kind
    }

    pub fn is_sharped(&self) -> bool {
        matches!(self.0.kind, SymbolKind::Sharped(_))
    }

    pub fn is_compound(&self) -> bool {
        matches!(self.0.kind, SymbolKind::Compound(_))
    }

    /// For `f#` returns `f`.
    pub fn origin(&self) -> Option<Symbol> {
        match self.0.kind {
            SymbolKind::Sharped(f) => Some(f),
            _ => None,
        }
    }

    fn kind_rank(&self) -> u8 {
        match self.0.kind {
            SymbolKind::Plain => 0,
            SymbolKind::Sharped(_) => 1,
            SymbolKind::Compound(_) => 2,
        }
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.addr().hash(state)
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if self == other {
            return std::cmp::Ordering::Equal;
        }
        let key = |s: &Symbol| {
            let index = match s.kind() {
                SymbolKind::Compound(k) => k,
                _ => 0,
            };
            (s.kind_rank(), index, s.name(), s.arity())
        };
        key(self).cmp(&key(other))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name(), self.arity())
    }
}

const FRESH_BASE: u32 = 1 << 31;

fn var_names() -> &'static Mutex<(Vec<String>, HashMap<String, u32>)> {
    static NAMES: OnceLock<Mutex<(Vec<String>, HashMap<String, u32>)>> = OnceLock::new();
    NAMES.get_or_init(Default::default)
}

/// A variable. Named variables come from input; fresh ones are produced by [`VarGen`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    pub fn named(name: &str) -> Var {
        let mut guard = var_names().lock().unwrap();
        let (names, index) = &mut *guard;
        if let Some(&id) = index.get(name) {
            return Var(id);
        }
        let id = names.len() as u32;
        names.push(name.to_string());
        index.insert(name.to_string(), id);
        Var(id)
    }

    pub fn is_fresh(&self) -> bool {
        self.0 >= FRESH_BASE
    }

    pub fn name(&self) -> String {
        if self.is_fresh() {
            format!("_{}", self.0 - FRESH_BASE)
        } else {
            var_names().lock().unwrap().0[self.0 as usize].clone()
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Source of fresh variables, local to one computation.
#[derive(Debug, Clone)]
pub struct VarGen {
    next: u32,
}

impl Default for VarGen {
    fn default() -> Self {
        VarGen { next: FRESH_BASE }
    }
}

impl VarGen {
    pub fn new() -> VarGen {
        VarGen::default()
    }

    /// A generator whose variables do not occur in any of `terms`.
    pub fn avoiding<'a>(terms: impl IntoIterator<Item = &'a Term>) -> VarGen {
        let mut gen = VarGen::new();
        for t in terms {
            gen.reserve(t);
        }
        gen
    }

    pub fn reserve(&mut self, t: &Term) {
        for v in t.vars() {
            if v.is_fresh() && v.0 >= self.next {
                self.next = v.0 + 1;
            }
        }
    }

    pub fn fresh(&mut self) -> Var {
        let v = Var(self.next);
        self.next += 1;
        v
    }
}

/// A position: a sequence of 1-based argument indices. The empty sequence is the root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn parse(text: &str) -> Option<Position> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Some(Position::root());
        }
        text.split('.')
            .map(|part| part.parse::<usize>().ok().filter(|&i| i > 0))
            .collect::<Option<Vec<_>>>()
            .map(Position)
    }
}

impl From<&[usize]> for Position {
    fn from(v: &[usize]) -> Self {
        Position(v.to_vec())
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    App(Symbol, Arc<[Term]>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::named(name))
    }

    /// Builds `f(args)`. Panics if the number of arguments differs from the arity.
    pub fn app(f: Symbol, args: Vec<Term>) -> Term {
        assert_eq!(f.arity(), args.len(), "arity mismatch for {f}");
        Term::App(f, args.into())
    }

    pub fn constant(f: Symbol) -> Term {
        Term::app(f, Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub fn root(&self) -> Option<Symbol> {
        match self {
            Term::App(f, _) => Some(*f),
            Term::Var(_) => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            Term::Var(_) => &[],
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v)
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn var_set(&self) -> BTreeSet<Var> {
        self.vars().into_iter().collect()
    }

    pub fn occurrences(&self, v: Var) -> usize {
        match self {
            Term::Var(w) => usize::from(*w == v),
            Term::App(_, args) => args.iter().map(|a| a.occurrences(v)).sum(),
        }
    }

    pub fn contains_var(&self, v: Var) -> bool {
        match self {
            Term::Var(w) => *w == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    /// Function symbols in order of first occurrence.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.visit(&mut |t| {
            if let Some(f) = t.root() {
                if !out.contains(&f) {
                    out.push(f);
                }
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        for a in self.args() {
            a.visit(f);
        }
    }

    /// All positions in pre-order.
    pub fn positions(&self) -> Vec<Position> {
        self.subterms().into_iter().map(|(p, _)| p).collect()
    }

    /// All subterms together with their positions, in pre-order.
    pub fn subterms(&self) -> Vec<(Position, &Term)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_subterms(&mut path, &mut out);
        out
    }

    fn collect_subterms<'a>(&'a self, path: &mut Vec<usize>, out: &mut Vec<(Position, &'a Term)>) {
        out.push((Position(path.clone()), self));
        for (i, a) in self.args().iter().enumerate() {
            path.push(i + 1);
            a.collect_subterms(path, out);
            path.pop();
        }
    }

    pub fn subterm_at(&self, p: &Position) -> Result<&Term> {
        let mut t = self;
        for &i in &p.0 {
            t = i
                .checked_sub(1)
                .and_then(|i| t.args().get(i))
                .ok_or_else(|| Error::PositionOutOfRange(p.to_string()))?;
        }
        Ok(t)
    }

    pub fn replace_at(&self, p: &Position, s: Term) -> Result<Term> {
        self.replace_from(&p.0, s)
            .ok_or_else(|| Error::PositionOutOfRange(p.to_string()))
    }

    fn replace_from(&self, path: &[usize], s: Term) -> Option<Term> {
        let Some((&i, rest)) = path.split_first() else {
            return Some(s);
        };
        let Term::App(f, args) = self else {
            return None;
        };
        let child = args.get(i.checked_sub(1)?)?;
        let new_child = child.replace_from(rest, s)?;
        let mut new_args = args.to_vec();
        new_args[i - 1] = new_child;
        Some(Term::App(*f, new_args.into()))
    }

    pub fn apply(&self, sigma: &Substitution) -> Term {
        match self {
            Term::Var(v) => sigma.get(*v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => {
                if args.is_empty() {
                    return self.clone();
                }
                Term::App(*f, args.iter().map(|a| a.apply(sigma)).collect())
            }
        }
    }

    /// Renames every variable to a fresh one drawn from `gen`.
    pub fn rename(&self, gen: &mut VarGen) -> Term {
        let mut sigma = Substitution::new();
        for v in self.vars() {
            sigma.insert(v, Term::Var(gen.fresh()));
        }
        self.apply(&sigma)
    }

    /// Replaces every function symbol via `f`, keeping structure.
    pub fn map_symbols(&self, f: &impl Fn(Symbol) -> Symbol) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::App(g, args) => Term::App(f(*g), args.iter().map(|a| a.map_symbols(f)).collect()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(g, args) if args.is_empty() => write!(f, "{g}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A finite substitution, kept as a small association list.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: Vec<(Var, Term)>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn get(&self, v: Var) -> Option<&Term> {
        self.bindings.iter().find(|(w, _)| *w == v).map(|(_, t)| t)
    }

    pub fn insert(&mut self, v: Var, t: Term) {
        match self.bindings.iter_mut().find(|(w, _)| *w == v) {
            Some(slot) => slot.1 = t,
            None => self.bindings.push((v, t)),
        }
    }

    pub fn domain(&self) -> impl Iterator<Item = Var> + '_ {
        self.bindings.iter().map(|(v, _)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter().map(|(v, t)| (v, t))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (v, t) in iter {
            s.insert(v, t);
        }
        s
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} ↦ {t}")?;
        }
        f.write_str("}")
    }
}

/// Finds `σ` with `pattern σ = subject`.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    match_into(pattern, subject, &mut sigma).then_some(sigma)
}

pub fn match_into(pattern: &Term, subject: &Term, sigma: &mut Substitution) -> bool {
    match pattern {
        Term::Var(v) => match sigma.get(*v) {
            Some(bound) => bound == subject,
            None => {
                sigma.bindings.push((*v, subject.clone()));
                true
            }
        },
        Term::App(f, pargs) => match subject {
            Term::App(g, sargs) if f == g => pargs
                .iter()
                .zip(sargs.iter())
                .all(|(p, s)| match_into(p, s, sigma)),
            _ => false,
        },
    }
}

/// Most general unifier, with occurs check. The result is idempotent.
pub fn unify(s: &Term, t: &Term) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    let mut stack = vec![(s.clone(), t.clone())];
    while let Some((a, b)) = stack.pop() {
        let a = resolve(&a, &sigma);
        let b = resolve(&b, &sigma);
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                let other = other.apply(&sigma);
                if other.contains_var(*x) {
                    return None;
                }
                let single: Substitution = std::iter::once((*x, other.clone())).collect();
                for (_, bound) in sigma.bindings.iter_mut() {
                    *bound = bound.apply(&single);
                }
                sigma.bindings.push((*x, other));
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g {
                    return None;
                }
                for (x, y) in fa.iter().zip(ga.iter()) {
                    stack.push((x.clone(), y.clone()));
                }
            }
        }
    }
    Some(sigma)
}

fn resolve(t: &Term, sigma: &Substitution) -> Term {
    match t {
        Term::Var(v) => sigma.get(*v).cloned().unwrap_or_else(|| t.clone()),
        _ => t.clone(),
    }
}

/// Renames the variables of `t` so that none of them lies in `avoid`.
pub fn rename_apart(t: &Term, avoid: &BTreeSet<Var>, gen: &mut VarGen) -> Term {
    let mut sigma = Substitution::new();
    for v in t.vars() {
        if avoid.contains(&v) {
            let mut w = gen.fresh();
            while avoid.contains(&w) {
                w = gen.fresh();
            }
            sigma.insert(v, Term::Var(w));
        }
    }
    t.apply(&sigma)
}
