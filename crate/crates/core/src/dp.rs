//! Weak, weak innermost and standard dependency pairs, and usable rules.

use std::collections::BTreeSet;
use std::fmt;

use crate::term::{Symbol, Term};
use crate::trs::{Rule, Strategy, Trs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Flavor {
    #[serde(rename = "WDP")]
    Wdp,
    #[serde(rename = "WIDP")]
    Widp,
    #[serde(rename = "DP")]
    Dp,
}

impl Flavor {
    pub fn for_strategy(strategy: Strategy) -> Flavor {
        match strategy {
            Strategy::Full => Flavor::Wdp,
            Strategy::Innermost => Flavor::Widp,
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Wdp => "WDP",
            Flavor::Widp => "WIDP",
            Flavor::Dp => "DP",
        })
    }
}

/// The root-marking `t♯`. Variables are unchanged.
pub fn sharp(t: &Term) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, args) => Term::App(f.sharped(), args.clone()),
    }
}

/// Which subterms are cut out by [`decompose`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkSet {
    /// Defined symbols and variables.
    DefinedAndVars,
    /// Defined symbols only.
    Defined,
}

/// A term split into a context without marked symbols and its maximal marked subterms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// The context; holes are occurrences of [`hole`].
    pub context: Term,
    pub parts: Vec<Term>,
}

pub fn hole() -> Symbol {
    Symbol::new("□", 0)
}

impl Decomposition {
    /// Fills the holes left to right with `parts`.
    pub fn plug(&self) -> Term {
        let mut parts = self.parts.iter();
        fill(&self.context, &mut parts)
    }
}

fn fill<'a>(t: &Term, parts: &mut impl Iterator<Item = &'a Term>) -> Term {
    match t {
        Term::App(f, _) if *f == hole() => parts.next().expect("one part per hole").clone(),
        Term::App(f, args) => Term::app(*f, args.iter().map(|a| fill(a, parts)).collect()),
        Term::Var(_) => t.clone(),
    }
}

/// Decomposes `t` relative to the defined symbols of `trs`.
pub fn decompose(t: &Term, trs: &Trs, marks: MarkSet) -> Decomposition {
    let defined = trs.defined_symbols();
    let mut parts = Vec::new();
    let context = cut(t, &defined, marks, &mut parts);
    Decomposition { context, parts }
}

fn cut(t: &Term, defined: &BTreeSet<Symbol>, marks: MarkSet, parts: &mut Vec<Term>) -> Term {
    let marked = match t {
        Term::Var(_) => marks == MarkSet::DefinedAndVars,
        Term::App(f, _) => defined.contains(f),
    };
    if marked {
        parts.push(t.clone());
        return Term::constant(hole());
    }
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, args) => Term::app(*f, args.iter().map(|a| cut(a, defined, marks, parts)).collect()),
    }
}

/// Allocates compound symbols `c_1, c_2, …` in order of use.
#[derive(Debug, Default)]
pub struct CompoundRegistry {
    symbols: Vec<Symbol>,
}

impl CompoundRegistry {
    /// `COM(ts)`: the term itself when there is exactly one, otherwise a fresh compound.
    pub fn com(&mut self, ts: Vec<Term>) -> Term {
        if ts.len() == 1 {
            return ts.into_iter().next().unwrap();
        }
        let c = Symbol::compound(self.symbols.len() + 1, ts.len());
        self.symbols.push(c);
        Term::app(c, ts)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }
}

/// A set of dependency pairs together with the system it was built from.
#[derive(Debug, Clone)]
pub struct DpProblem {
    pairs: Trs,
    origin: Trs,
    flavor: Flavor,
    compounds: Vec<Symbol>,
}

impl DpProblem {
    pub fn pairs(&self) -> &[Rule] {
        self.pairs.rules()
    }

    /// The pairs as a rewrite system over the origin signature extended by marked and compound symbols.
    pub fn pair_trs(&self) -> &Trs {
        &self.pairs
    }

    pub fn origin(&self) -> &Trs {
        &self.origin
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn compounds(&self) -> &[Symbol] {
        &self.compounds
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The number shown for pair `i` (0-based): numbering continues after the origin rules.
    pub fn display_index(&self, i: usize) -> usize {
        self.origin.len() + i + 1
    }

    /// 0-based index of the pair shown as `n`.
    pub fn pair_of_display(&self, n: usize) -> Option<usize> {
        n.checked_sub(self.origin.len() + 1).filter(|&i| i < self.len())
    }

    /// Usable rules of all pair right-hand sides, as 0-based origin rule indices.
    pub fn usable_rules(&self) -> Vec<usize> {
        usable_rules(&self.origin, self.pairs.rules().iter().map(|p| &p.rhs))
    }

    /// Usable rules for the pairs at the given 0-based indices.
    pub fn usable_rules_of(&self, pairs: &[usize]) -> Vec<usize> {
        usable_rules(&self.origin, pairs.iter().map(|&i| &self.pairs.rules()[i].rhs))
    }

    pub fn usable_trs(&self) -> Trs {
        self.origin.subsystem(&self.usable_rules())
    }

    /// The pairs at the given 0-based indices.
    pub fn pair_subsystem(&self, pairs: &[usize]) -> Trs {
        self.pairs.subsystem(pairs)
    }

    /// `P ∪ R`.
    pub fn with_origin(&self) -> Trs {
        self.pairs.union(&self.origin)
    }

    /// `P ∪ U(P)`.
    pub fn with_usable(&self) -> Trs {
        self.pairs.union(&self.usable_trs())
    }

    /// One line `n: l -> r` per pair.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, p) in self.pairs().iter().enumerate() {
            out.push_str(&format!("{}: {}\n", self.display_index(i), p));
        }
        out
    }
}

fn weak_pairs(trs: &Trs, marks: MarkSet, flavor: Flavor) -> DpProblem {
    let mut registry = CompoundRegistry::default();
    let mut pairs = Vec::new();
    for rule in trs.rules() {
        let parts = decompose(&rule.rhs, trs, marks).parts;
        let rhs = registry.com(parts.iter().map(sharp).collect());
        pairs.push(Rule::new(sharp(&rule.lhs), rhs));
    }
    finish(trs, pairs, flavor, registry)
}

fn finish(trs: &Trs, pairs: Vec<Rule>, flavor: Flavor, registry: CompoundRegistry) -> DpProblem {
    let pairs = Trs::new(pairs, trs.signature().iter().copied())
        .expect("pairs inherit the variable conditions of their rules")
        .with_strategy(trs.strategy());
    DpProblem {
        pairs,
        origin: trs.clone(),
        flavor,
        compounds: registry.symbols,
    }
}

/// `WDP(R)`: one pair per rule, cutting the rhs at defined symbols and variables.
pub fn weak_dependency_pairs(trs: &Trs) -> DpProblem {
    weak_pairs(trs, MarkSet::DefinedAndVars, Flavor::Wdp)
}

/// `WIDP(R)`: one pair per rule, cutting the rhs at defined symbols only.
pub fn weak_innermost_dependency_pairs(trs: &Trs) -> DpProblem {
    weak_pairs(trs, MarkSet::Defined, Flavor::Widp)
}

pub fn dependency_pairs_for(trs: &Trs, strategy: Strategy) -> DpProblem {
    match strategy {
        Strategy::Full => weak_dependency_pairs(trs),
        Strategy::Innermost => weak_innermost_dependency_pairs(trs),
    }
}

/// Standard dependency pairs `l♯ → u♯`. Never a source of complexity bounds.
pub fn standard_dependency_pairs(trs: &Trs) -> DpProblem {
    let defined = trs.defined_symbols();
    let mut pairs: Vec<Rule> = Vec::new();
    for rule in trs.rules() {
        let lhs_proper: Vec<&Term> = rule.lhs.subterms().into_iter().skip(1).map(|(_, t)| t).collect();
        for (_, u) in rule.rhs.subterms() {
            let Some(f) = u.root() else { continue };
            if !defined.contains(&f) || lhs_proper.contains(&u) {
                continue;
            }
            let pair = Rule::new(sharp(&rule.lhs), sharp(u));
            if !pairs.contains(&pair) {
                pairs.push(pair);
            }
        }
    }
    finish(trs, pairs, Flavor::Dp, CompoundRegistry::default())
}

/// Usable rules `U(t)` for the given terms, as 0-based rule indices in rule order.
pub fn usable_rules<'a>(trs: &Trs, roots: impl IntoIterator<Item = &'a Term>) -> Vec<usize> {
    let defined = trs.defined_symbols();
    let mut reach: BTreeSet<Symbol> = BTreeSet::new();
    let mut todo: Vec<Symbol> = Vec::new();
    for t in roots {
        for f in t.symbols() {
            if defined.contains(&f) && reach.insert(f) {
                todo.push(f);
            }
        }
    }
    while let Some(f) = todo.pop() {
        for rule in trs.rules().iter().filter(|r| r.lhs.root() == Some(f)) {
            for g in rule.rhs.symbols() {
                if defined.contains(&g) && reach.insert(g) {
                    todo.push(g);
                }
            }
        }
    }
    trs.rules()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.lhs.root().is_some_and(|f| reach.contains(&f)))
        .map(|(i, _)| i)
        .collect()
}
