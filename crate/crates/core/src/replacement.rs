//! Replacement maps, μ-replacing positions and usable replacement maps.

use std::collections::BTreeSet;
use std::fmt;

use crate::rewrite::is_normal_form;
use crate::term::{rename_apart, unify, Position, Symbol, Term, VarGen};
use crate::trs::Trs;

/// A set of argument positions `(f, i)`, `1 ≤ i ≤ arity(f)`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ReplacementMap(BTreeSet<(Symbol, usize)>);

impl ReplacementMap {
    pub fn new() -> ReplacementMap {
        ReplacementMap::default()
    }

    /// The map allowing every argument position of every symbol in `signature`.
    pub fn full<'a>(signature: impl IntoIterator<Item = &'a Symbol>) -> ReplacementMap {
        let mut m = ReplacementMap::new();
        for f in signature {
            for i in 1..=f.arity() {
                m.insert(*f, i);
            }
        }
        m
    }

    pub fn insert(&mut self, f: Symbol, i: usize) {
        assert!(i >= 1 && i <= f.arity(), "argument index {i} out of range for {f}");
        self.0.insert((f, i));
    }

    pub fn contains(&self, f: Symbol, i: usize) -> bool {
        self.0.contains(&(f, i))
    }

    pub fn indices(&self, f: Symbol) -> Vec<usize> {
        (1..=f.arity()).filter(|&i| self.contains(f, i)).collect()
    }

    pub fn is_subset(&self, other: &ReplacementMap) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &ReplacementMap) -> ReplacementMap {
        ReplacementMap(self.0.union(&other.0).copied().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, usize)> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// One line `f: {1,3}` per non-constant symbol of `signature`.
    pub fn render(&self, signature: &[Symbol]) -> String {
        let mut out = String::new();
        for f in signature.iter().filter(|f| f.arity() > 0) {
            let idx: Vec<String> = self.indices(*f).iter().map(|i| i.to_string()).collect();
            out.push_str(&format!("{}: {{{}}}\n", f, idx.join(",")));
        }
        out
    }
}

impl FromIterator<(Symbol, usize)> for ReplacementMap {
    fn from_iter<I: IntoIterator<Item = (Symbol, usize)>>(iter: I) -> Self {
        let mut m = ReplacementMap::new();
        for (f, i) in iter {
            m.insert(f, i);
        }
        m
    }
}

impl fmt::Debug for ReplacementMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(g, i)| format!("({g},{i})")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `Pos_μ(t)` in pre-order.
pub fn mu_positions(mu: &ReplacementMap, t: &Term) -> Vec<Position> {
    let mut out = Vec::new();
    collect_mu_positions(mu, t, &mut Vec::new(), &mut out);
    out
}

fn collect_mu_positions(mu: &ReplacementMap, t: &Term, path: &mut Vec<usize>, out: &mut Vec<Position>) {
    out.push(Position(path.clone()));
    if let Term::App(f, args) = t {
        for (i, a) in args.iter().enumerate() {
            if mu.contains(*f, i + 1) {
                path.push(i + 1);
                collect_mu_positions(mu, a, path, out);
                path.pop();
            }
        }
    }
}

pub fn is_mu_position(mu: &ReplacementMap, t: &Term, p: &Position) -> bool {
    let mut cur = t;
    for &i in &p.0 {
        match cur {
            Term::App(f, args) if i >= 1 && i <= args.len() && mu.contains(*f, i) => cur = &args[i - 1],
            _ => return false,
        }
    }
    true
}

/// Subterms of `s` at `NPos_μ(s)`.
pub fn non_replacing_subterms<'a>(mu: &ReplacementMap, s: &'a Term) -> Vec<&'a Term> {
    s.subterms()
        .into_iter()
        .filter(|(p, _)| !is_mu_position(mu, s, p))
        .map(|(_, t)| t)
        .collect()
}

/// The μ-cap of `t` relative to the left-hand side `s`.
pub fn mu_cap(mu: &ReplacementMap, trs: &Trs, s: &Term, t: &Term, gen: &mut VarGen) -> Term {
    let frozen = non_replacing_subterms(mu, s);
    cap_with(&frozen, trs, t, gen)
}

fn cap_with(frozen: &[&Term], trs: &Trs, t: &Term, gen: &mut VarGen) -> Term {
    if frozen.contains(&t) {
        return t.clone();
    }
    match t {
        Term::Var(_) => Term::Var(gen.fresh()),
        Term::App(f, args) => {
            let u = Term::app(*f, args.iter().map(|a| cap_with(frozen, trs, a, gen)).collect());
            let uvars = u.var_set();
            let unifies = trs.rules().iter().any(|rule| {
                let l = rename_apart(&rule.lhs, &uvars, gen);
                unify(&u, &l).is_some()
            });
            if unifies {
                Term::Var(gen.fresh())
            } else {
                u
            }
        }
    }
}

fn rule_gen(trs: &Trs) -> VarGen {
    VarGen::avoiding(trs.rules().iter().flat_map(|r| [&r.lhs, &r.rhs]))
}

/// The operator Υ applied to `mu`.
pub fn upsilon(trs: &Trs, mu: &ReplacementMap) -> ReplacementMap {
    let mut gen = rule_gen(trs);
    let mut out = ReplacementMap::new();
    for rule in trs.rules() {
        let frozen = non_replacing_subterms(mu, &rule.lhs);
        for (_, sub) in rule.rhs.subterms() {
            let Term::App(f, args) = sub else { continue };
            for (i, a) in args.iter().enumerate() {
                if out.contains(*f, i + 1) {
                    continue;
                }
                if cap_with(&frozen, trs, a, &mut gen) != *a {
                    out.insert(*f, i + 1);
                }
            }
        }
    }
    out
}

/// `ι = Υ(∅)`.
pub fn innermost_usable_map(trs: &Trs) -> ReplacementMap {
    upsilon(trs, &ReplacementMap::new())
}

/// `φ`, the least fixed point of Υ.
pub fn usable_map(trs: &Trs) -> ReplacementMap {
    let cap = trs.signature().len() * trs.max_arity() + 1;
    let mut mu = ReplacementMap::new();
    for _ in 0..=cap {
        let next = upsilon(trs, &mu);
        if next == mu {
            return mu;
        }
        mu = mu.union(&next);
    }
    panic!("usable replacement map did not stabilise within the lattice height");
}

/// Membership in `T(μ)`: every argument that is not a normal form sits at a μ-replacing position.
pub fn is_mu_replacing_term(mu: &ReplacementMap, trs: &Trs, t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App(f, args) => args.iter().enumerate().all(|(i, a)| {
            (mu.contains(*f, i + 1) || is_normal_form(a, trs)) && is_mu_replacing_term(mu, trs, a)
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn names(m: &ReplacementMap) -> Vec<(String, usize)> {
        m.iter().map(|(f, i)| (f.name().to_string(), i)).collect()
    }

    #[test]
    fn positions() {
        let trs = corpus::load("div").unwrap();
        let t = trs.parse_term("s(s(x))").unwrap();
        let s = trs.symbol("s").unwrap();
        let mu: ReplacementMap = [(s, 1)].into_iter().collect();
        assert_eq!(mu_positions(&mu, &t).len(), 3);
        assert_eq!(mu_positions(&ReplacementMap::new(), &t), vec![Position::root()]);
        let q = trs.symbol("quot").unwrap();
        let mu2: ReplacementMap = [(s, 1), (q, 1)].into_iter().collect();
        let u = trs.parse_term("quot(minus(x, y), s(y))").unwrap();
        assert!(!is_mu_position(&mu2, &u, &Position(vec![2])));
        assert!(is_mu_position(&mu2, &u, &Position(vec![1])));
    }

    #[test]
    fn cap_table() {
        let trs = corpus::load("div").unwrap();
        let rule = &trs.rules()[3];
        let mu = ReplacementMap::new();
        let mut gen = rule_gen(&trs);
        let r = &rule.rhs;
        let inner = &r.args()[0];
        assert!(mu_cap(&mu, &trs, &rule.lhs, &inner.args()[0], &mut gen).as_var().unwrap().is_fresh());
        assert_eq!(&mu_cap(&mu, &trs, &rule.lhs, &inner.args()[1], &mut gen), &inner.args()[1]);
        assert!(mu_cap(&mu, &trs, &rule.lhs, inner, &mut gen).as_var().unwrap().is_fresh());
        let x = trs.parse_term("x").unwrap();
        assert_eq!(mu_cap(&mu, &trs, &rule.lhs, &x, &mut gen), x);
    }

    #[test]
    fn div_maps() {
        let trs = corpus::load("div").unwrap();
        assert_eq!(
            names(&innermost_usable_map(&trs)),
            vec![("quot".into(), 1), ("s".into(), 1)]
        );
        assert_eq!(
            names(&usable_map(&trs)),
            vec![("minus".into(), 1), ("quot".into(), 1), ("s".into(), 1)]
        );
    }

    #[test]
    fn toyama_map_is_empty() {
        let trs = corpus::load("toyama").unwrap();
        assert!(usable_map(&trs).is_empty());
    }

    #[test]
    fn mu_terms() {
        let trs = corpus::load("div").unwrap();
        let mu = innermost_usable_map(&trs);
        let t = trs.parse_term("s(quot(minus(0, 0), s(0)))").unwrap();
        assert!(is_mu_replacing_term(&mu, &trs, &t));
        let u = trs.parse_term("s(minus(0, 0))").unwrap();
        assert!(!is_mu_replacing_term(&ReplacementMap::new(), &trs, &u));
    }
}
