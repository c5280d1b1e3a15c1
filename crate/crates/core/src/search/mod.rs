//! Synthesis of matrix interpretations with bounded coefficients.
//!
//! Coefficients are unknowns in `0..=B`. Linear forms of both sides of every rule are
//! computed symbolically as polynomials over these unknowns, common monomials are
//! cancelled, and the remaining comparisons are bit-blasted into a SAT instance.

mod sat;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use batsat::{BasicCallbacks, SolverInterface};
use serde::{Deserialize, Serialize};

use crate::interpretation::{
    degree, is_mu_monotone, orients, weight_gap_delta, DegreeScope, Matrix, MatrixInterpretation, OrderFlavor,
};
use crate::replacement::ReplacementMap;
use crate::term::{Symbol, Term, Var};
use crate::trs::Rule;

use sat::{Bit, Encoder, Num};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Free,
    /// Upper triangular, diagonal in `{0, 1}`.
    Triangular,
    /// Every matrix is the unit matrix.
    Unit,
    /// Unit matrices in dimension one.
    StronglyLinear,
}

#[derive(Clone, Debug)]
pub struct SearchProblem {
    pub dim: usize,
    pub bound: u64,
    pub mu: ReplacementMap,
    pub strict: Vec<Rule>,
    pub weak: Vec<Rule>,
    /// Symbols missing here default to [`Shape::Free`].
    pub shapes: BTreeMap<Symbol, Shape>,
    /// Rules whose weight gap must be well-defined.
    pub gap_rules: Vec<Rule>,
    pub degree_cap: Option<usize>,
    pub degree_scope: DegreeScope,
}

impl SearchProblem {
    pub fn new(dim: usize, bound: u64) -> SearchProblem {
        SearchProblem {
            dim,
            bound,
            mu: ReplacementMap::new(),
            strict: Vec::new(),
            weak: Vec::new(),
            shapes: BTreeMap::new(),
            gap_rules: Vec::new(),
            degree_cap: None,
            degree_scope: DegreeScope::AllSymbols,
        }
    }

    pub fn shape(&self, f: Symbol) -> Shape {
        self.shapes.get(&f).copied().unwrap_or(Shape::Free)
    }

    /// Every symbol the interpretation has to cover.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out: BTreeSet<Symbol> = self.shapes.keys().copied().collect();
        for r in self.strict.iter().chain(&self.weak).chain(&self.gap_rules) {
            out.extend(r.lhs.symbols());
            out.extend(r.rhs.symbols());
        }
        out.extend(self.mu.iter().map(|(f, _)| f));
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct Budget {
    pub deadline: Option<Instant>,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    pub fn timeout(d: Duration) -> Budget {
        Budget {
            deadline: Some(Instant::now() + d),
            cancel: None,
        }
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
            || self.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub variables: u32,
    pub clauses: u64,
    pub conflicts: u64,
    pub elapsed: Duration,
    /// False when the budget ran out before the space was decided.
    pub complete: bool,
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(MatrixInterpretation),
    Exhausted(SearchStats),
}

impl SearchOutcome {
    pub fn found(self) -> Option<MatrixInterpretation> {
        match self {
            SearchOutcome::Found(a) => Some(a),
            SearchOutcome::Exhausted(_) => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

type Mono = Vec<u32>;

/// Polynomial with natural coefficients over the unknowns.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Poly(BTreeMap<Mono, u64>);

impl Poly {
    fn constant(c: u64) -> Poly {
        let mut p = Poly::default();
        if c > 0 {
            p.0.insert(Vec::new(), c);
        }
        p
    }

    fn unknown(id: u32) -> Poly {
        Poly([(vec![id], 1)].into_iter().collect())
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            *out.0.entry(m.clone()).or_insert(0) += c;
        }
        out
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                let mut m = m1.clone();
                m.extend(m2);
                m.sort_unstable();
                *out.0.entry(m).or_insert(0) += c1 * c2;
            }
        }
        out
    }

    /// Removes what both sides have in common.
    fn cancel(a: &Poly, b: &Poly) -> (Poly, Poly) {
        let mut l = a.clone();
        let mut r = Poly::default();
        for (m, c) in &b.0 {
            let lc = l.0.get(m).copied().unwrap_or(0);
            let common = lc.min(*c);
            if lc > common {
                l.0.insert(m.clone(), lc - common);
            } else {
                l.0.remove(m);
            }
            if *c > common {
                r.0.insert(m.clone(), c - common);
            }
        }
        (l, r)
    }
}

type PolyMatrix = Vec<Vec<Poly>>;

fn pm_identity(d: usize) -> PolyMatrix {
    (0..d)
        .map(|i| (0..d).map(|j| Poly::constant(u64::from(i == j))).collect())
        .collect()
}

fn pm_mul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).fold(Poly::default(), |acc, k| acc.add(&a[i][k].mul(&b[k][j]))))
                .collect()
        })
        .collect()
}

fn pm_add(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect())
        .collect()
}

fn pm_vec(a: &PolyMatrix, v: &[Poly]) -> Vec<Poly> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(Poly::default(), |acc, (x, y)| acc.add(&x.mul(y))))
        .collect()
}

/// A coefficient slot: fixed value or unknown.
#[derive(Clone, Copy, Debug)]
enum Slot {
    Fixed(u64),
    Unknown(u32),
}

impl Slot {
    fn poly(self) -> Poly {
        match self {
            Slot::Fixed(c) => Poly::constant(c),
            Slot::Unknown(id) => Poly::unknown(id),
        }
    }
}

struct SymbolSlots {
    matrices: Vec<Vec<Vec<Slot>>>,
    constant: Vec<Slot>,
}

struct SymLinearForm {
    coefficients: BTreeMap<Var, PolyMatrix>,
    constant: Vec<Poly>,
}

struct Builder<'p> {
    problem: &'p SearchProblem,
    enc: Encoder,
    unknowns: Vec<Num>,
    slots: BTreeMap<Symbol, SymbolSlots>,
    monos: BTreeMap<Mono, Num>,
}

impl<'p> Builder<'p> {
    fn new(problem: &'p SearchProblem, callbacks: BasicCallbacks) -> Builder<'p> {
        let mut b = Builder {
            problem,
            enc: Encoder::new(callbacks),
            unknowns: Vec::new(),
            slots: BTreeMap::new(),
            monos: BTreeMap::new(),
        };
        for f in problem.symbols() {
            let s = b.make_slots(f);
            b.slots.insert(f, s);
        }
        b
    }

    fn unknown(&mut self, max: u64) -> Slot {
        if max == 0 {
            return Slot::Fixed(0);
        }
        let n = self.enc.unknown(max);
        self.unknowns.push(n);
        Slot::Unknown(self.unknowns.len() as u32 - 1)
    }

    fn make_slots(&mut self, f: Symbol) -> SymbolSlots {
        let d = self.problem.dim;
        let bound = self.problem.bound;
        let shape = self.problem.shape(f);
        let mut matrices = Vec::new();
        for _ in 0..f.arity() {
            let mut m = Vec::new();
            for i in 0..d {
                let mut row = Vec::new();
                for j in 0..d {
                    let slot = match shape {
                        Shape::Unit | Shape::StronglyLinear => Slot::Fixed(u64::from(i == j)),
                        Shape::Triangular if i > j => Slot::Fixed(0),
                        Shape::Triangular if i == j => self.unknown(1),
                        _ => self.unknown(bound),
                    };
                    row.push(slot);
                }
                m.push(row);
            }
            matrices.push(m);
        }
        let constant = (0..d).map(|_| self.unknown(bound)).collect();
        SymbolSlots { matrices, constant }
    }

    fn linear_form(&self, t: &Term) -> SymLinearForm {
        let d = self.problem.dim;
        let mut lf = SymLinearForm {
            coefficients: BTreeMap::new(),
            constant: vec![Poly::default(); d],
        };
        self.accumulate(t, &pm_identity(d), &mut lf);
        lf
    }

    fn accumulate(&self, t: &Term, path: &PolyMatrix, lf: &mut SymLinearForm) {
        match t {
            Term::Var(v) => {
                let d = self.problem.dim;
                let entry = lf
                    .coefficients
                    .entry(*v)
                    .or_insert_with(|| vec![vec![Poly::default(); d]; d]);
                *entry = pm_add(entry, path);
            }
            Term::App(f, args) => {
                let s = &self.slots[f];
                let c: Vec<Poly> = s.constant.iter().map(|x| x.poly()).collect();
                lf.constant = lf.constant.iter().zip(pm_vec(path, &c)).map(|(a, b)| a.add(&b)).collect();
                for (m, arg) in s.matrices.iter().zip(args.iter()) {
                    let pm: PolyMatrix = m.iter().map(|r| r.iter().map(|x| x.poly()).collect()).collect();
                    self.accumulate(arg, &pm_mul(path, &pm), lf);
                }
            }
        }
    }

    fn mono(&mut self, m: &Mono) -> Num {
        if let Some(n) = self.monos.get(m) {
            return n.clone();
        }
        let n = match m.len() {
            0 => Num::constant(1),
            1 => self.unknowns[m[0] as usize].clone(),
            k => {
                let prefix = self.mono(&m[..k - 1].to_vec());
                let last = self.unknowns[m[k - 1] as usize].clone();
                self.enc.mul(&prefix, &last)
            }
        };
        self.monos.insert(m.clone(), n.clone());
        n
    }

    fn num(&mut self, p: &Poly) -> Num {
        let mut terms = Vec::new();
        for (m, c) in &p.0 {
            let n = self.mono(m);
            terms.push(if *c == 1 { n } else { self.enc.mul_const(&n, *c) });
        }
        self.enc.sum(&terms)
    }

    fn compare(&mut self, a: &Poly, b: &Poly, strict: bool) -> Bit {
        let (l, r) = Poly::cancel(a, b);
        if r.0.is_empty() && !strict {
            return Bit::TRUE;
        }
        let ln = self.num(&l);
        let rn = self.num(&r);
        if strict {
            self.enc.gt(&ln, &rn)
        } else {
            self.enc.ge(&ln, &rn)
        }
    }

    /// Right coefficients dominated entry-wise by the left ones.
    fn dominated(&mut self, l: &SymLinearForm, r: &SymLinearForm) -> Vec<Bit> {
        let d = self.problem.dim;
        let zero = vec![vec![Poly::default(); d]; d];
        let mut out = Vec::new();
        for (v, rm) in &r.coefficients {
            let lm = l.coefficients.get(v).unwrap_or(&zero);
            for i in 0..d {
                for j in 0..d {
                    out.push(self.compare(&lm[i][j], &rm[i][j], false));
                }
            }
        }
        out
    }

    fn orient(&mut self, rule: &Rule, flavor: OrderFlavor) {
        let l = self.linear_form(&rule.lhs);
        let r = self.linear_form(&rule.rhs);
        for b in self.dominated(&l, &r) {
            self.enc.assert(b);
        }
        for i in 0..self.problem.dim {
            let strict = i == 0 && flavor == OrderFlavor::Strict;
            let b = self.compare(&l.constant[i], &r.constant[i], strict);
            self.enc.assert(b);
        }
    }

    fn gap(&mut self, rule: &Rule) {
        let l = self.linear_form(&rule.lhs);
        let r = self.linear_form(&rule.rhs);
        for b in self.dominated(&l, &r) {
            self.enc.assert(b);
        }
    }

    fn slot_bit_nonzero(&mut self, s: Slot) -> Bit {
        match s {
            Slot::Fixed(c) => Bit::Const(c > 0),
            Slot::Unknown(id) => {
                let bits = self.unknowns[id as usize].bits.clone();
                self.enc.or_all(&bits)
            }
        }
    }

    fn monotone(&mut self) {
        for (f, i) in self.problem.mu.iter() {
            let s = self.slots[&f].matrices[i - 1][0][0];
            let b = self.slot_bit_nonzero(s);
            self.enc.assert(b);
        }
    }

    fn degree_cap(&mut self) {
        let Some(cap) = self.problem.degree_cap else { return };
        let d = self.problem.dim;
        if cap >= d {
            return;
        }
        let scoped: Vec<Symbol> = self
            .slots
            .keys()
            .copied()
            .filter(|f| match &self.problem.degree_scope {
                DegreeScope::AllSymbols => true,
                DegreeScope::Only(set) => set.contains(f),
            })
            .collect();
        let mut diag = Vec::new();
        let mut off = Vec::new();
        for k in 0..d {
            let mut ones = Vec::new();
            for f in &scoped {
                for m in self.slots[f].matrices.clone() {
                    ones.push(self.slot_bit_nonzero(m[k][k]));
                    for j in 0..d {
                        if j != k {
                            off.push(self.slot_bit_nonzero(m[k][j]));
                        }
                    }
                }
            }
            diag.push(self.enc.or_all(&ones));
        }
        let unit = if matches!(self.problem.degree_scope, DegreeScope::Only(_)) && cap >= 1 {
            let all_diag = self.enc.and_all(&diag);
            let any_off = self.enc.or_all(&off);
            self.enc.and(all_diag, any_off.not())
        } else {
            Bit::FALSE
        };
        for subset in subsets(d, cap + 1) {
            let mut clause: Vec<Bit> = subset.iter().map(|&k| diag[k].not()).collect();
            clause.push(unit);
            self.enc.clause(&clause);
        }
    }

    fn decode(&self) -> MatrixInterpretation {
        let d = self.problem.dim;
        let value = |s: &Slot| match s {
            Slot::Fixed(c) => *c,
            Slot::Unknown(id) => self.enc.value(&self.unknowns[*id as usize]),
        };
        let mut a = MatrixInterpretation::new(d);
        for (f, s) in &self.slots {
            let matrices = s
                .matrices
                .iter()
                .map(|m| Matrix::from_rows(&m.iter().map(|r| r.iter().map(value).collect()).collect::<Vec<_>>()))
                .collect();
            a.set(*f, matrices, s.constant.iter().map(value).collect());
        }
        a
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

pub fn find_interpretation(p: &SearchProblem, budget: &Budget) -> SearchOutcome {
    assert!(p.dim >= 1 && p.bound >= 1, "dimension and coefficient bound must be positive");
    let start = Instant::now();
    let mut callbacks = BasicCallbacks::new();
    let stop = budget.clone();
    callbacks.set_stop(move || stop.expired());
    let mut b = Builder::new(p, callbacks);
    for r in &p.strict {
        b.orient(r, OrderFlavor::Strict);
    }
    for r in &p.weak {
        b.orient(r, OrderFlavor::Weak);
    }
    for r in &p.gap_rules {
        b.gap(r);
    }
    b.monotone();
    b.degree_cap();
    let result = if budget.expired() { None } else { b.enc.solve() };
    if result == Some(true) {
        let a = b.decode();
        assert!(verify(&a, p), "decoded interpretation fails verification:\n{a}");
        return SearchOutcome::Found(a);
    }
    SearchOutcome::Exhausted(SearchStats {
        variables: b.enc.solver.num_vars(),
        clauses: b.enc.solver.num_clauses(),
        conflicts: b.enc.solver.num_conflicts(),
        elapsed: start.elapsed(),
        complete: result.is_some(),
    })
}

/// Re-checks every constraint of `p` on `a` with the interpretation checkers.
pub fn verify(a: &MatrixInterpretation, p: &SearchProblem) -> bool {
    if a.dim() != p.dim || !p.symbols().iter().all(|f| a.interprets(*f)) {
        return false;
    }
    let oriented = |rules: &[Rule], flavor| rules.iter().all(|r| orients(a, r, flavor).unwrap_or(false));
    let shapes_ok = a.symbols().all(|(f, i)| match p.shape(f) {
        Shape::Free => true,
        Shape::Triangular => i.matrices.iter().all(Matrix::is_triangular),
        Shape::Unit => i.matrices.iter().all(Matrix::is_unit),
        Shape::StronglyLinear => a.dim() == 1 && i.matrices.iter().all(Matrix::is_unit),
    });
    let degree_ok = match p.degree_cap {
        None => true,
        Some(cap) => degree(a, &p.degree_scope).is_ok_and(|k| k <= cap),
    };
    oriented(&p.strict, OrderFlavor::Strict)
        && oriented(&p.weak, OrderFlavor::Weak)
        && is_mu_monotone(a, &p.mu)
        && shapes_ok
        && degree_ok
        && (p.gap_rules.is_empty() || weight_gap_delta(a, &p.gap_rules).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::replacement::usable_map;
    use crate::trs::{parse_trs, Trs};

    fn direct(trs: &Trs, dim: usize, bound: u64) -> SearchProblem {
        let mut p = SearchProblem::new(dim, bound);
        p.mu = usable_map(trs);
        p.strict = trs.rules().to_vec();
        p.shapes = trs.constructors().into_iter().map(|c| (c, Shape::Triangular)).collect();
        p.degree_scope = DegreeScope::Only(trs.constructors());
        p
    }

    #[test]
    fn div_direct_found() {
        let trs = corpus::load("div").unwrap();
        let p = direct(&trs, 1, 3);
        let a = find_interpretation(&p, &Budget::unlimited()).found().expect("div is orientable");
        assert!(verify(&a, &p));
        let again = find_interpretation(&p, &Budget::unlimited()).found().unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn known_witness_verifies() {
        let trs = corpus::load("div").unwrap();
        let s = |n| trs.symbol(n).unwrap();
        let a = MatrixInterpretation::new(1)
            .with_linear(s("0"), &[], 1)
            .with_linear(s("s"), &[1], 2)
            .with_linear(s("minus"), &[1, 0], 1)
            .with_linear(s("quot"), &[3, 0], 0);
        let mut p = direct(&trs, 1, 3);
        assert!(verify(&a, &p));
        p.weak = p.strict.clone();
        p.strict = vec![Rule::new(trs.parse_term("minus(x, y)").unwrap(), trs.parse_term("y").unwrap())];
        assert!(!verify(&a, &p));
    }

    #[test]
    fn diff_direct_exhausted_in_dimension_one() {
        let trs = corpus::load("diff").unwrap();
        let out = find_interpretation(&direct(&trs, 1, 3), &Budget::unlimited());
        assert!(matches!(out, SearchOutcome::Exhausted(SearchStats { complete: true, .. })));
    }

    #[test]
    fn growing_rhs_exhausted() {
        let trs = parse_trs("(VAR x)\n(RULES f(x) -> s(f(x)) g(0) -> 0)").unwrap();
        for dim in 1..=2 {
            for bound in 1..=3 {
                let mut p = SearchProblem::new(dim, bound);
                p.mu = ReplacementMap::full(trs.signature());
                p.strict = trs.rules()[..1].to_vec();
                assert!(!find_interpretation(&p, &Budget::unlimited()).is_found());
            }
        }
    }

    #[test]
    fn identity_verifies_weak_problem() {
        let trs = parse_trs("(VAR x y)\n(RULES f(x, y) -> x g(x) -> x g(a) -> a)").unwrap();
        let mut a = MatrixInterpretation::new(2);
        for f in trs.signature() {
            a.set(*f, vec![Matrix::identity(2); f.arity()], vec![0, 0]);
        }
        let mut p = SearchProblem::new(2, 3);
        p.weak = trs.rules().to_vec();
        assert!(verify(&a, &p));
    }

    #[test]
    fn degree_cap_respected() {
        let trs = corpus::load("div").unwrap();
        let mut p = direct(&trs, 2, 2);
        p.degree_cap = Some(1);
        let a = find_interpretation(&p, &Budget::unlimited()).found().unwrap();
        assert!(degree(&a, &p.degree_scope).unwrap() <= 1);
    }

    #[test]
    fn expired_budget_is_incomplete() {
        let trs = corpus::load("div").unwrap();
        let budget = Budget::timeout(Duration::ZERO);
        match find_interpretation(&direct(&trs, 1, 3), &budget) {
            SearchOutcome::Exhausted(s) => assert!(!s.complete),
            SearchOutcome::Found(_) => panic!("expected timeout"),
        }
    }
}
