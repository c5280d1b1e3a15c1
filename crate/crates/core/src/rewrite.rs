//! Rewrite steps (full, innermost, μ-restricted, relative) and the brute-force
//! derivation height oracle.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::replacement::{is_mu_position, ReplacementMap};
use crate::term::{match_term, Position, Symbol, Term};
use crate::trs::{Strategy, Trs};

pub const DEFAULT_FUEL: u64 = 100_000;
pub const DEFAULT_CLOSURE_BUDGET: usize = 100_000;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepMode {
    pub strategy: Strategy,
    pub mu: Option<ReplacementMap>,
}

impl StepMode {
    pub fn full() -> StepMode {
        StepMode::default()
    }

    pub fn innermost() -> StepMode {
        StepMode {
            strategy: Strategy::Innermost,
            mu: None,
        }
    }

    pub fn of(strategy: Strategy) -> StepMode {
        StepMode { strategy, mu: None }
    }

    pub fn restricted_to(mut self, mu: ReplacementMap) -> StepMode {
        self.mu = Some(mu);
        self
    }
}

/// One rewrite step: the redex position, the 1-based rule index and the reduct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub position: Position,
    pub rule: usize,
    pub result: Term,
}

#[derive(Debug, Clone)]
pub struct RelativeProblem {
    pub strict: Trs,
    pub weak: Trs,
}

impl RelativeProblem {
    pub fn new(strict: Trs, weak: Trs) -> RelativeProblem {
        RelativeProblem { strict, weak }
    }
}

#[derive(Clone, Copy)]
enum Arguments<'a> {
    Any,
    Innermost,
    NormalWrt(&'a Rewriter),
}

/// Rules indexed by root symbol.
#[derive(Debug, Clone)]
pub struct Rewriter {
    trs: Trs,
    by_root: HashMap<Symbol, Vec<usize>>,
}

impl Rewriter {
    pub fn new(trs: &Trs) -> Rewriter {
        let mut by_root: HashMap<Symbol, Vec<usize>> = HashMap::new();
        for (i, r) in trs.rules().iter().enumerate() {
            if let Some(f) = r.lhs.root() {
                by_root.entry(f).or_default().push(i);
            }
        }
        Rewriter {
            trs: trs.clone(),
            by_root,
        }
    }

    pub fn trs(&self) -> &Trs {
        &self.trs
    }

    fn root_steps(&self, t: &Term, out: &mut Vec<(Position, usize, Term)>, path: &[usize]) {
        let Some(f) = t.root() else { return };
        let Some(candidates) = self.by_root.get(&f) else { return };
        for &i in candidates {
            let rule = &self.trs.rules()[i];
            if let Some(sigma) = match_term(&rule.lhs, t) {
                out.push((Position(path.to_vec()), i + 1, rule.rhs.apply(&sigma)));
            }
        }
    }

    pub fn is_redex(&self, t: &Term) -> bool {
        let Some(f) = t.root() else { return false };
        self.by_root
            .get(&f)
            .is_some_and(|c| c.iter().any(|&i| match_term(&self.trs.rules()[i].lhs, t).is_some()))
    }

    pub fn is_normal_form(&self, t: &Term) -> bool {
        !self.is_redex(t) && t.args().iter().all(|a| self.is_normal_form(a))
    }

    fn collect(&self, t: &Term, path: &mut Vec<usize>, mode: Arguments, out: &mut Vec<(Position, usize, Term)>) {
        let before = out.len();
        let mut inner = Vec::new();
        for (i, a) in t.args().iter().enumerate() {
            path.push(i + 1);
            self.collect(a, path, mode, &mut inner);
            path.pop();
        }
        let root_allowed = match mode {
            Arguments::Any => true,
            Arguments::Innermost => inner.is_empty(),
            Arguments::NormalWrt(nf) => t.args().iter().all(|a| nf.is_normal_form(a)),
        };
        if root_allowed {
            self.root_steps(t, out, path);
        }
        debug_assert!(out.len() >= before);
        out.extend(inner);
    }

    fn raw_steps(&self, t: &Term, mode: Arguments) -> Vec<(Position, usize, Term)> {
        let mut out = Vec::new();
        self.collect(t, &mut Vec::new(), mode, &mut out);
        out
    }

    /// One-step successors of `t` under `mode`.
    pub fn reducts(&self, t: &Term, mode: &StepMode) -> Vec<Step> {
        let args = match mode.strategy {
            Strategy::Full => Arguments::Any,
            Strategy::Innermost => Arguments::Innermost,
        };
        self.finish(t, self.raw_steps(t, args), mode.mu.as_ref())
    }

    fn restricted_reducts(&self, t: &Term, nf: &Rewriter) -> Vec<Step> {
        self.finish(t, self.raw_steps(t, Arguments::NormalWrt(nf)), None)
    }

    fn finish(&self, t: &Term, raw: Vec<(Position, usize, Term)>, mu: Option<&ReplacementMap>) -> Vec<Step> {
        let mut steps: Vec<Step> = raw
            .into_iter()
            .filter(|(p, _, _)| mu.is_none_or(|mu| is_mu_position(mu, t, p)))
            .map(|(position, rule, sub)| Step {
                result: t.replace_at(&position, sub).expect("redex position exists"),
                position,
                rule,
            })
            .collect();
        steps.sort_by(|a, b| a.position.cmp(&b.position).then(a.rule.cmp(&b.rule)));
        steps
    }

    pub fn successors(&self, t: &Term, mode: &StepMode) -> Vec<Term> {
        dedup(self.reducts(t, mode).into_iter().map(|s| s.result))
    }
}

fn dedup(terms: impl IntoIterator<Item = Term>) -> Vec<Term> {
    let mut seen = HashSet::new();
    terms.into_iter().filter(|t| seen.insert(t.clone())).collect()
}

pub fn reducts(t: &Term, trs: &Trs, mode: &StepMode) -> Vec<Step> {
    Rewriter::new(trs).reducts(t, mode)
}

pub fn is_normal_form(t: &Term, trs: &Trs) -> bool {
    Rewriter::new(trs).is_normal_form(t)
}

/// Successors under the relative relation `→*_S · →_R · →*_S`, or its innermost
/// variant built from the restricted relation (redex arguments normal for `R ∪ S`).
pub struct RelativeRewriter {
    strict: Rewriter,
    weak: Rewriter,
    both: Rewriter,
    strategy: Strategy,
    budget: usize,
}

impl RelativeRewriter {
    pub fn new(prob: &RelativeProblem, strategy: Strategy, budget: usize) -> RelativeRewriter {
        RelativeRewriter {
            strict: Rewriter::new(&prob.strict),
            weak: Rewriter::new(&prob.weak),
            both: Rewriter::new(&prob.strict.union(&prob.weak)),
            strategy,
            budget,
        }
    }

    fn step(&self, sys: &Rewriter, t: &Term) -> Vec<Term> {
        let steps = match self.strategy {
            Strategy::Full => sys.reducts(t, &StepMode::full()),
            Strategy::Innermost => sys.restricted_reducts(t, &self.both),
        };
        steps.into_iter().map(|s| s.result).collect()
    }

    fn weak_closure(&self, t: &Term) -> Result<Vec<Term>> {
        let mut seen: HashSet<Term> = HashSet::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(t.clone());
        queue.push_back(t.clone());
        while let Some(u) = queue.pop_front() {
            for v in self.step(&self.weak, &u) {
                if seen.insert(v.clone()) {
                    if seen.len() > self.budget {
                        return Err(Error::RelativeBudgetExceeded);
                    }
                    queue.push_back(v);
                }
            }
            order.push(u);
        }
        Ok(order)
    }

    pub fn successors(&self, t: &Term) -> Result<Vec<Term>> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for u in self.weak_closure(t)? {
            for v in self.step(&self.strict, &u) {
                for w in self.weak_closure(&v)? {
                    if seen.insert(w.clone()) {
                        out.push(w);
                    }
                }
            }
        }
        Ok(out)
    }
}

pub fn relative_reducts(t: &Term, prob: &RelativeProblem, mode: &StepMode) -> Result<Vec<Term>> {
    relative_reducts_with_budget(t, prob, mode, DEFAULT_CLOSURE_BUDGET)
}

pub fn relative_reducts_with_budget(
    t: &Term,
    prob: &RelativeProblem,
    mode: &StepMode,
    budget: usize,
) -> Result<Vec<Term>> {
    RelativeRewriter::new(prob, mode.strategy, budget).successors(t)
}

/// Result of the derivation height oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Height {
    Finite(u64),
    /// Some derivation exceeds the fuel, or the term is not terminating.
    Diverged(u64),
}

impl Height {
    pub fn value(self) -> Option<u64> {
        match self {
            Height::Finite(n) => Some(n),
            Height::Diverged(_) => None,
        }
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(n) => write!(f, "{n}"),
            Height::Diverged(fuel) => write!(f, "diverged({fuel})"),
        }
    }
}

/// How the height of a term is obtained from other terms.
#[derive(Debug, Clone)]
pub enum Expansion {
    /// One-step successors: the height is one more than the highest successor.
    Steps(Vec<Term>),
    /// Independent parts whose derivations interleave freely: the height is their sum.
    Parts(Vec<Term>),
}

/// Longest-derivation search with a memo table shared across queries.
pub struct HeightOracle<F> {
    expand: F,
    memo: HashMap<Term, u64>,
    fuel: u64,
}

struct Frame {
    term: Term,
    children: Vec<Term>,
    sum: bool,
    next: usize,
    acc: u64,
}

impl Frame {
    fn new(term: Term, expansion: Expansion) -> Frame {
        let (children, sum) = match expansion {
            Expansion::Steps(c) => (c, false),
            Expansion::Parts(c) => (c, true),
        };
        Frame {
            term,
            children,
            sum,
            next: 0,
            acc: 0,
        }
    }

    fn absorb(&mut self, h: u64) {
        if self.sum {
            self.acc += h;
        } else {
            self.acc = self.acc.max(h + 1);
        }
    }
}

impl<F: FnMut(&Term) -> Result<Expansion>> HeightOracle<F> {
    pub fn new(expand: F, fuel: u64) -> HeightOracle<F> {
        assert!(fuel > 0, "fuel must be positive");
        HeightOracle {
            expand,
            memo: HashMap::new(),
            fuel,
        }
    }

    pub fn memo_size(&self) -> usize {
        self.memo.len()
    }

    pub fn height(&mut self, t: &Term) -> Result<Height> {
        if let Some(&h) = self.memo.get(t) {
            return Ok(Height::Finite(h));
        }
        let diverged = Height::Diverged(self.fuel);
        let mut on_stack: HashSet<Term> = HashSet::new();
        let first = Frame::new(t.clone(), (self.expand)(t)?);
        let mut step_frames = u64::from(!first.sum);
        on_stack.insert(t.clone());
        let mut stack = vec![first];
        while let Some(top) = stack.last_mut() {
            if top.next < top.children.len() {
                let child = top.children[top.next].clone();
                top.next += 1;
                if let Some(&h) = self.memo.get(&child) {
                    top.absorb(h);
                    if top.acc > self.fuel {
                        return Ok(diverged);
                    }
                    continue;
                }
                if on_stack.contains(&child) || step_frames >= self.fuel {
                    return Ok(diverged);
                }
                let frame = Frame::new(child.clone(), (self.expand)(&child)?);
                step_frames += u64::from(!frame.sum);
                on_stack.insert(child);
                stack.push(frame);
            } else {
                let done = stack.pop().unwrap();
                step_frames -= u64::from(!done.sum);
                on_stack.remove(&done.term);
                if done.acc > self.fuel {
                    return Ok(diverged);
                }
                if let Some(parent) = stack.last_mut() {
                    parent.absorb(done.acc);
                }
                self.memo.insert(done.term, done.acc);
            }
        }
        Ok(Height::Finite(self.memo[t]))
    }
}

/// An oracle over plain rewriting in `trs`. Terms rooted by a constructor are split
/// into their arguments, which is exact because such a root is never rewritten.
pub fn trs_oracle(trs: &Trs, mode: &StepMode, fuel: u64) -> HeightOracle<impl FnMut(&Term) -> Result<Expansion>> {
    let rw = Rewriter::new(trs);
    let defined = trs.defined_symbols();
    let mode = mode.clone();
    HeightOracle::new(
        move |t: &Term| {
            Ok(match t.root() {
                Some(f) if mode.mu.is_none() && !defined.contains(&f) => Expansion::Parts(t.args().to_vec()),
                _ => Expansion::Steps(rw.successors(t, &mode)),
            })
        },
        fuel,
    )
}

pub fn derivation_height(t: &Term, trs: &Trs, mode: &StepMode, fuel: u64) -> Height {
    trs_oracle(trs, mode, fuel)
        .height(t)
        .expect("plain rewriting cannot fail")
}

pub fn relative_derivation_height(
    t: &Term,
    prob: &RelativeProblem,
    mode: &StepMode,
    fuel: u64,
) -> Result<Height> {
    let rw = RelativeRewriter::new(prob, mode.strategy, DEFAULT_CLOSURE_BUDGET);
    let defined: std::collections::BTreeSet<Symbol> = prob
        .strict
        .defined_symbols()
        .union(&prob.weak.defined_symbols())
        .copied()
        .collect();
    HeightOracle::new(
        |t: &Term| {
            Ok(match t.root() {
                Some(f) if !defined.contains(&f) => Expansion::Parts(t.args().to_vec()),
                _ => Expansion::Steps(rw.successors(t)?),
            })
        },
        fuel,
    )
    .height(t)
}

/// Ground constructor terms over `constructors`, grouped by size `0..=max`.
pub fn constructor_terms_by_size(constructors: &[Symbol], max: usize) -> Vec<Vec<Term>> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); max + 1];
    for n in 1..=max {
        let mut terms = Vec::new();
        for &c in constructors {
            for args in arg_tuples(&by_size, c.arity(), n - 1) {
                terms.push(Term::app(c, args));
            }
        }
        by_size[n] = terms;
    }
    by_size
}

/// All tuples of `k` terms from `pool` whose sizes sum to `total`.
fn arg_tuples(pool: &[Vec<Term>], k: usize, total: usize) -> Vec<Vec<Term>> {
    if k == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(k - 1) {
        if first >= pool.len() {
            break;
        }
        let rests = arg_tuples(pool, k - 1, total - first);
        for t in &pool[first] {
            for rest in &rests {
                let mut v = Vec::with_capacity(k);
                v.push(t.clone());
                v.extend(rest.iter().cloned());
                out.push(v);
            }
        }
    }
    out
}

fn name_key(t: &Term) -> Vec<&'static str> {
    let mut out = Vec::new();
    fn go(t: &Term, out: &mut Vec<&'static str>) {
        if let Term::App(f, args) = t {
            out.push(f.name());
            args.iter().for_each(|a| go(a, out));
        }
    }
    go(t, &mut out);
    out
}

/// Ground basic terms of size at most `n`, ordered by size and then by symbol names.
pub fn basic_terms_up_to(trs: &Trs, n: usize) -> Vec<Term> {
    let constructors: Vec<Symbol> = trs.constructors().into_iter().collect();
    let pool = constructor_terms_by_size(&constructors, n);
    let mut out = Vec::new();
    for f in trs.defined_symbols() {
        for size in 1..=n {
            for args in arg_tuples(&pool, f.arity(), size - 1) {
                out.push(Term::app(f, args));
            }
        }
    }
    out.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| name_key(a).cmp(&name_key(b))));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RcSample {
    pub n: usize,
    pub rc: u64,
    /// Some ground basic term of size at most `n` exhausted the fuel.
    pub diverged: bool,
}

/// `rc(n)` for `n = 1..=n_max`, the maximal height over ground basic terms of size at most `n`.
pub fn runtime_complexity_samples(trs: &Trs, mode: &StepMode, n_max: usize, fuel: u64) -> Vec<RcSample> {
    let mut oracle = trs_oracle(trs, mode, fuel);
    let terms = basic_terms_up_to(trs, n_max);
    let mut out = Vec::new();
    let mut rc = 0;
    let mut diverged = false;
    let mut idx = 0;
    for n in 1..=n_max {
        while idx < terms.len() && terms[idx].size() == n {
            match oracle.height(&terms[idx]).expect("plain rewriting cannot fail") {
                Height::Finite(h) => rc = rc.max(h),
                Height::Diverged(_) => diverged = true,
            }
            idx += 1;
        }
        out.push(RcSample { n, rc, diverged });
    }
    out
}

/// A bound `v(n) ≤ C·n^k` fitted on the small sizes and validated on all of them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundFit {
    pub constant: f64,
    pub holds: bool,
}

/// Fits `C` on samples with `n ≤ fit_upto` and takes the larger of two estimates: the steepest
/// increment per unit of `n^k` plus the largest remaining offset, and the sum of the positive
/// coefficients of the degree-`k` polynomial through the last `k + 1` fitted samples. Every
/// sample must then satisfy `v ≤ C·n^k`.
pub fn fit_bound(samples: &[(usize, u64)], k: u32, fit_upto: usize) -> BoundFit {
    let scale = |n: usize| (n as f64).powi(k as i32);
    let fit: Vec<(usize, u64)> = samples.iter().copied().filter(|(n, _)| *n <= fit_upto).collect();
    let mut slope: f64 = 0.0;
    for w in fit.windows(2) {
        let dn = scale(w[1].0) - scale(w[0].0);
        if dn > 0.0 {
            slope = slope.max((w[1].1 as f64 - w[0].1 as f64) / dn);
        }
    }
    let offset = fit
        .iter()
        .map(|(n, v)| *v as f64 - slope * scale(*n))
        .fold(0.0, f64::max);
    let mut constant = slope + offset;
    if fit.len() > k as usize {
        let tail = &fit[fit.len() - k as usize - 1..];
        let positive: f64 = interpolate(tail).into_iter().filter(|c| *c > 0.0).sum();
        constant = constant.max(positive);
    }
    let holds = samples
        .iter()
        .all(|(n, v)| *v as f64 <= constant * scale((*n).max(1)) + 1e-9);
    BoundFit { constant, holds }
}

/// Coefficients, lowest degree first, of the polynomial through the given points.
fn interpolate(points: &[(usize, u64)]) -> Vec<f64> {
    let xs: Vec<f64> = points.iter().map(|(n, _)| *n as f64).collect();
    let mut dd: Vec<f64> = points.iter().map(|(_, v)| *v as f64).collect();
    for level in 1..dd.len() {
        for i in (level..dd.len()).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    let mut coeffs = vec![0.0; dd.len()];
    for i in (0..dd.len()).rev() {
        let mut next = vec![0.0; dd.len()];
        for (j, c) in coeffs.iter().enumerate() {
            if j + 1 < next.len() {
                next[j + 1] += c;
            }
            next[j] -= c * xs[i];
        }
        next[0] += dd[i];
        coeffs = next;
    }
    coeffs
}
