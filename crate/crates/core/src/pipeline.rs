//! The analysis strategies and the portfolio that combines them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::AtomicBool;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use crate::certificate::{
    fingerprint, map_entries, one_based, rendered_pairs, Certificate, Evidence, GapEvidence, GapKind, Method,
    PathEvidence,
};
use crate::dp::{dependency_pairs_for, DpProblem};
use crate::graph::{congruence_graph, estimate_graph, maximal_source_paths};
use crate::interpretation::{degree, nonduplicating_slmi_gap, weight_gap_delta, DegreeScope, MatrixInterpretation};
use crate::replacement::{innermost_usable_map, usable_map, ReplacementMap};
use crate::search::{find_interpretation, Budget, SearchOutcome, SearchProblem, Shape};
use crate::term::Symbol;
use crate::trs::{Rule, Strategy, Trs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StrategyKind {
    Direct,
    Wdp,
    Wdg,
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<StrategyKind, String> {
        match s {
            "direct" => Ok(StrategyKind::Direct),
            "wdp" => Ok(StrategyKind::Wdp),
            "wdg" => Ok(StrategyKind::Wdg),
            _ => Err(format!("unknown strategy `{s}` (expected direct, wdp or wdg)")),
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::Direct => "direct",
            StrategyKind::Wdp => "wdp",
            StrategyKind::Wdg => "wdg",
        })
    }
}

/// Parameters shared by every interpretation search.
#[derive(Clone, Debug)]
pub struct SearchParams {
    /// Dimensions `1..=max_dim` are tried in order.
    pub max_dim: usize,
    pub bound: u64,
    pub degree_cap: Option<usize>,
    /// Time limit for a single interpretation search, within the global deadline.
    pub search_time: Option<Duration>,
}

impl Default for SearchParams {
    fn default() -> SearchParams {
        SearchParams {
            max_dim: 2,
            bound: 3,
            degree_cap: None,
            search_time: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    pub strategies: Vec<StrategyKind>,
    pub params: SearchParams,
    /// `None` follows the strategy declared by the system.
    pub mode: Option<Strategy>,
    pub timeout: Duration,
}

impl Default for AnalysisConfig {
    fn default() -> AnalysisConfig {
        AnalysisConfig {
            strategies: vec![StrategyKind::Direct, StrategyKind::Wdp, StrategyKind::Wdg],
            params: SearchParams::default(),
            mode: None,
            timeout: Duration::from_secs(60),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub certificate: Option<Certificate>,
    pub timed_out: bool,
    pub notes: Vec<String>,
}

impl Analysis {
    pub fn verdict(&self) -> String {
        match &self.certificate {
            Some(c) => crate::certificate::verdict(c.degree),
            None => "MAYBE".to_string(),
        }
    }
}

fn map_for(trs: &Trs, mode: Strategy) -> ReplacementMap {
    match mode {
        Strategy::Full => usable_map(trs),
        Strategy::Innermost => innermost_usable_map(trs),
    }
}

struct Ctx<'a> {
    params: &'a SearchParams,
    budget: &'a Budget,
    constructors: BTreeSet<Symbol>,
    compounds: Vec<Symbol>,
}

impl<'a> Ctx<'a> {
    fn new(trs: &'a Trs, params: &'a SearchParams, budget: &'a Budget, compounds: &[Symbol]) -> Ctx<'a> {
        Ctx {
            params,
            budget,
            constructors: trs.constructors(),
            compounds: compounds.to_vec(),
        }
    }

    fn scope(&self) -> DegreeScope {
        DegreeScope::Only(self.constructors.clone())
    }

    /// An RMI skeleton: constructors triangular, compounds unit when `adequate`.
    fn problem(&self, dim: usize, mu: &ReplacementMap, adequate: bool) -> SearchProblem {
        let mut p = SearchProblem::new(dim, self.params.bound);
        p.mu = mu.clone();
        p.shapes = self.constructors.iter().map(|c| (*c, Shape::Triangular)).collect();
        if adequate {
            p.shapes.extend(self.compounds.iter().map(|c| (*c, Shape::Unit)));
        }
        p.degree_scope = self.scope();
        p
    }

    /// The lowest-degree solution in the smallest dimension that admits one.
    fn best(&self, make: impl Fn(usize) -> SearchProblem) -> Option<(MatrixInterpretation, usize)> {
        for dim in 1..=self.params.max_dim {
            let mut p = make(dim);
            p.degree_cap = self.params.degree_cap;
            let Some(mut a) = self.search(&p) else { continue };
            let mut k = degree(&a, &p.degree_scope).ok()?;
            while k > 0 {
                p.degree_cap = Some(k - 1);
                match self.search(&p) {
                    Some(b) => {
                        k = degree(&b, &p.degree_scope).ok()?;
                        a = b;
                    }
                    None => break,
                }
            }
            return Some((a, k));
        }
        None
    }

    fn search(&self, p: &SearchProblem) -> Option<MatrixInterpretation> {
        let mut budget = self.budget.clone();
        if let Some(limit) = self.params.search_time {
            let local = Instant::now() + limit;
            budget.deadline = Some(budget.deadline.map_or(local, |d| d.min(local)));
        }
        match find_interpretation(p, &budget) {
            SearchOutcome::Found(a) => Some(a),
            SearchOutcome::Exhausted(_) => None,
        }
    }

    /// A weight-gap interpretation for `pairs` relative to `usable`, preferring the general form.
    fn gap(&self, pairs: &[Rule], usable: &[Rule], mu: &ReplacementMap) -> Option<(GapEvidence, usize)> {
        let general = self.best(|dim| {
            let mut p = self.problem(dim, mu, true);
            p.strict = usable.to_vec();
            p.gap_rules = pairs.to_vec();
            p
        });
        if let Some((a, k)) = general {
            let delta = weight_gap_delta(&a, pairs)?;
            return Some((evidence(GapKind::WeightGap, &a, delta), k));
        }
        if pairs.iter().any(Rule::is_duplicating) {
            return None;
        }
        let mut p = self.problem(1, mu, true);
        p.strict = usable.to_vec();
        for r in pairs {
            p.shapes.extend(r.lhs.symbols().into_iter().chain(r.rhs.symbols()).map(|f| (f, Shape::StronglyLinear)));
        }
        for r in usable {
            p.shapes.extend(r.lhs.symbols().into_iter().chain(r.rhs.symbols()).map(|f| (f, Shape::StronglyLinear)));
        }
        for f in p.symbols() {
            p.shapes.insert(f, Shape::StronglyLinear);
        }
        p.degree_cap = self.params.degree_cap;
        let a = self.search(&p)?;
        let k = degree(&a, &self.scope()).ok()?;
        let delta = nonduplicating_slmi_gap(&a, pairs)?;
        Some((evidence(GapKind::StronglyLinear, &a, delta), k))
    }
}

fn evidence(kind: GapKind, a: &MatrixInterpretation, delta: u64) -> GapEvidence {
    GapEvidence {
        kind,
        interpretation: a.to_data(),
        delta,
    }
}

fn certificate(trs: &Trs, mode: Strategy, method: Method, degree: usize, evidence: Evidence) -> Certificate {
    Certificate {
        fingerprint: fingerprint(trs),
        mode,
        method,
        degree,
        evidence,
    }
}

/// A μ-monotone RMI compatible with the whole system.
pub fn analyze_direct(trs: &Trs, mode: Strategy, params: &SearchParams, budget: &Budget) -> Option<Certificate> {
    let ctx = Ctx::new(trs, params, budget, &[]);
    let mu = map_for(trs, mode);
    let (a, k) = ctx.best(|dim| {
        let mut p = ctx.problem(dim, &mu, false);
        p.strict = trs.rules().to_vec();
        p
    })?;
    Some(certificate(
        trs,
        mode,
        Method::Direct,
        k,
        Evidence::Direct {
            map: map_entries(&mu),
            interpretation: a.to_data(),
        },
    ))
}

/// Weak dependency pairs: one interpretation for `P ∪ U(P)`, otherwise a relative bound plus a weight gap.
pub fn analyze_wdp(trs: &Trs, mode: Strategy, params: &SearchParams, budget: &Budget) -> Option<Certificate> {
    let problem = dependency_pairs_for(trs, mode);
    let ctx = Ctx::new(trs, params, budget, problem.compounds());
    let s = problem.with_usable();
    let mu = map_for(&s, mode);
    let pairs = rendered_pairs(&problem);
    let usable_idx = problem.usable_rules();
    let compatible = ctx.best(|dim| {
        let mut p = ctx.problem(dim, &mu, false);
        p.strict = s.rules().to_vec();
        p
    });
    let mut best: Option<Certificate> = compatible.map(|(a, k)| {
        certificate(
            trs,
            mode,
            Method::WdpCompatible,
            k,
            Evidence::WdpCompatible {
                pairs: pairs.clone(),
                usable: one_based(&usable_idx),
                map: map_entries(&mu),
                interpretation: a.to_data(),
            },
        )
    });
    if best.as_ref().is_some_and(|c| c.degree <= 1) {
        return best;
    }
    let u = problem.usable_trs();
    let relative = ctx.best(|dim| {
        let mut p = ctx.problem(dim, &mu, true);
        p.strict = problem.pairs().to_vec();
        p.weak = u.rules().to_vec();
        p
    });
    if let Some((b, kb)) = relative {
        if let Some((gap, ka)) = ctx.gap(problem.pairs(), u.rules(), &mu) {
            let k = ka.max(kb);
            if best.as_ref().is_none_or(|c| k < c.degree) {
                best = Some(certificate(
                    trs,
                    mode,
                    Method::WdpWeightgap,
                    k,
                    Evidence::WdpWeightgap {
                        pairs,
                        usable: one_based(&usable_idx),
                        map: map_entries(&mu),
                        relative: b.to_data(),
                        gap,
                    },
                ));
            }
        }
    }
    best
}

/// Path analysis over the estimated weak dependency graph.
pub fn analyze_wdg(trs: &Trs, mode: Strategy, params: &SearchParams, budget: &Budget) -> Option<Certificate> {
    let problem = dependency_pairs_for(trs, mode);
    let ctx = Ctx::new(trs, params, budget, problem.compounds());
    let cg = congruence_graph(&estimate_graph(&problem));
    let mut prefix_cache: HashMap<(Vec<usize>, Vec<usize>, Vec<usize>), Option<(MatrixInterpretation, usize)>> =
        HashMap::new();
    let mut gap_cache: BTreeMap<Vec<usize>, Option<(GapEvidence, usize)>> = BTreeMap::new();
    let mut paths = Vec::new();
    let mut k = 0;
    for path in maximal_source_paths(&cg) {
        let classes: Vec<Vec<usize>> = path.iter().map(|&c| cg.classes[c].clone()).collect();
        let mut q: Vec<usize> = classes.iter().flatten().copied().collect();
        q.sort_unstable();
        let uq = problem.usable_rules_of(&q);
        let q_rules = problem.pair_subsystem(&q);
        let u_rules = problem.origin().subsystem(&uq);
        let mu = map_for(&q_rules.union(&u_rules), mode);
        let (gap, ka) = gap_cache
            .entry(q.clone())
            .or_insert_with(|| ctx.gap(q_rules.rules(), u_rules.rules(), &mu))
            .clone()?;
        k = k.max(ka);
        let mut prefixes = Vec::new();
        for j in 0..classes.len() {
            let before: Vec<usize> = classes[..j].iter().flatten().copied().collect();
            let key = (classes[j].clone(), before.clone(), q.clone());
            let found = prefix_cache
                .entry(key)
                .or_insert_with(|| {
                    ctx.best(|dim| {
                        let mut p = ctx.problem(dim, &mu, true);
                        p.strict = problem.pair_subsystem(&classes[j]).rules().to_vec();
                        p.weak = problem.pair_subsystem(&before).rules().to_vec();
                        p.weak.extend(u_rules.rules().iter().cloned());
                        p
                    })
                })
                .clone();
            let (b, kb) = found?;
            k = k.max(kb);
            prefixes.push(b.to_data());
        }
        paths.push(PathEvidence {
            classes: classes
                .iter()
                .map(|c| c.iter().map(|&i| problem.display_index(i)).collect())
                .collect(),
            usable: one_based(&uq),
            map: map_entries(&mu),
            gap,
            prefixes,
        });
    }
    Some(certificate(
        trs,
        mode,
        Method::Wdg,
        k,
        Evidence::Wdg {
            pairs: rendered_pairs(&problem),
            usable: one_based(&problem.usable_rules()),
            paths,
        },
    ))
}

pub fn run_strategy(
    kind: StrategyKind,
    trs: &Trs,
    mode: Strategy,
    params: &SearchParams,
    budget: &Budget,
) -> Option<Certificate> {
    match kind {
        StrategyKind::Direct => analyze_direct(trs, mode, params, budget),
        StrategyKind::Wdp => analyze_wdp(trs, mode, params, budget),
        StrategyKind::Wdg => analyze_wdg(trs, mode, params, budget),
    }
}

/// Runs the configured strategies concurrently and keeps the lowest degree, earlier strategies winning ties.
pub fn analyze(trs: &Trs, config: &AnalysisConfig) -> Analysis {
    assert!(!config.strategies.is_empty(), "at least one strategy is required");
    let mode = config.mode.unwrap_or(trs.strategy());
    let budget = Budget {
        deadline: Some(Instant::now() + config.timeout),
        cancel: Some(Arc::new(AtomicBool::new(false))),
    };
    let results: Mutex<Vec<(usize, Option<Certificate>)>> = Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for (order, kind) in config.strategies.iter().enumerate() {
            let results = &results;
            let budget = &budget;
            s.spawn(move || {
                let c = run_strategy(*kind, trs, mode, &config.params, budget);
                results.lock().unwrap().push((order, c));
            });
        }
    });
    let timed_out = budget.expired();
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|(order, _)| *order);
    let mut notes = Vec::new();
    let mut best: Option<Certificate> = None;
    for (order, c) in results {
        match c {
            Some(c) => {
                notes.push(format!("{}: degree {}", config.strategies[order], c.degree));
                if best.as_ref().is_none_or(|b| c.degree < b.degree) {
                    best = Some(c);
                }
            }
            None => notes.push(format!("{}: no certificate", config.strategies[order])),
        }
    }
    if timed_out {
        notes.push(format!("timeout after {} s", config.timeout.as_secs_f64()));
    }
    Analysis {
        certificate: best,
        timed_out,
        notes,
    }
}

/// The dependency-pair problem that the certificate strategies use for `mode`.
pub fn pair_problem(trs: &Trs, mode: Strategy) -> DpProblem {
    dependency_pairs_for(trs, mode)
}
