//! Complexity certificates: serialisation and independent re-checking.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dp::{dependency_pairs_for, DpProblem};
use crate::error::{Error, Result};
use crate::graph::{congruence_graph, estimate_graph, maximal_source_paths};
use crate::interpretation::{
    classify, degree, nonduplicating_slmi_gap, orients, weight_gap_delta, DegreeScope, InterpretationData,
    MatrixInterpretation, OrderFlavor,
};
use crate::replacement::{innermost_usable_map, usable_map, ReplacementMap};
use crate::term::Symbol;
use crate::trs::{print_trs, Rule, Strategy, Trs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    WdpCompatible,
    WdpWeightgap,
    Wdg,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::WdpCompatible => "wdp-compatible",
            Method::WdpWeightgap => "wdp-weightgap",
            Method::Wdg => "wdg",
        })
    }
}

/// How the weight gap of a relative problem is justified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapKind {
    /// Coefficient domination on the pairs, with an adequate interpretation.
    WeightGap,
    /// Non-duplicating pairs under a strongly linear interpretation.
    StronglyLinear,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapEvidence {
    pub kind: GapKind,
    pub interpretation: InterpretationData,
    pub delta: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathEvidence {
    /// Pair classes along the path, by displayed pair number.
    pub classes: Vec<Vec<usize>>,
    /// Usable rules of the pairs on the path, 1-based.
    pub usable: Vec<usize>,
    pub map: Vec<(String, usize)>,
    pub gap: GapEvidence,
    /// One relative interpretation per path prefix, in path order.
    pub prefixes: Vec<InterpretationData>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    Direct {
        map: Vec<(String, usize)>,
        interpretation: InterpretationData,
    },
    WdpCompatible {
        pairs: Vec<String>,
        usable: Vec<usize>,
        map: Vec<(String, usize)>,
        interpretation: InterpretationData,
    },
    WdpWeightgap {
        pairs: Vec<String>,
        usable: Vec<usize>,
        map: Vec<(String, usize)>,
        relative: InterpretationData,
        gap: GapEvidence,
    },
    Wdg {
        pairs: Vec<String>,
        usable: Vec<usize>,
        paths: Vec<PathEvidence>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// SHA-256 of the printed system.
    pub fingerprint: String,
    pub mode: Strategy,
    pub method: Method,
    pub degree: usize,
    pub evidence: Evidence,
}

pub fn fingerprint(trs: &Trs) -> String {
    let digest = Sha256::digest(print_trs(trs).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn map_entries(mu: &ReplacementMap) -> Vec<(String, usize)> {
    mu.iter().map(|(f, i)| (f.to_string(), i)).collect()
}

pub fn rendered_pairs(p: &DpProblem) -> Vec<String> {
    p.pairs().iter().map(|r| r.to_string()).collect()
}

pub fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}

/// `rc(n) = O(n^k)` as a verdict line.
pub fn verdict(degree: usize) -> String {
    if degree == 0 {
        "YES(?,O(1))".to_string()
    } else {
        format!("YES(?,O(n^{degree}))")
    }
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialise")
    }

    pub fn from_json(text: &str) -> Result<Certificate> {
        serde_json::from_str(text).map_err(|e| Error::Certificate(e.to_string()))
    }

    /// Human readable rendering; `trs` resolves symbol names for the interpretations.
    pub fn render(&self, trs: &Trs) -> String {
        let mut out = String::new();
        out.push_str(&format!("method: {}\nmode: {}\ndegree: {}\nfingerprint: {}\n", self.method, self.mode, self.degree, self.fingerprint));
        let problem = dependency_pairs_for(trs, self.mode);
        let table = SymbolTable::new(trs, &problem);
        let interp = |d: &InterpretationData| match MatrixInterpretation::from_data(d, |n, a| table.get(n, a)) {
            Ok(a) => a.to_string(),
            Err(e) => format!("<{e}>\n"),
        };
        let map_text = |m: &[(String, usize)]| {
            let parts: Vec<String> = m.iter().map(|(f, i)| format!("({f},{i})")).collect();
            format!("{{{}}}", parts.join(", "))
        };
        match &self.evidence {
            Evidence::Direct { map, interpretation } => {
                out.push_str(&format!("replacement map: {}\ninterpretation:\n{}", map_text(map), interp(interpretation)));
            }
            Evidence::WdpCompatible {
                pairs,
                usable,
                map,
                interpretation,
            } => {
                push_pairs(&mut out, &problem, pairs, usable);
                out.push_str(&format!("replacement map: {}\ninterpretation:\n{}", map_text(map), interp(interpretation)));
            }
            Evidence::WdpWeightgap {
                pairs,
                usable,
                map,
                relative,
                gap,
            } => {
                push_pairs(&mut out, &problem, pairs, usable);
                out.push_str(&format!("replacement map: {}\n", map_text(map)));
                out.push_str(&format!("relative interpretation (pairs strict, usable rules weak):\n{}", interp(relative)));
                out.push_str(&format!(
                    "weight gap interpretation ({:?}, delta = {}):\n{}",
                    gap.kind,
                    gap.delta,
                    interp(&gap.interpretation)
                ));
            }
            Evidence::Wdg { pairs, usable, paths } => {
                push_pairs(&mut out, &problem, pairs, usable);
                for p in paths {
                    let classes: Vec<String> = p
                        .classes
                        .iter()
                        .map(|c| format!("{{{}}}", c.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")))
                        .collect();
                    out.push_str(&format!("path {}\n", classes.join(" -> ")));
                    out.push_str(&format!("  usable rules: {:?}\n  replacement map: {}\n", p.usable, map_text(&p.map)));
                    out.push_str(&format!(
                        "  weight gap interpretation ({:?}, delta = {}):\n{}",
                        p.gap.kind,
                        p.gap.delta,
                        indent(&interp(&p.gap.interpretation))
                    ));
                    for (j, b) in p.prefixes.iter().enumerate() {
                        out.push_str(&format!("  prefix {} interpretation:\n{}", j + 1, indent(&interp(b))));
                    }
                }
            }
        }
        out
    }
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("    {l}\n")).collect()
}

fn push_pairs(out: &mut String, problem: &DpProblem, pairs: &[String], usable: &[usize]) {
    out.push_str(&format!("{} pairs:\n", problem.flavor()));
    for (i, p) in pairs.iter().enumerate() {
        out.push_str(&format!("  {}: {}\n", problem.display_index(i), p));
    }
    out.push_str(&format!("usable rules: {usable:?}\n"));
}

/// Resolves display names against the system and its pair problem.
pub struct SymbolTable {
    by_name: BTreeMap<(String, usize), Option<Symbol>>,
}

impl SymbolTable {
    pub fn new(trs: &Trs, problem: &DpProblem) -> SymbolTable {
        let mut by_name: BTreeMap<(String, usize), Option<Symbol>> = BTreeMap::new();
        let all: BTreeSet<Symbol> = trs
            .signature()
            .iter()
            .chain(problem.with_origin().signature())
            .copied()
            .collect();
        for f in all {
            by_name
                .entry((f.to_string(), f.arity()))
                .and_modify(|e| *e = None)
                .or_insert(Some(f));
        }
        SymbolTable { by_name }
    }

    pub fn get(&self, name: &str, arity: usize) -> Option<Symbol> {
        self.by_name.get(&(name.to_string(), arity)).copied().flatten()
    }
}

/// Re-derives every side condition of `cert` from scratch. `Err` carries the first failed check.
pub fn check_certificate_detailed(trs: &Trs, cert: &Certificate) -> std::result::Result<(), String> {
    if cert.fingerprint != fingerprint(trs) {
        return Err("fingerprint does not match the system".into());
    }
    let problem = dependency_pairs_for(trs, cert.mode);
    let table = SymbolTable::new(trs, &problem);
    let load = |d: &InterpretationData| {
        MatrixInterpretation::from_data(d, |n, a| table.get(n, a)).map_err(|e| e.to_string())
    };
    let map_of = |t: &Trs| match cert.mode {
        Strategy::Full => usable_map(t),
        Strategy::Innermost => innermost_usable_map(t),
    };
    let constructors = trs.constructors();
    let scope = DegreeScope::Only(constructors.clone());
    let compounds: BTreeSet<Symbol> = problem.compounds().iter().copied().collect();
    let degree_of = |a: &MatrixInterpretation| degree(a, &scope).map_err(|e| e.to_string());
    let expect_pairs = |pairs: &[String], usable: &[usize]| -> std::result::Result<(), String> {
        if pairs != rendered_pairs(&problem).as_slice() {
            return Err("dependency pairs differ from the recomputed ones".into());
        }
        if usable != one_based(&problem.usable_rules()).as_slice() {
            return Err("usable rules differ from the recomputed ones".into());
        }
        Ok(())
    };
    let claimed = match &cert.evidence {
        Evidence::Direct { map, interpretation } => {
            let mu = map_of(trs);
            if *map != map_entries(&mu) {
                return Err("replacement map differs from the recomputed one".into());
            }
            let a = load(interpretation)?;
            check_rmi(&a, trs.rules(), &[], &mu, &constructors, None)?;
            degree_of(&a)?
        }
        Evidence::WdpCompatible {
            pairs,
            usable,
            map,
            interpretation,
        } => {
            expect_pairs(pairs, usable)?;
            let s = problem.with_usable();
            let mu = map_of(&s);
            if *map != map_entries(&mu) {
                return Err("replacement map differs from the recomputed one".into());
            }
            let a = load(interpretation)?;
            check_rmi(&a, s.rules(), &[], &mu, &constructors, None)?;
            degree_of(&a)?
        }
        Evidence::WdpWeightgap {
            pairs,
            usable,
            map,
            relative,
            gap,
        } => {
            expect_pairs(pairs, usable)?;
            let mu = map_of(&problem.with_usable());
            if *map != map_entries(&mu) {
                return Err("replacement map differs from the recomputed one".into());
            }
            let u = problem.usable_trs();
            let b = load(relative)?;
            check_rmi(&b, problem.pairs(), u.rules(), &mu, &constructors, Some(&compounds))?;
            let a = load(&gap.interpretation)?;
            check_gap(&a, gap, problem.pairs(), u.rules(), &mu, &constructors, &compounds)?;
            degree_of(&a)?.max(degree_of(&b)?)
        }
        Evidence::Wdg { pairs, usable, paths } => {
            expect_pairs(pairs, usable)?;
            let g = estimate_graph(&problem);
            let cg = congruence_graph(&g);
            let expected: Vec<Vec<Vec<usize>>> = maximal_source_paths(&cg)
                .into_iter()
                .map(|path| {
                    path.iter()
                        .map(|&c| cg.classes[c].iter().map(|&i| problem.display_index(i)).collect())
                        .collect()
                })
                .collect();
            let given: Vec<Vec<Vec<usize>>> = paths.iter().map(|p| p.classes.clone()).collect();
            if given != expected {
                return Err("paths differ from the maximal source paths of the recomputed graph".into());
            }
            let mut k = 0;
            for p in paths {
                k = k.max(check_path(&problem, p, &load, &map_of, &constructors, &compounds, &degree_of)?);
            }
            k
        }
    };
    if claimed != cert.degree {
        return Err(format!("claimed degree {} but the evidence yields {}", cert.degree, claimed));
    }
    Ok(())
}

pub fn check_certificate(trs: &Trs, cert: &Certificate) -> bool {
    check_certificate_detailed(trs, cert).is_ok()
}

#[allow(clippy::too_many_arguments)]
fn check_path(
    problem: &DpProblem,
    p: &PathEvidence,
    load: &dyn Fn(&InterpretationData) -> std::result::Result<MatrixInterpretation, String>,
    map_of: &dyn Fn(&Trs) -> ReplacementMap,
    constructors: &BTreeSet<Symbol>,
    compounds: &BTreeSet<Symbol>,
    degree_of: &dyn Fn(&MatrixInterpretation) -> std::result::Result<usize, String>,
) -> std::result::Result<usize, String> {
    let classes: Vec<Vec<usize>> = p
        .classes
        .iter()
        .map(|c| c.iter().map(|&n| problem.pair_of_display(n).ok_or("unknown pair number")).collect())
        .collect::<std::result::Result<_, _>>()?;
    let q: Vec<usize> = classes.iter().flatten().copied().collect();
    let uq = problem.usable_rules_of(&q);
    if p.usable != one_based(&uq) {
        return Err("path usable rules differ from the recomputed ones".into());
    }
    let q_rules = problem.pair_subsystem(&q);
    let u_rules = problem.origin().subsystem(&uq);
    let mu = map_of(&q_rules.union(&u_rules));
    if p.map != map_entries(&mu) {
        return Err("path replacement map differs from the recomputed one".into());
    }
    let a = load(&p.gap.interpretation)?;
    check_gap(&a, &p.gap, q_rules.rules(), u_rules.rules(), &mu, constructors, compounds)?;
    let mut k = degree_of(&a)?;
    if p.prefixes.len() != classes.len() {
        return Err("one relative interpretation per path prefix is required".into());
    }
    for (j, data) in p.prefixes.iter().enumerate() {
        let b = load(data)?;
        let strict: Vec<Rule> = problem.pair_subsystem(&classes[j]).rules().to_vec();
        let before: Vec<usize> = classes[..j].iter().flatten().copied().collect();
        let mut weak: Vec<Rule> = problem.pair_subsystem(&before).rules().to_vec();
        weak.extend(u_rules.rules().iter().cloned());
        check_rmi(&b, &strict, &weak, &mu, constructors, Some(compounds))?;
        k = k.max(degree_of(&b)?);
    }
    Ok(k)
}

/// Strict and weak orientation, μ-monotonicity and the RMI shape; compounds unit when given.
fn check_rmi(
    a: &MatrixInterpretation,
    strict: &[Rule],
    weak: &[Rule],
    mu: &ReplacementMap,
    constructors: &BTreeSet<Symbol>,
    compounds: Option<&BTreeSet<Symbol>>,
) -> std::result::Result<(), String> {
    for (rules, flavor) in [(strict, OrderFlavor::Strict), (weak, OrderFlavor::Weak)] {
        for r in rules {
            match orients(a, r, flavor) {
                Ok(true) => {}
                Ok(false) => return Err(format!("rule {r} is not oriented ({flavor:?})")),
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    let present: BTreeSet<Symbol> = constructors.iter().copied().filter(|c| a.interprets(*c)).collect();
    if present.len() != constructors.len() {
        return Err("interpretation misses a constructor".into());
    }
    let empty = BTreeSet::new();
    let report = classify(a, constructors, compounds.unwrap_or(&empty), mu);
    if !report.rmi {
        return Err("constructor matrices are not triangular".into());
    }
    if compounds.is_some() && !report.adequate {
        return Err("interpretation is not adequate".into());
    }
    if !crate::interpretation::is_mu_monotone(a, mu) {
        return Err("interpretation is not monotone on the usable positions".into());
    }
    Ok(())
}

fn check_gap(
    a: &MatrixInterpretation,
    gap: &GapEvidence,
    pairs: &[Rule],
    usable: &[Rule],
    mu: &ReplacementMap,
    constructors: &BTreeSet<Symbol>,
    compounds: &BTreeSet<Symbol>,
) -> std::result::Result<(), String> {
    check_rmi(a, usable, &[], mu, constructors, Some(compounds))?;
    let delta = match gap.kind {
        GapKind::WeightGap => weight_gap_delta(a, pairs),
        GapKind::StronglyLinear => {
            if a.dim() != 1 {
                return Err("strongly linear gap needs dimension one".into());
            }
            nonduplicating_slmi_gap(a, pairs)
        }
    };
    match delta {
        None => Err("weight gap is not well-defined".into()),
        Some(d) if d != gap.delta => Err(format!("claimed weight gap {} but recomputed {}", gap.delta, d)),
        Some(_) => Ok(()),
    }
}
