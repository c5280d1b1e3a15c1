//! Estimated weak dependency graphs, their condensation and maximal source paths.

use std::collections::BTreeSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::dp::DpProblem;
use crate::term::{rename_apart, unify, Term, VarGen};
use crate::trs::Trs;

/// Replaces every subterm that might be rewritten by `trs` with a fresh variable.
pub fn tcap(trs: &Trs, t: &Term, gen: &mut VarGen) -> Term {
    match t {
        Term::Var(_) => Term::Var(gen.fresh()),
        Term::App(f, args) => {
            let u = Term::app(*f, args.iter().map(|a| tcap(trs, a, gen)).collect());
            let uvars = u.var_set();
            let hit = trs.rules().iter().any(|rule| {
                let l = rename_apart(&rule.lhs, &uvars, gen);
                unify(&u, &l).is_some()
            });
            if hit {
                Term::Var(gen.fresh())
            } else {
                u
            }
        }
    }
}

/// Nodes are 0-based pair indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    pub nodes: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl DependencyGraph {
    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |(a, _)| *a == i).map(|(_, b)| *b)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }
}

/// The marked components of a pair right-hand side.
pub fn components(rhs: &Term) -> Vec<&Term> {
    match rhs {
        Term::Var(_) => Vec::new(),
        Term::App(f, args) if f.is_compound() => args.iter().filter(|a| a.root().is_some_and(|g| g.is_sharped())).collect(),
        Term::App(f, _) if f.is_sharped() => vec![rhs],
        Term::App(_, _) => Vec::new(),
    }
}

pub fn estimate_graph(problem: &DpProblem) -> DependencyGraph {
    let origin = problem.origin();
    let pairs = problem.pairs();
    let mut gen = VarGen::avoiding(pairs.iter().flat_map(|p| [&p.lhs, &p.rhs]));
    let mut edges = BTreeSet::new();
    for (i, p) in pairs.iter().enumerate() {
        for w in components(&p.rhs) {
            let Term::App(f, args) = w else { continue };
            let capped = Term::app(*f, args.iter().map(|a| tcap(origin, a, &mut gen)).collect());
            let cvars = capped.var_set();
            for (j, q) in pairs.iter().enumerate() {
                let lhs = rename_apart(&q.lhs, &cvars, &mut gen);
                if unify(&capped, &lhs).is_some() {
                    edges.insert((i, j));
                }
            }
        }
    }
    DependencyGraph {
        nodes: pairs.len(),
        edges,
    }
}

/// Maximal strongly connected components, each sorted, ordered by smallest member.
pub fn sccs(g: &DependencyGraph) -> Vec<Vec<usize>> {
    let mut pg: DiGraph<usize, ()> = DiGraph::new();
    let idx: Vec<_> = (0..g.nodes).map(|i| pg.add_node(i)).collect();
    for &(a, b) in &g.edges {
        pg.add_edge(idx[a], idx[b], ());
    }
    let mut out: Vec<Vec<usize>> = tarjan_scc(&pg)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|n| pg[n]).collect();
            v.sort_unstable();
            v
        })
        .collect();
    out.sort();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceGraph {
    /// Node sets, ordered by smallest member.
    pub classes: Vec<Vec<usize>>,
    /// Edges between distinct classes, as class indices.
    pub dag_edges: BTreeSet<(usize, usize)>,
    /// Class indices without incoming edges.
    pub sources: Vec<usize>,
}

impl CongruenceGraph {
    pub fn class_of(&self, node: usize) -> usize {
        self.classes.iter().position(|c| c.contains(&node)).expect("every node has a class")
    }

    pub fn successors(&self, c: usize) -> Vec<usize> {
        self.dag_edges.iter().filter(|(a, _)| *a == c).map(|(_, b)| *b).collect()
    }

    /// A topological order of the classes, if the condensation is acyclic.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.classes.len();
        let mut indeg = vec![0usize; n];
        for &(_, b) in &self.dag_edges {
            indeg[b] += 1;
        }
        let mut ready: Vec<usize> = (0..n).filter(|&c| indeg[c] == 0).rev().collect();
        let mut order = Vec::new();
        while let Some(c) = ready.pop() {
            order.push(c);
            for d in self.successors(c).into_iter().rev() {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    ready.push(d);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

pub fn congruence_graph(g: &DependencyGraph) -> CongruenceGraph {
    let classes = sccs(g);
    let mut class_of = vec![0; g.nodes];
    for (c, members) in classes.iter().enumerate() {
        for &m in members {
            class_of[m] = c;
        }
    }
    let dag_edges: BTreeSet<(usize, usize)> = g
        .edges
        .iter()
        .map(|&(a, b)| (class_of[a], class_of[b]))
        .filter(|(a, b)| a != b)
        .collect();
    let sources = (0..classes.len())
        .filter(|c| !dag_edges.iter().any(|(_, b)| b == c))
        .collect();
    CongruenceGraph {
        classes,
        dag_edges,
        sources,
    }
}

/// All non-extendable paths starting at a source, as sequences of class indices.
pub fn maximal_source_paths(cg: &CongruenceGraph) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for &s in &cg.sources {
        let mut path = vec![s];
        extend(cg, &mut path, &mut out);
    }
    out
}

fn extend(cg: &CongruenceGraph, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let last = *path.last().unwrap();
    let next = cg.successors(last);
    if next.is_empty() {
        out.push(path.clone());
        return;
    }
    for n in next {
        path.push(n);
        extend(cg, path, out);
        path.pop();
    }
}

/// DOT rendering: nodes labelled by pair display index, one cluster per class.
pub fn to_dot(problem: &DpProblem, g: &DependencyGraph) -> String {
    let cg = congruence_graph(g);
    let mut out = String::from("digraph wdg {\n");
    for (c, members) in cg.classes.iter().enumerate() {
        out.push_str(&format!("  subgraph cluster_{c} {{\n"));
        for &m in members {
            let label = format!("{}: {}", problem.display_index(m), problem.pairs()[m]).replace('"', "\\\"");
            out.push_str(&format!("    n{} [label=\"{}\"];\n", problem.display_index(m), label));
        }
        out.push_str("  }\n");
    }
    for &(a, b) in &g.edges {
        out.push_str(&format!(
            "  n{} -> n{};\n",
            problem.display_index(a),
            problem.display_index(b)
        ));
    }
    out.push_str("}\n");
    out
}
