//! Estimated dependency graph, congruence classes and maximal source paths; `--dot` prints Graphviz.
//!
//!     cargo run --example dependency_graph -- gcd
//!     cargo run --example dependency_graph -- gcd --dot | dot -Tsvg > gcd.svg

use rtc::corpus;
use rtc::graph::{congruence_graph, estimate_graph, maximal_source_paths, to_dot};
use rtc::pipeline::pair_problem;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().cloned().unwrap_or_else(|| "gcd".into());
    let trs = corpus::load(&name).expect("bundled system");
    let p = pair_problem(&trs, trs.strategy());
    let g = estimate_graph(&p);
    if args.iter().any(|a| a == "--dot") {
        print!("{}", to_dot(&p, &g));
        return;
    }
    print!("{}", p.render());
    let cg = congruence_graph(&g);
    let show = |c: usize| cg.classes[c].iter().map(|&i| p.display_index(i)).collect::<Vec<_>>();
    for c in 0..cg.classes.len() {
        println!("class {:?} -> {:?}", show(c), cg.successors(c).into_iter().map(show).collect::<Vec<_>>());
    }
    for path in maximal_source_paths(&cg) {
        println!("path {:?}", path.into_iter().map(show).collect::<Vec<_>>());
    }
}
