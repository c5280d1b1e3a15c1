//! Synthesises a matrix interpretation for the rules of a system with a SAT encoding.
//!
//!     cargo run --example interpretation_search -- gcd 2 3

use rtc::corpus;
use rtc::search::{find_interpretation, verify, Budget, SearchProblem};

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "div".into());
    let dim = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let bound = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let trs = corpus::load(&name).expect("bundled system");

    let mut p = SearchProblem::new(dim, bound);
    p.strict = trs.rules().to_vec();
    let outcome = find_interpretation(&p, &Budget::unlimited());
    match outcome.found() {
        Some(a) => {
            assert!(verify(&a, &p));
            for (f, i) in a.symbols() {
                println!("{}/{}: {i:?}", f.name(), f.arity());
            }
        }
        None => println!("no interpretation with dimension {dim} and entries up to {bound}"),
    }
}
