//! Weak, weak innermost and standard dependency pairs with their usable rules.
//!
//!     cargo run --example dependency_pairs -- diff

use rtc::corpus;
use rtc::dp::{standard_dependency_pairs, weak_dependency_pairs, weak_innermost_dependency_pairs};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "div".into());
    let trs = corpus::load(&name).expect("bundled system");
    for (label, p) in [
        ("WDP", weak_dependency_pairs(&trs)),
        ("WIDP", weak_innermost_dependency_pairs(&trs)),
        ("DP", standard_dependency_pairs(&trs)),
    ] {
        println!("{label}:");
        print!("{}", p.render());
        let usable: Vec<usize> = p.usable_rules().iter().map(|i| i + 1).collect();
        println!("usable rules: {usable:?}\n");
    }
}
