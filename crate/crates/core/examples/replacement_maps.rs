//! Usable replacement maps, membership in T(mu) and the mu-restricted cap.
//!
//!     cargo run --example replacement_maps -- div

use rtc::corpus;
use rtc::replacement::{innermost_usable_map, mu_cap, usable_map};
use rtc::VarGen;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "div".into());
    let trs = corpus::load(&name).expect("bundled system");
    let sig = trs.signature();
    let iota = innermost_usable_map(&trs);
    let phi = usable_map(&trs);
    print!("innermost:\n{}full:\n{}", iota.render(sig), phi.render(sig));

    for rule in trs.rules() {
        let mut gen = VarGen::avoiding([&rule.lhs, &rule.rhs]);
        let cap = mu_cap(&phi, &trs, &rule.lhs, &rule.rhs, &mut gen);
        println!("{rule}    cap(rhs) = {cap}");
    }
}
