//! Parses a TPDB file (or a bundled system by name) and prints it back with its signature.
//!
//!     cargo run --example parse_print -- gcd

use rtc::{corpus, parse_trs, print_trs};

fn main() {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "div".into());
    let trs = match corpus::load(&arg) {
        Some(t) => t,
        None => parse_trs(&std::fs::read_to_string(&arg).expect("readable file")).expect("valid TPDB"),
    };
    print!("{}", print_trs(&trs));
    println!("strategy: {:?}", trs.strategy());
    for f in trs.signature() {
        let kind = if trs.is_defined(*f) { "defined" } else { "constructor" };
        println!("{}/{} {kind}", f.name(), f.arity());
    }
    let reparsed = parse_trs(&print_trs(&trs)).expect("printed form parses");
    assert_eq!(reparsed.rules(), trs.rules());
}
