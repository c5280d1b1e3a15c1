//! Exhaustive derivation heights and the runtime complexity table rc(n).
//!
//!     cargo run --release --example derivation_heights -- exp 6

use rtc::corpus;
use rtc::rewrite::{derivation_height, runtime_complexity_samples, StepMode, DEFAULT_FUEL};
use rtc::Term;

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "div".into());
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(6);
    let trs = corpus::load(&name).expect("bundled system");
    let mode = StepMode::of(trs.strategy());

    println!("n rc(n)");
    for s in runtime_complexity_samples(&trs, &mode, n, DEFAULT_FUEL) {
        println!("{} {}{}", s.n, s.rc, if s.diverged { " (diverged)" } else { "" });
    }

    if let (Some(exp), Some(r), Some(zero)) = (trs.symbol("exp"), trs.symbol("r"), trs.symbol("0")) {
        let mut t = Term::constant(zero);
        for k in 1..=n {
            t = Term::app(r, vec![t]);
            let h = derivation_height(&Term::app(exp, vec![t.clone()]), &trs, &StepMode::innermost(), DEFAULT_FUEL);
            println!("dh(exp(r^{k}(0))) = {h}");
        }
    }
}
