#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rtc::rewrite::{Rewriter, Step, StepMode};
use rtc::{Symbol, Term, Trs, Var};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sym(trs: &Trs, name: &str) -> Symbol {
    trs.symbol(name).unwrap_or_else(|| panic!("no symbol {name}"))
}

/// A random term of depth at most `depth`; variables are drawn from `vars` when it is non-empty.
pub fn random_term(rng: &mut impl Rng, sig: &[Symbol], vars: &[Var], depth: usize) -> Term {
    let constants: Vec<Symbol> = sig.iter().copied().filter(|f| f.arity() == 0).collect();
    let leaf = |rng: &mut dyn rand::RngCore| -> Term {
        if !vars.is_empty() && (constants.is_empty() || rng.gen_bool(0.5)) {
            Term::Var(*vars.choose(rng).unwrap())
        } else {
            Term::constant(*constants.choose(rng).unwrap())
        }
    };
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    let f = *sig.choose(rng).unwrap();
    Term::app(f, (0..f.arity()).map(|_| random_term(rng, sig, vars, depth - 1)).collect())
}

/// A random ground constructor term of depth at most `depth`.
pub fn random_constructor_term(rng: &mut impl Rng, trs: &Trs, depth: usize) -> Term {
    let cons: Vec<Symbol> = trs.constructors().into_iter().collect();
    random_term(rng, &cons, &[], depth)
}

/// A random derivation of at most `steps` steps, as the list of steps taken from `start`.
pub fn random_derivation(rng: &mut impl Rng, rw: &Rewriter, start: &Term, mode: &StepMode, steps: usize) -> Vec<(Term, Step)> {
    let mut out = Vec::new();
    let mut t = start.clone();
    for _ in 0..steps {
        let reducts = rw.reducts(&t, mode);
        let Some(step) = reducts.choose(rng).cloned() else { break };
        let next = step.result.clone();
        out.push((t, step));
        t = next;
    }
    out
}

pub fn numeral(trs: &Trs, n: usize) -> Term {
    let mut t = Term::constant(sym(trs, "0"));
    for _ in 0..n {
        t = Term::app(sym(trs, "s"), vec![t]);
    }
    t
}
