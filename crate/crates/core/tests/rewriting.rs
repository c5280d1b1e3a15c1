mod common;

use std::collections::BTreeSet;

use common::{numeral, random_derivation, sym};
use rtc::corpus;
use rtc::dp::{sharp, weak_dependency_pairs};
use rtc::replacement::{innermost_usable_map, is_mu_position, is_mu_replacing_term, upsilon, usable_map, ReplacementMap};
use rtc::rewrite::{
    basic_terms_up_to, derivation_height, is_normal_form, relative_reducts, Height, RelativeProblem, Rewriter, StepMode,
    DEFAULT_FUEL,
};
use rtc::{Term, Trs};

fn quot_sharp(trs: &Trs, a: usize, b: usize) -> Term {
    Term::app(sym(trs, "quot").sharped(), vec![numeral(trs, a), numeral(trs, b)])
}

#[test]
fn relative_steps_of_the_division_pairs() {
    let trs = corpus::load("div").unwrap();
    let p = weak_dependency_pairs(&trs);
    let prob = RelativeProblem::new(p.pair_trs().clone(), p.usable_trs());
    let next = relative_reducts(&quot_sharp(&trs, 4, 2), &prob, &StepMode::full()).unwrap();
    assert!(next.contains(&quot_sharp(&trs, 2, 2)));
    let last = relative_reducts(&quot_sharp(&trs, 0, 2), &prob, &StepMode::full()).unwrap();
    assert_eq!(last, vec![Term::constant(p.compounds()[0])]);
}

#[test]
fn relative_over_nothing_is_plain_rewriting() {
    let mut rng = common::rng(11);
    for (name, _) in corpus::ALL {
        let trs = corpus::load(name).unwrap();
        let none = Trs::new(vec![], trs.signature().iter().copied()).unwrap();
        let prob = RelativeProblem::new(trs.clone(), none);
        let rw = Rewriter::new(&trs);
        let mut checked = 0;
        let starts = basic_terms_up_to(&trs, 6);
        for start in starts.iter().cycle().take(100) {
            let mode = StepMode::of(trs.strategy());
            let path = random_derivation(&mut rng, &rw, start, &mode, 5);
            let t = path.last().map(|(_, s)| s.result.clone()).unwrap_or_else(|| start.clone());
            let mut plain: Vec<Term> = rw.successors(&t, &mode);
            let mut rel = relative_reducts(&t, &prob, &mode).unwrap();
            plain.sort_by_key(|t| t.to_string());
            plain.dedup();
            rel.sort_by_key(|t| t.to_string());
            rel.dedup();
            assert_eq!(plain, rel, "{name} {t}");
            checked += 1;
        }
        assert_eq!(checked, 100);
    }
}

#[test]
fn exp_heights_double() {
    let trs = corpus::load("exp").unwrap();
    let mut t = Term::constant(sym(&trs, "0"));
    for n in 1..=6u32 {
        t = Term::app(sym(&trs, "r"), vec![t]);
        let e = Term::app(sym(&trs, "exp"), vec![t.clone()]);
        let h = derivation_height(&e, &trs, &StepMode::innermost(), DEFAULT_FUEL).value().unwrap();
        assert!(h >= 1 << n, "n = {n}: {h}");
    }
}

#[test]
fn gcd_small_basic_terms() {
    let trs = corpus::load("gcd").unwrap();
    let terms: Vec<String> = basic_terms_up_to(&trs, 3).iter().map(|t| t.to_string()).collect();
    for expected in ["gcd(0, 0)", "le(0, 0)", "minus(0, 0)"] {
        assert!(terms.iter().any(|t| t == expected), "{terms:?}");
    }
    assert!(basic_terms_up_to(&trs, 2).is_empty());
}

#[test]
fn upsilon_is_monotone_with_a_least_fixed_point() {
    let mut rng = common::rng(3);
    use rand::Rng;
    for (name, _) in corpus::ALL {
        let trs = corpus::load(name).unwrap();
        let phi = usable_map(&trs);
        assert!(upsilon(&trs, &phi).is_subset(&phi), "{name}");
        assert_eq!(upsilon(&trs, &phi), phi, "{name}");
        let mut mu = ReplacementMap::new();
        loop {
            let next = upsilon(&trs, &mu);
            assert!(mu.is_subset(&next) && next.is_subset(&phi), "{name}");
            if next == mu {
                break;
            }
            mu = next;
        }
        assert_eq!(mu, phi, "{name}");
        let full = ReplacementMap::full(trs.signature());
        let all: Vec<_> = full.iter().collect();
        for _ in 0..50 {
            let small: ReplacementMap = all.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
            let large: ReplacementMap = small.union(&all.iter().copied().filter(|_| rng.gen_bool(0.4)).collect());
            assert!(upsilon(&trs, &small).is_subset(&upsilon(&trs, &large)), "{name}");
        }
        assert!(innermost_usable_map(&trs).is_subset(&phi));
    }
}

#[test]
fn replacing_term_membership_matches_the_definition() {
    use rand::Rng;
    let mut rng = common::rng(5);
    let mut samples = 0;
    for (name, _) in corpus::ALL {
        let trs = corpus::load(name).unwrap();
        let full = ReplacementMap::full(trs.signature());
        let all: Vec<_> = full.iter().collect();
        for _ in 0..20 {
            let mu: ReplacementMap = all.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            let t = common::random_term(&mut rng, trs.signature(), &[], 4);
            let direct = t
                .subterms()
                .iter()
                .all(|(p, s)| is_normal_form(s, &trs) || is_mu_position(&mu, &t, p));
            assert_eq!(is_mu_replacing_term(&mu, &trs, &t), direct, "{name} {t} {mu:?}");
            samples += 1;
        }
    }
    assert_eq!(samples, 200);
}

/// Random derivations from ground basic terms of size at most 7.
fn sampled_steps(trs: &Trs, mode: &StepMode, seed: u64) -> Vec<(Term, rtc::rewrite::Step)> {
    let mut rng = common::rng(seed);
    let rw = Rewriter::new(trs);
    let mut out = Vec::new();
    for start in basic_terms_up_to(trs, 7) {
        for _ in 0..3 {
            out.extend(random_derivation(&mut rng, &rw, &start, mode, 8));
        }
    }
    out
}

#[test]
fn derivations_stay_in_usable_replacing_terms() {
    for (name, _) in corpus::ALL {
        let trs = corpus::load(name).unwrap();
        for (mode, mu) in [(StepMode::full(), usable_map(&trs)), (StepMode::innermost(), innermost_usable_map(&trs))] {
            for (t, step) in sampled_steps(&trs, &mode, 17) {
                assert!(is_mu_position(&mu, &t, &step.position), "{name}: {t} at {}", step.position);
                assert!(is_mu_replacing_term(&mu, &trs, &step.result), "{name}: {}", step.result);
            }
        }
    }
}

#[test]
fn weak_pairs_preserve_derivation_height() {
    for name in ["div", "diff"] {
        let trs = corpus::load(name).unwrap();
        let p = weak_dependency_pairs(&trs);
        let (pr, pu) = (p.with_origin(), p.with_usable());
        let mode = StepMode::full();
        let mut plain = rtc::rewrite::trs_oracle(&trs, &mode, DEFAULT_FUEL);
        let mut with_r = rtc::rewrite::trs_oracle(&pr, &mode, DEFAULT_FUEL);
        let mut with_u = rtc::rewrite::trs_oracle(&pu, &mode, DEFAULT_FUEL);
        let mut compared = 0;
        for t in basic_terms_up_to(&trs, 7) {
            let Height::Finite(h) = plain.height(&t).unwrap() else { continue };
            let ts = sharp(&t);
            assert_eq!(with_r.height(&ts).unwrap(), Height::Finite(h), "{name} {t}");
            assert_eq!(with_u.height(&ts).unwrap(), Height::Finite(h), "{name} {t}");
            compared += 1;
        }
        assert!(compared > 10);
    }
}

#[test]
fn estimated_graphs_cover_observed_pair_chains() {
    for (name, _) in corpus::ALL {
        let trs = corpus::load(name).unwrap();
        let p = weak_dependency_pairs(&trs);
        let g = rtc::graph::estimate_graph(&p);
        let s = p.with_usable();
        let rw = Rewriter::new(&s);
        let mut rng = common::rng(23);
        let mut chains = BTreeSet::new();
        for start in basic_terms_up_to(&trs, 7) {
            for _ in 0..3 {
                let path = random_derivation(&mut rng, &rw, &sharp(&start), &StepMode::full(), 8);
                let mut fired: Vec<(rtc::Position, usize)> = Vec::new();
                for (_, step) in path {
                    if step.rule > p.len() {
                        continue;
                    }
                    let pair = step.rule - 1;
                    if let Some((_, parent)) = fired.iter().rev().find(|(q, _)| q.is_prefix_of(&step.position)) {
                        assert!(g.has_edge(*parent, pair), "{name}: {} then {}", parent, pair);
                        chains.insert((*parent, pair));
                    }
                    fired.push((step.position.clone(), pair));
                }
            }
        }
        if ["div", "gcd", "diff"].contains(name) {
            assert!(!chains.is_empty(), "{name}");
        }
    }
}
