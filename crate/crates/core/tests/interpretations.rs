mod common;

use std::collections::BTreeSet;

use rand::Rng;

use rtc::corpus;
use rtc::dp::{sharp, weak_dependency_pairs};
use rtc::interpretation::{
    degree, evaluate, evaluate_with, linear_form, orients, vector_greater, weight_gap_delta, DegreeScope, Matrix,
    MatrixInterpretation, OrderFlavor,
};
use rtc::replacement::usable_map;
use rtc::rewrite::{basic_terms_up_to, fit_bound, Rewriter, StepMode};
use rtc::search::{find_interpretation, Budget, SearchProblem, Shape};
use rtc::{Symbol, Trs, Var};

fn random_matrix(rng: &mut impl Rng, dim: usize, max: u64, triangular: bool) -> Matrix {
    let mut m = Matrix::zero(dim);
    for i in 0..dim {
        for j in 0..dim {
            let v = if triangular && i > j {
                0
            } else if triangular && i == j {
                rng.gen_range(0..=1)
            } else {
                rng.gen_range(0..=max)
            };
            m.set(i, j, v);
        }
    }
    m
}

fn random_interpretation(rng: &mut impl Rng, symbols: &[Symbol], dim: usize) -> MatrixInterpretation {
    let mut a = MatrixInterpretation::new(dim);
    for &f in symbols {
        let ms = (0..f.arity()).map(|_| random_matrix(rng, dim, 2, false)).collect();
        let c = (0..dim).map(|_| rng.gen_range(0..=3)).collect();
        a.set(f, ms, c);
    }
    a
}

fn direct_problem(trs: &Trs, dim: usize) -> SearchProblem {
    let mut p = SearchProblem::new(dim, 3);
    p.mu = usable_map(trs);
    p.strict = trs.rules().to_vec();
    p.shapes = trs.constructors().into_iter().map(|c| (c, Shape::Triangular)).collect();
    p.degree_scope = DegreeScope::Only(trs.constructors());
    p
}

fn found_interpretations() -> Vec<(Trs, MatrixInterpretation)> {
    let mut out = Vec::new();
    for name in ["div", "gcd", "minus_f"] {
        let trs = corpus::load(name).unwrap();
        let a = (1..=2)
            .find_map(|d| find_interpretation(&direct_problem(&trs, d), &Budget::unlimited()).found())
            .unwrap_or_else(|| panic!("{name}"));
        out.push((trs, a));
    }
    out
}

fn random_alpha(rng: &mut impl Rng, dim: usize, vars: &BTreeSet<Var>) -> Vec<(Var, Vec<u64>)> {
    vars.iter().map(|v| (*v, (0..dim).map(|_| rng.gen_range(0..=9)).collect())).collect()
}

fn lookup(alpha: &[(Var, Vec<u64>)], dim: usize) -> impl Fn(Var) -> Vec<u64> + '_ {
    move |v| alpha.iter().find(|(w, _)| *w == v).map(|(_, x)| x.clone()).unwrap_or(vec![0; dim])
}

#[test]
fn orientation_is_sound_for_random_assignments() {
    let mut rng = common::rng(41);
    let mut cases: Vec<(Trs, MatrixInterpretation)> = found_interpretations();
    for (name, _) in corpus::ALL {
        let trs = corpus::load(name).unwrap();
        for dim in 1..=2 {
            for _ in 0..20 {
                let a = random_interpretation(&mut rng, trs.signature(), dim);
                cases.push((trs.clone(), a));
            }
        }
    }
    let mut oriented = 0;
    for (trs, a) in &cases {
        for rule in trs.rules() {
            for flavor in [OrderFlavor::Strict, OrderFlavor::Weak] {
                if !orients(a, rule, flavor).unwrap() {
                    continue;
                }
                oriented += 1;
                for _ in 0..1000 {
                    let alpha = random_alpha(&mut rng, a.dim(), &rule.lhs.var_set());
                    let l = evaluate_with(a, &rule.lhs, &lookup(&alpha, a.dim())).unwrap();
                    let r = evaluate_with(a, &rule.rhs, &lookup(&alpha, a.dim())).unwrap();
                    assert!(vector_greater(flavor, &l, &r), "{rule} under {a}: {l:?} vs {r:?}");
                }
            }
        }
    }
    assert!(oriented > 20, "{oriented}");
}

#[test]
fn linear_forms_agree_with_evaluation() {
    let mut rng = common::rng(43);
    let vars = [Var::named("x"), Var::named("y"), Var::named("z")];
    let mut samples = 0;
    while samples < 500 {
        for (name, _) in corpus::ALL {
            let trs = corpus::load(name).unwrap();
            let dim = rng.gen_range(1..=3);
            let a = random_interpretation(&mut rng, trs.signature(), dim);
            let t = common::random_term(&mut rng, trs.signature(), &vars, 4);
            let lf = linear_form(&a, &t).unwrap();
            let alpha = random_alpha(&mut rng, dim, &t.var_set());
            let f = lookup(&alpha, dim);
            assert_eq!(lf.eval(&f), evaluate_with(&a, &t, &f).unwrap(), "{t}");
            assert_eq!(lf.constant, evaluate(&a, &t).unwrap());
            samples += 1;
        }
    }
}

#[test]
fn powers_of_the_degree_matrix_grow_polynomially() {
    let mut rng = common::rng(47);
    for _ in 0..200 {
        let dim = rng.gen_range(1..=3);
        let count = rng.gen_range(1..=3);
        let m = (0..count)
            .map(|_| random_matrix(&mut rng, dim, 3, true))
            .fold(Matrix::zero(dim), |acc, x| acc.entrywise_max(&x));
        let k = (0..dim).filter(|&i| m.get(i, i) == 1).count() as u32;
        let factor = 2f64.powi(k.max(1) as i32 - 1);
        let ratio = |n: u32| {
            let (a, b) = (m.pow(2 * n), m.pow(n));
            (0..dim)
                .flat_map(|i| (0..dim).map(move |j| (i, j)))
                .map(|(i, j)| a.get(i, j) as f64 / (factor * b.get(i, j) as f64 + 1.0))
                .fold(1.0, f64::max)
        };
        let c = ratio(4);
        for n in [4, 8, 16] {
            let (a, b) = (m.pow(2 * n), m.pow(n));
            for i in 0..dim {
                for j in 0..dim {
                    let bound = c * factor * b.get(i, j) as f64 + c;
                    assert!(a.get(i, j) as f64 <= bound + 1e-9, "{m} n={n} ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn basic_terms_evaluate_within_the_degree_bound() {
    for (trs, a) in found_interpretations() {
        let k = degree(&a, &DegreeScope::Only(trs.constructors())).unwrap();
        let mut by_size = [0u64; 10];
        for t in basic_terms_up_to(&trs, 9) {
            let v = evaluate(&a, &t).unwrap();
            let m = v.into_iter().max().unwrap();
            by_size[t.size()] = by_size[t.size()].max(m);
        }
        for n in 1..by_size.len() {
            by_size[n] = by_size[n].max(by_size[n - 1]);
        }
        let samples: Vec<(usize, u64)> = (1..=9).map(|n| (n, by_size[n])).collect();
        let fit = fit_bound(&samples, k as u32, 5);
        assert!(fit.holds, "{a} k={k} {samples:?}");
    }
}

#[test]
fn weight_gap_bounds_single_pair_steps() {
    let mut rng = common::rng(53);
    let mut checked = 0;
    for (name, _) in corpus::ALL {
        let trs = corpus::load(name).unwrap();
        let p = weak_dependency_pairs(&trs);
        let s = p.with_usable();
        let mut prob = SearchProblem::new(1, 3);
        prob.mu = usable_map(&s);
        prob.strict = p.usable_trs().rules().to_vec();
        prob.gap_rules = p.pairs().to_vec();
        prob.shapes = trs.constructors().into_iter().map(|c| (c, Shape::Triangular)).collect();
        prob.shapes.extend(p.compounds().iter().map(|c| (*c, Shape::Unit)));
        let found = (1..=2).find_map(|d| {
            prob.dim = d;
            find_interpretation(&prob, &Budget::unlimited()).found()
        });
        let Some(a) = found else { continue };
        let delta = weight_gap_delta(&a, p.pairs()).expect("the search enforces a defined gap");
        let rw = Rewriter::new(&s);
        for start in basic_terms_up_to(&trs, 7) {
            let path = common::random_derivation(&mut rng, &rw, &sharp(&start), &StepMode::full(), 8);
            for (from, step) in path {
                if step.rule > p.len() {
                    continue;
                }
                let before = evaluate(&a, &from).unwrap()[0];
                let after = evaluate(&a, &step.result).unwrap()[0];
                assert!(after <= before + delta, "{name}: {from} -> {}", step.result);
                checked += 1;
            }
        }
    }
    assert!(checked > 100, "{checked}");
}
