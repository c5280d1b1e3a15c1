use proptest::prelude::*;

use rtc::term::rename_apart;
use rtc::{match_term, unify, Position, Substitution, Symbol, Term, Var, VarGen};

fn signature() -> Vec<Symbol> {
    vec![
        Symbol::new("f", 2),
        Symbol::new("g", 1),
        Symbol::new("h", 3),
        Symbol::new("a", 0),
        Symbol::new("b", 0),
    ]
}

fn term_with(vars: &'static [&'static str]) -> impl Strategy<Value = Term> {
    let sig = signature();
    let consts: Vec<Symbol> = sig.iter().copied().filter(|f| f.arity() == 0).collect();
    let constant = proptest::sample::select(consts).prop_map(Term::constant);
    let leaf = if vars.is_empty() {
        constant.boxed()
    } else {
        prop_oneof![proptest::sample::select(vars.to_vec()).prop_map(Term::var), constant].boxed()
    };
    leaf.prop_recursive(4, 40, 3, move |inner| {
        let sig = sig.clone();
        (proptest::sample::select(sig.into_iter().filter(|f| f.arity() > 0).collect::<Vec<_>>()), proptest::collection::vec(inner, 3))
            .prop_map(|(f, mut args)| {
                args.truncate(f.arity());
                Term::app(f, args)
            })
    })
}

fn any_term() -> impl Strategy<Value = Term> {
    term_with(&["x", "y", "z"])
}

fn ground_term() -> impl Strategy<Value = Term> {
    term_with(&[])
}

/// Replaces every subterm selected by `pick` with a fresh variable named `{prefix}{k}`.
fn generalise(t: &Term, pick: &mut impl FnMut() -> bool, prefix: &str, k: &mut usize, sigma: &mut Substitution) -> Term {
    if pick() {
        *k += 1;
        let v = Var::named(&format!("{prefix}{k}"));
        sigma.insert(v, t.clone());
        return Term::Var(v);
    }
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, args) => Term::app(*f, args.iter().map(|a| generalise(a, pick, prefix, k, sigma)).collect()),
    }
}

proptest! {
    #[test]
    fn replace_at_adjusts_size(t in any_term(), u in any_term(), pick in any::<prop::sample::Index>()) {
        let positions = t.positions();
        let p = pick.get(&positions);
        let old = t.subterm_at(p).unwrap().size();
        let r = t.replace_at(p, u.clone()).unwrap();
        prop_assert_eq!(r.size(), t.size() - old + u.size());
        prop_assert_eq!(r.subterm_at(p).unwrap(), &u);
    }

    #[test]
    fn unifiers_are_unifiers(s in any_term(), t in any_term()) {
        if let Some(sigma) = unify(&s, &t) {
            prop_assert_eq!(s.apply(&sigma), t.apply(&sigma));
        }
    }

    #[test]
    fn common_instances_unify(g in ground_term(), seed in any::<u64>()) {
        let mut state = seed;
        let mut coin = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 62 == 0
        };
        let (mut k1, mut k2) = (0, 0);
        let mut sigma = Substitution::new();
        let s = generalise(&g, &mut coin, "u", &mut k1, &mut sigma);
        let t = generalise(&g, &mut coin, "w", &mut k2, &mut sigma);
        let mgu = unify(&s, &t);
        prop_assert!(mgu.is_some(), "{:?} and {:?}", s, t);
        let mgu = mgu.unwrap();
        prop_assert_eq!(s.apply(&mgu), t.apply(&mgu));
        prop_assert_eq!(s.apply(&sigma), g.clone());
        prop_assert_eq!(t.apply(&sigma), g);
    }

    #[test]
    fn instances_match(l in any_term(), a in any_term(), b in any_term(), c in any_term()) {
        let sigma: Substitution = [("x", a), ("y", b), ("z", c)]
            .into_iter()
            .map(|(n, t)| (Var::named(n), t))
            .filter(|(v, _)| l.contains_var(*v))
            .collect();
        let inst = l.apply(&sigma);
        let found = match_term(&l, &inst);
        prop_assert!(found.is_some());
        prop_assert_eq!(l.apply(&found.unwrap()), inst);
    }

    #[test]
    fn renaming_apart_is_a_variant(t in any_term(), u in any_term()) {
        let mut gen = VarGen::avoiding([&t, &u]);
        let r = rename_apart(&t, &u.var_set(), &mut gen);
        prop_assert!(r.var_set().is_disjoint(&u.var_set()));
        prop_assert!(match_term(&t, &r).is_some());
        prop_assert!(match_term(&r, &t).is_some());
        prop_assert_eq!(r.size(), t.size());
    }

    #[test]
    fn positions_round_trip(t in any_term()) {
        for p in t.positions() {
            prop_assert_eq!(Position::parse(&p.to_string()), Some(p.clone()));
            prop_assert!(t.subterm_at(&p).is_ok());
        }
        prop_assert_eq!(t.positions().len(), t.size());
    }
}

#[test]
fn occurs_check_blocks_cycles() {
    let f = Symbol::new("g", 1);
    let x = Term::var("x");
    assert!(unify(&x, &Term::app(f, vec![x.clone()])).is_none());
}
