//! Evaluates a hand-written matrix interpretation: orientation, linear forms, degree and weight gap.

use rtc::corpus;
use rtc::dp::weak_dependency_pairs;
use rtc::interpretation::{
    degree, evaluate, linear_form, orients, weight_gap_delta, DegreeScope, Matrix, MatrixInterpretation, OrderFlavor,
};

fn main() {
    let trs = corpus::load("div").unwrap();
    let s = |n: &str| trs.symbol(n).unwrap();

    let mut a = MatrixInterpretation::new(2);
    a.set(s("0"), vec![], vec![0, 0]);
    a.set(s("s"), vec![Matrix::identity(2)], vec![3, 1]);
    a.set(s("minus"), vec![Matrix::identity(2), Matrix::zero(2)], vec![1, 0]);
    a.set(s("quot"), vec![Matrix::from_rows(&[vec![3, 0], vec![0, 1]]), Matrix::from_rows(&[vec![1, 0], vec![0, 0]])], vec![2, 0]);

    for rule in trs.rules() {
        let strict = orients(&a, rule, OrderFlavor::Strict).unwrap();
        let weak = orients(&a, rule, OrderFlavor::Weak).unwrap();
        println!("{rule}: strict {strict}, weak {weak}");
        println!("  lhs = {:?}", linear_form(&a, &rule.lhs).unwrap());
    }
    let t = trs.parse_term("quot(s(s(s(0))), s(0))").unwrap();
    println!("[{t}] = {:?}", evaluate(&a, &t).unwrap());
    let constructors: std::collections::BTreeSet<_> = trs.signature().iter().copied().filter(|f| !trs.is_defined(*f)).collect();
    println!("degree over constructors: {}", degree(&a, &DegreeScope::Only(constructors)).unwrap());

    let p = weak_dependency_pairs(&trs);
    let mut b = MatrixInterpretation::new(1)
        .with_linear(s("0"), &[], 0)
        .with_linear(s("s"), &[1], 2)
        .with_linear(s("minus"), &[1, 0], 1)
        .with_linear(s("minus").sharped(), &[1, 0], 1)
        .with_linear(s("quot").sharped(), &[1, 0], 1);
    for c in p.compounds() {
        b.set_linear(*c, &vec![1; c.arity()], 0);
    }
    println!("weight gap over WDP: {:?}", weight_gap_delta(&b, p.pairs()));
}
