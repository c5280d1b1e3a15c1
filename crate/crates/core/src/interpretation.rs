//! Matrix interpretations over ℕ^d and the checks built on them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::replacement::ReplacementMap;
use crate::term::{Symbol, Term, Var};
use crate::trs::Rule;

/// Square matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    dim: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zero(dim: usize) -> Matrix {
        Matrix {
            dim,
            data: vec![0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Matrix {
        let mut m = Matrix::zero(dim);
        for i in 0..dim {
            m.set(i, i, 1);
        }
        m
    }

    /// Panics unless `rows` is square.
    pub fn from_rows(rows: &[Vec<u64>]) -> Matrix {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Matrix {
            dim,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn scalar(v: u64) -> Matrix {
        Matrix { dim: 1, data: vec![v] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.data.chunks(self.dim.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let d = self.dim;
        let mut out = Matrix::zero(d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0u64;
                for k in 0..d {
                    acc = acc.saturating_add(self.get(i, k).saturating_mul(other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.saturating_add(*b)).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        (0..self.dim)
            .map(|i| (0..self.dim).fold(0u64, |acc, k| acc.saturating_add(self.get(i, k).saturating_mul(v[k]))))
            .collect()
    }

    pub fn entrywise_max(&self, other: &Matrix) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a.max(b)).collect(),
        }
    }

    pub fn entrywise_le(&self, other: &Matrix) -> bool {
        self.data.iter().zip(&other.data).all(|(a, b)| a <= b)
    }

    pub fn is_unit(&self) -> bool {
        *self == Matrix::identity(self.dim)
    }

    /// Upper triangular with every diagonal entry at most one.
    pub fn is_triangular(&self) -> bool {
        (0..self.dim).all(|i| self.get(i, i) <= 1 && (0..i).all(|j| self.get(i, j) == 0))
    }

    pub fn pow(&self, n: u32) -> Matrix {
        let mut out = Matrix::identity(self.dim);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn vec_add(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x.saturating_add(*y)).collect()
}

fn vec_text(v: &[u64]) -> String {
    format!("[{}]", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymbolInterp {
    pub matrices: Vec<Matrix>,
    pub constant: Vec<u64>,
}

#[derive(Clone, PartialEq, Eq)]
pub struct MatrixInterpretation {
    dim: usize,
    symbols: BTreeMap<Symbol, SymbolInterp>,
}

impl MatrixInterpretation {
    pub fn new(dim: usize) -> MatrixInterpretation {
        assert!(dim >= 1, "dimension must be positive");
        MatrixInterpretation {
            dim,
            symbols: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&mut self, f: Symbol, matrices: Vec<Matrix>, constant: Vec<u64>) {
        assert_eq!(matrices.len(), f.arity(), "one matrix per argument of {f}");
        assert!(matrices.iter().all(|m| m.dim() == self.dim) && constant.len() == self.dim);
        self.symbols.insert(f, SymbolInterp { matrices, constant });
    }

    /// One-dimensional shorthand: `f(x1..xn) = c1·x1 + … + cn·xn + c`.
    pub fn set_linear(&mut self, f: Symbol, coefficients: &[u64], constant: u64) {
        assert_eq!(self.dim, 1);
        self.set(f, coefficients.iter().map(|&c| Matrix::scalar(c)).collect(), vec![constant]);
    }

    pub fn with_linear(mut self, f: Symbol, coefficients: &[u64], constant: u64) -> MatrixInterpretation {
        self.set_linear(f, coefficients, constant);
        self
    }

    pub fn get(&self, f: Symbol) -> Option<&SymbolInterp> {
        self.symbols.get(&f)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (Symbol, &SymbolInterp)> {
        self.symbols.iter().map(|(f, i)| (*f, i))
    }

    pub fn interprets(&self, f: Symbol) -> bool {
        self.symbols.contains_key(&f)
    }

    fn lookup(&self, f: Symbol) -> Result<&SymbolInterp> {
        self.symbols.get(&f).ok_or_else(|| Error::Uninterpreted(f.to_string()))
    }

    pub fn to_data(&self) -> InterpretationData {
        InterpretationData {
            dim: self.dim,
            symbols: self
                .symbols
                .iter()
                .map(|(f, i)| SymbolEntry {
                    name: f.to_string(),
                    arity: f.arity(),
                    matrices: i.matrices.iter().map(|m| m.rows()).collect(),
                    constant: i.constant.clone(),
                })
                .collect(),
        }
    }

    pub fn from_data(
        data: &InterpretationData,
        resolve: impl Fn(&str, usize) -> Option<Symbol>,
    ) -> Result<MatrixInterpretation> {
        if data.dim == 0 {
            return Err(Error::Certificate("dimension must be positive".into()));
        }
        let mut a = MatrixInterpretation::new(data.dim);
        for e in &data.symbols {
            let f = resolve(&e.name, e.arity)
                .ok_or_else(|| Error::Certificate(format!("unknown symbol {}/{}", e.name, e.arity)))?;
            let well_formed = e.matrices.len() == e.arity
                && e.constant.len() == data.dim
                && e.matrices.iter().all(|m| m.len() == data.dim && m.iter().all(|r| r.len() == data.dim));
            if !well_formed {
                return Err(Error::Dimension {
                    expected: data.dim,
                    found: e.constant.len(),
                });
            }
            a.set(f, e.matrices.iter().map(|m| Matrix::from_rows(m)).collect(), e.constant.clone());
        }
        Ok(a)
    }
}

impl fmt::Display for MatrixInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, i) in &self.symbols {
            let params: Vec<String> = (1..=g.arity()).map(|k| format!("x{k}")).collect();
            let mut parts: Vec<String> = i.matrices.iter().zip(&params).map(|(m, x)| format!("{m}*{x}")).collect();
            parts.push(vec_text(&i.constant));
            if params.is_empty() {
                writeln!(f, "{g}_A = {}", parts.join(" + "))?;
            } else {
                writeln!(f, "{g}_A({}) = {}", params.join(","), parts.join(" + "))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MatrixInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serializable form of an interpretation; symbols are referenced by display name and arity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpretationData {
    pub dim: usize,
    pub symbols: Vec<SymbolEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolEntry {
    pub name: String,
    pub arity: usize,
    pub matrices: Vec<Vec<Vec<u64>>>,
    pub constant: Vec<u64>,
}

/// `[t]` under the assignment mapping every variable to the zero vector.
pub fn evaluate(a: &MatrixInterpretation, t: &Term) -> Result<Vec<u64>> {
    evaluate_with(a, t, &|_| vec![0; a.dim])
}

pub fn evaluate_with(a: &MatrixInterpretation, t: &Term, alpha: &dyn Fn(Var) -> Vec<u64>) -> Result<Vec<u64>> {
    match t {
        Term::Var(v) => Ok(alpha(*v)),
        Term::App(f, args) => {
            let i = a.lookup(*f)?;
            let mut acc = i.constant.clone();
            for (m, arg) in i.matrices.iter().zip(args.iter()) {
                acc = vec_add(&acc, &m.mul_vec(&evaluate_with(a, arg, alpha)?));
            }
            Ok(acc)
        }
    }
}

/// `Σ C_x · x + c`; absent variables have coefficient zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearForm {
    pub coefficients: BTreeMap<Var, Matrix>,
    pub constant: Vec<u64>,
}

impl LinearForm {
    pub fn coefficient(&self, v: Var) -> Matrix {
        self.coefficients
            .get(&v)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.constant.len()))
    }

    pub fn eval(&self, alpha: &dyn Fn(Var) -> Vec<u64>) -> Vec<u64> {
        self.coefficients
            .iter()
            .fold(self.constant.clone(), |acc, (v, m)| vec_add(&acc, &m.mul_vec(&alpha(*v))))
    }
}

pub fn linear_form(a: &MatrixInterpretation, t: &Term) -> Result<LinearForm> {
    let mut lf = LinearForm {
        coefficients: BTreeMap::new(),
        constant: vec![0; a.dim],
    };
    accumulate(a, t, &Matrix::identity(a.dim), &mut lf)?;
    Ok(lf)
}

fn accumulate(a: &MatrixInterpretation, t: &Term, path: &Matrix, lf: &mut LinearForm) -> Result<()> {
    match t {
        Term::Var(v) => {
            let entry = lf.coefficients.entry(*v).or_insert_with(|| Matrix::zero(a.dim));
            *entry = entry.add(path);
        }
        Term::App(f, args) => {
            let i = a.lookup(*f)?;
            lf.constant = vec_add(&lf.constant, &path.mul_vec(&i.constant));
            for (m, arg) in i.matrices.iter().zip(args.iter()) {
                accumulate(a, arg, &path.mul(m), lf)?;
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderFlavor {
    Strict,
    Weak,
}

/// The vector order: strict compares the first component strictly and the rest weakly.
pub fn vector_greater(flavor: OrderFlavor, x: &[u64], y: &[u64]) -> bool {
    let rest = x.iter().zip(y).skip(1).all(|(a, b)| a >= b);
    match flavor {
        OrderFlavor::Strict => x[0] > y[0] && rest,
        OrderFlavor::Weak => x[0] >= y[0] && rest,
    }
}

/// Absolute positiveness: coefficient-wise domination plus the order on constants.
pub fn orients(a: &MatrixInterpretation, rule: &Rule, flavor: OrderFlavor) -> Result<bool> {
    let lvars = rule.lhs.var_set();
    if let Some(v) = rule.rhs.vars().into_iter().find(|v| !lvars.contains(v)) {
        return Err(Error::FreeVariable(format!("{v} in {rule}")));
    }
    let l = linear_form(a, &rule.lhs)?;
    let r = linear_form(a, &rule.rhs)?;
    let dominated = r.coefficients.iter().all(|(v, m)| m.entrywise_le(&l.coefficient(*v)));
    Ok(dominated && vector_greater(flavor, &l.constant, &r.constant))
}

pub fn is_mu_monotone(a: &MatrixInterpretation, mu: &ReplacementMap) -> bool {
    mu.iter()
        .all(|(f, i)| a.get(f).is_some_and(|s| s.matrices[i - 1].get(0, 0) >= 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub tmi: bool,
    pub rmi: bool,
    pub sli: bool,
    pub slmi: bool,
    pub adequate: bool,
}

pub fn classify(
    a: &MatrixInterpretation,
    constructors: &BTreeSet<Symbol>,
    compounds: &BTreeSet<Symbol>,
    mu: &ReplacementMap,
) -> ShapeReport {
    let all_matrices = || a.symbols.values().flat_map(|i| i.matrices.iter());
    let tmi = all_matrices().all(Matrix::is_triangular);
    let rmi = a
        .symbols
        .iter()
        .filter(|(f, _)| constructors.contains(f))
        .all(|(_, i)| i.matrices.iter().all(Matrix::is_triangular));
    let slmi = all_matrices().all(Matrix::is_unit);
    let sli = a.dim == 1 && slmi;
    let adequate = is_mu_monotone(a, mu)
        && compounds
            .iter()
            .all(|c| a.get(*c).is_some_and(|i| i.matrices.iter().all(Matrix::is_unit)));
    ShapeReport {
        tmi,
        rmi,
        sli,
        slmi,
        adequate,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegreeScope {
    AllSymbols,
    Only(BTreeSet<Symbol>),
}

/// Diagonal ones of the entry-wise maximum of the scoped matrices.
pub fn degree(a: &MatrixInterpretation, scope: &DegreeScope) -> Result<usize> {
    let mut max = Matrix::zero(a.dim);
    for (f, i) in &a.symbols {
        if let DegreeScope::Only(set) = scope {
            if !set.contains(f) {
                continue;
            }
        }
        for m in &i.matrices {
            if !m.is_triangular() {
                return Err(Error::NonTriangularScope);
            }
            max = max.entrywise_max(m);
        }
    }
    if matches!(scope, DegreeScope::Only(_)) && max.is_unit() {
        return Ok(1);
    }
    Ok((0..a.dim).filter(|&i| max.get(i, i) == 1).count())
}

/// `Δ = max (r⃗ ⊖ l⃗)_1`, defined only when every right coefficient is dominated by the left one.
pub fn weight_gap_delta(a: &MatrixInterpretation, pairs: &[Rule]) -> Option<u64> {
    let mut delta = 0;
    for p in pairs {
        let l = linear_form(a, &p.lhs).ok()?;
        let r = linear_form(a, &p.rhs).ok()?;
        if !r.coefficients.iter().all(|(v, m)| m.entrywise_le(&l.coefficient(*v))) {
            return None;
        }
        delta = delta.max(r.constant[0].saturating_sub(l.constant[0]));
    }
    Some(delta)
}

pub fn nonduplicating_slmi_gap(a: &MatrixInterpretation, strict: &[Rule]) -> Option<u64> {
    if strict.iter().any(Rule::is_duplicating) || !a.symbols.values().all(|i| i.matrices.iter().all(Matrix::is_unit)) {
        return None;
    }
    let mut delta = 0;
    for rule in strict {
        let l = evaluate(a, &rule.lhs).ok()?;
        let r = evaluate(a, &rule.rhs).ok()?;
        delta = delta.max(r[0].saturating_sub(l[0]));
    }
    Some(delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::dp::{weak_dependency_pairs, weak_innermost_dependency_pairs};
    use crate::replacement::usable_map;
    use crate::trs::Trs;

    fn sym(trs: &Trs, name: &str) -> Symbol {
        trs.symbol(name).unwrap()
    }

    fn div_a() -> (Trs, MatrixInterpretation) {
        let trs = corpus::load("div").unwrap();
        let a = MatrixInterpretation::new(1)
            .with_linear(sym(&trs, "0"), &[], 1)
            .with_linear(sym(&trs, "s"), &[1], 2)
            .with_linear(sym(&trs, "minus"), &[1, 0], 1)
            .with_linear(sym(&trs, "quot"), &[3, 0], 0);
        (trs, a)
    }

    #[test]
    fn div_example_interpretation() {
        let (trs, a) = div_a();
        assert_eq!(evaluate(&a, &trs.parse_term("s(s(0))").unwrap()).unwrap(), vec![5]);
        let t = trs.parse_term("quot(s(x), s(y))").unwrap();
        let lf = linear_form(&a, &t).unwrap();
        assert_eq!(lf.coefficient(Var::named("x")), Matrix::scalar(3));
        assert_eq!(lf.coefficient(Var::named("y")), Matrix::scalar(0));
        assert_eq!(lf.constant, vec![6]);
        for rule in trs.rules() {
            assert!(orients(&a, rule, OrderFlavor::Strict).unwrap(), "{rule}");
        }
        assert!(is_mu_monotone(&a, &usable_map(&trs)));
        let report = classify(&a, &trs.constructors(), &BTreeSet::new(), &usable_map(&trs));
        assert!(report.rmi && !report.sli && report.adequate);
        assert_eq!(degree(&a, &DegreeScope::Only(trs.constructors())).unwrap(), 1);
    }

    #[test]
    fn weak_but_not_strict() {
        let trs = corpus::load("div").unwrap();
        let a = MatrixInterpretation::new(1)
            .with_linear(sym(&trs, "0"), &[], 0)
            .with_linear(sym(&trs, "minus"), &[1, 0], 0);
        let rule = &trs.rules()[0];
        assert!(orients(&a, rule, OrderFlavor::Weak).unwrap());
        assert!(!orients(&a, rule, OrderFlavor::Strict).unwrap());
    }

    #[test]
    fn uninterpreted_symbol() {
        let (trs, _) = div_a();
        let a = MatrixInterpretation::new(1);
        assert!(matches!(evaluate(&a, &trs.parse_term("s(0)").unwrap()), Err(Error::Uninterpreted(_))));
    }

    #[test]
    fn duplicating_sum() {
        let trs = corpus::load("dup_sum").unwrap();
        let a = MatrixInterpretation::new(1)
            .with_linear(sym(&trs, "d"), &[1, 1, 1], 1)
            .with_linear(sym(&trs, "s"), &[1], 1)
            .with_linear(sym(&trs, "0"), &[], 0)
            .with_linear(sym(&trs, "f"), &[1, 1], 0);
        let lf = linear_form(&a, &trs.parse_term("d(y, y, y)").unwrap()).unwrap();
        assert_eq!(lf.coefficient(Var::named("y")), Matrix::scalar(3));
        let report = classify(&a, &trs.constructors(), &BTreeSet::new(), &ReplacementMap::new());
        assert!(report.sli);
        assert_eq!(weight_gap_delta(&a, &trs.rules()[..1]), None);
        assert_eq!(nonduplicating_slmi_gap(&a, &trs.rules()[..1]), None);
    }

    #[test]
    fn list_pair_six_has_no_gap() {
        let trs = corpus::load("lists").unwrap();
        let p = weak_innermost_dependency_pairs(&trs);
        let pt = p.pair_trs();
        let mut a = MatrixInterpretation::new(1)
            .with_linear(sym(&trs, "nil"), &[], 0)
            .with_linear(sym(&trs, "cons"), &[0, 1], 1)
            .with_linear(sym(&trs, "g"), &[2, 1], 1)
            .with_linear(sym(&trs, "f"), &[1], 0)
            .with_linear(sym(&trs, "f").sharped(), &[1], 0)
            .with_linear(sym(&trs, "g").sharped(), &[0, 0], 0);
        for c in p.compounds() {
            a.set_linear(*c, &vec![1; c.arity()], 0);
        }
        assert!(pt.rules().iter().all(|r| linear_form(&a, &r.rhs).is_ok()));
        let six = p.pair_of_display(6).unwrap();
        assert_eq!(weight_gap_delta(&a, &p.pairs()[six..=six]), None);
        for i in p.usable_rules() {
            assert!(orients(&a, &trs.rules()[i], OrderFlavor::Strict).unwrap());
        }
    }

    #[test]
    fn div_b_gap() {
        let trs = corpus::load("div").unwrap();
        let p = weak_dependency_pairs(&trs);
        let mut b = MatrixInterpretation::new(1)
            .with_linear(sym(&trs, "0"), &[], 0)
            .with_linear(sym(&trs, "s"), &[1], 2)
            .with_linear(sym(&trs, "minus"), &[1, 0], 1)
            .with_linear(sym(&trs, "minus").sharped(), &[1, 0], 1)
            .with_linear(sym(&trs, "quot").sharped(), &[1, 0], 1);
        for c in p.compounds() {
            b.set_linear(*c, &vec![1; c.arity()], 0);
        }
        assert_eq!(weight_gap_delta(&b, p.pairs()), Some(0));
    }

    #[test]
    fn degrees() {
        let trs = corpus::load("gcd").unwrap();
        let s = sym(&trs, "s");
        let mut a = MatrixInterpretation::new(2);
        a.set(s, vec![Matrix::from_rows(&[vec![1, 1], vec![0, 1]])], vec![1, 1]);
        let scope = DegreeScope::Only([s].into_iter().collect());
        assert_eq!(degree(&a, &scope).unwrap(), 2);
        a.set(s, vec![Matrix::from_rows(&[vec![1, 0], vec![0, 0]])], vec![1, 1]);
        assert_eq!(degree(&a, &scope).unwrap(), 1);
        a.set(s, vec![Matrix::from_rows(&[vec![1, 0], vec![1, 1]])], vec![1, 1]);
        assert!(matches!(degree(&a, &scope), Err(Error::NonTriangularScope)));
    }

    #[test]
    fn display_and_data_round_trip() {
        let (trs, a) = div_a();
        let text = a.to_string();
        assert!(text.contains("s_A(x1) = [[1]]*x1 + [2]"), "{text}");
        assert!(text.contains("0_A = [1]"));
        let back = MatrixInterpretation::from_data(&a.to_data(), |n, _| trs.symbol(n)).unwrap();
        assert_eq!(back, a);
    }
}
