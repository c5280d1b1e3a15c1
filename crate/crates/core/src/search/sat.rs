//! Bit-blasted naturals on top of a CDCL solver.

use std::collections::HashMap;

use batsat::{lbool, BasicCallbacks, Lit, Solver, SolverInterface, SolverOpts};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bit {
    Const(bool),
    Lit(Lit),
}

impl Bit {
    pub const TRUE: Bit = Bit::Const(true);
    pub const FALSE: Bit = Bit::Const(false);

    pub fn not(self) -> Bit {
        match self {
            Bit::Const(b) => Bit::Const(!b),
            Bit::Lit(l) => Bit::Lit(!l),
        }
    }
}

/// A natural number as little-endian bits together with a known upper bound.
#[derive(Clone, Debug)]
pub struct Num {
    pub bits: Vec<Bit>,
    pub max: u64,
}

pub fn width_for(max: u64) -> usize {
    (64 - max.leading_zeros()) as usize
}

impl Num {
    pub fn constant(v: u64) -> Num {
        Num {
            bits: (0..width_for(v)).map(|i| Bit::Const(v >> i & 1 == 1)).collect(),
            max: v,
        }
    }

    fn bit(&self, i: usize) -> Bit {
        self.bits.get(i).copied().unwrap_or(Bit::FALSE)
    }
}

pub struct Encoder {
    pub solver: Solver<BasicCallbacks>,
    ands: HashMap<(Lit, Lit), Lit>,
    xors: HashMap<(Lit, Lit), Lit>,
    unsat: bool,
}

impl Encoder {
    pub fn new(callbacks: BasicCallbacks) -> Encoder {
        Encoder {
            solver: Solver::new(SolverOpts::default(), callbacks),
            ands: HashMap::new(),
            xors: HashMap::new(),
            unsat: false,
        }
    }

    pub fn fresh(&mut self) -> Lit {
        Lit::new(self.solver.new_var_default(), true)
    }

    pub fn clause(&mut self, bits: &[Bit]) {
        if bits.contains(&Bit::TRUE) {
            return;
        }
        let mut lits: Vec<Lit> = bits
            .iter()
            .filter_map(|b| match b {
                Bit::Lit(l) => Some(*l),
                Bit::Const(_) => None,
            })
            .collect();
        if lits.is_empty() {
            self.unsat = true;
            return;
        }
        if !self.solver.add_clause_reuse(&mut lits) {
            self.unsat = true;
        }
    }

    pub fn assert(&mut self, b: Bit) {
        self.clause(&[b]);
    }

    pub fn and(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(false), _) | (_, Bit::Const(false)) => Bit::FALSE,
            (Bit::Const(true), x) | (x, Bit::Const(true)) => x,
            (Bit::Lit(x), Bit::Lit(y)) => {
                if x == y {
                    return a;
                }
                if x == !y {
                    return Bit::FALSE;
                }
                let key = if x < y { (x, y) } else { (y, x) };
                if let Some(&c) = self.ands.get(&key) {
                    return Bit::Lit(c);
                }
                let c = self.fresh();
                self.clause(&[Bit::Lit(!c), Bit::Lit(x)]);
                self.clause(&[Bit::Lit(!c), Bit::Lit(y)]);
                self.clause(&[Bit::Lit(c), Bit::Lit(!x), Bit::Lit(!y)]);
                self.ands.insert(key, c);
                Bit::Lit(c)
            }
        }
    }

    pub fn or(&mut self, a: Bit, b: Bit) -> Bit {
        self.and(a.not(), b.not()).not()
    }

    pub fn or_all(&mut self, bits: &[Bit]) -> Bit {
        bits.iter().fold(Bit::FALSE, |acc, b| self.or(acc, *b))
    }

    pub fn and_all(&mut self, bits: &[Bit]) -> Bit {
        bits.iter().fold(Bit::TRUE, |acc, b| self.and(acc, *b))
    }

    pub fn xor(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(p), x) | (x, Bit::Const(p)) => {
                if p {
                    x.not()
                } else {
                    x
                }
            }
            (Bit::Lit(x), Bit::Lit(y)) => {
                if x == y {
                    return Bit::FALSE;
                }
                if x == !y {
                    return Bit::TRUE;
                }
                let key = if x < y { (x, y) } else { (y, x) };
                if let Some(&c) = self.xors.get(&key) {
                    return Bit::Lit(c);
                }
                let c = self.fresh();
                self.clause(&[Bit::Lit(!c), Bit::Lit(x), Bit::Lit(y)]);
                self.clause(&[Bit::Lit(!c), Bit::Lit(!x), Bit::Lit(!y)]);
                self.clause(&[Bit::Lit(c), Bit::Lit(!x), Bit::Lit(y)]);
                self.clause(&[Bit::Lit(c), Bit::Lit(x), Bit::Lit(!y)]);
                self.xors.insert(key, c);
                Bit::Lit(c)
            }
        }
    }

    /// A fresh unknown in `0..=max`.
    pub fn unknown(&mut self, max: u64) -> Num {
        let bits: Vec<Bit> = (0..width_for(max)).map(|_| Bit::Lit(self.fresh())).collect();
        let n = Num { bits, max };
        if max + 1 != 1u64 << width_for(max) {
            let ok = self.le_const(&n, max);
            self.assert(ok);
        }
        n
    }

    fn le_const(&mut self, n: &Num, c: u64) -> Bit {
        let k = Num::constant(c);
        self.ge(&k, n)
    }

    pub fn add(&mut self, a: &Num, b: &Num) -> Num {
        let max = a.max.saturating_add(b.max);
        let w = width_for(max);
        let mut bits = Vec::with_capacity(w);
        let mut carry = Bit::FALSE;
        for i in 0..w {
            let (x, y) = (a.bit(i), b.bit(i));
            let xy = self.xor(x, y);
            bits.push(self.xor(xy, carry));
            let c1 = self.and(x, y);
            let c2 = self.and(xy, carry);
            carry = self.or(c1, c2);
        }
        Num { bits, max }
    }

    pub fn sum(&mut self, nums: &[Num]) -> Num {
        match nums.len() {
            0 => Num::constant(0),
            1 => nums[0].clone(),
            n => {
                let (l, r) = nums.split_at(n / 2);
                let a = self.sum(l);
                let b = self.sum(r);
                self.add(&a, &b)
            }
        }
    }

    pub fn mul(&mut self, a: &Num, b: &Num) -> Num {
        let max = a.max.saturating_mul(b.max);
        let w = width_for(max);
        let mut partials = Vec::new();
        for (i, bi) in b.bits.iter().enumerate() {
            if *bi == Bit::FALSE {
                continue;
            }
            let mut bits = vec![Bit::FALSE; i];
            for aj in &a.bits {
                bits.push(self.and(*aj, *bi));
            }
            bits.truncate(w);
            let pmax = a.max.saturating_mul(1u64 << i).min(max);
            partials.push(Num { bits, max: pmax });
        }
        let mut s = self.sum(&partials);
        s.bits.truncate(w);
        s.max = max;
        s
    }

    pub fn mul_const(&mut self, a: &Num, c: u64) -> Num {
        let k = Num::constant(c);
        self.mul(a, &k)
    }

    fn compare(&mut self, a: &Num, b: &Num, strict: bool) -> Bit {
        let w = a.bits.len().max(b.bits.len());
        let mut acc = Bit::Const(!strict);
        for i in 0..w {
            let (x, y) = (a.bit(i), b.bit(i));
            let gt = self.and(x, y.not());
            let eq = self.xor(x, y).not();
            let keep = self.and(eq, acc);
            acc = self.or(gt, keep);
        }
        acc
    }

    pub fn ge(&mut self, a: &Num, b: &Num) -> Bit {
        self.compare(a, b, false)
    }

    pub fn gt(&mut self, a: &Num, b: &Num) -> Bit {
        self.compare(a, b, true)
    }

    /// `Some(true)` when satisfiable, `Some(false)` when not, `None` when interrupted.
    pub fn solve(&mut self) -> Option<bool> {
        if self.unsat {
            return Some(false);
        }
        let r = self.solver.solve_limited(&[]);
        if r == lbool::TRUE {
            Some(true)
        } else if r == lbool::FALSE {
            Some(false)
        } else {
            None
        }
    }

    pub fn value(&self, n: &Num) -> u64 {
        n.bits.iter().enumerate().fold(0, |acc, (i, b)| {
            let set = match b {
                Bit::Const(v) => *v,
                Bit::Lit(l) => self.solver.value_lit(*l) == lbool::TRUE,
            };
            if set {
                acc | 1 << i
            } else {
                acc
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(f: impl Fn(&mut Encoder, &Num, &Num) -> Bit, expect: impl Fn(u64, u64) -> bool) {
        for a in 0..=5u64 {
            for b in 0..=5u64 {
                let mut e = Encoder::new(BasicCallbacks::new());
                let x = e.unknown(5);
                let y = e.unknown(5);
                let ka = Num::constant(a);
                let kb = Num::constant(b);
                let ex = e.ge(&x, &ka);
                let ey = e.ge(&ka, &x);
                e.assert(ex);
                e.assert(ey);
                let fx = e.ge(&y, &kb);
                let fy = e.ge(&kb, &y);
                e.assert(fx);
                e.assert(fy);
                let r = f(&mut e, &x, &y);
                e.assert(r);
                assert_eq!(e.solve(), Some(expect(a, b)), "{a} {b}");
            }
        }
    }

    #[test]
    fn comparisons() {
        check(|e, x, y| e.gt(x, y), |a, b| a > b);
        check(|e, x, y| e.ge(x, y), |a, b| a >= b);
    }

    #[test]
    fn arithmetic() {
        check(
            |e, x, y| {
                let p = e.mul(x, y);
                let s = e.add(x, y);
                let k = Num::constant(7);
                let q = e.add(&p, &s);
                let r = e.mul_const(&q, 3);
                let target = e.mul_const(&k, 3);
                let a = e.ge(&r, &target);
                let b = e.ge(&target, &r);
                e.and(a, b)
            },
            |a, b| a * b + a + b == 7,
        );
    }

    #[test]
    fn bounded_unknown() {
        let mut e = Encoder::new(BasicCallbacks::new());
        let x = e.unknown(2);
        let k = Num::constant(3);
        let g = e.ge(&x, &k);
        e.assert(g);
        assert_eq!(e.solve(), Some(false));
    }
}
