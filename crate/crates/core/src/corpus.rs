//! Bundled example systems.

use crate::trs::{parse_trs, Trs};

pub const DIV: &str = include_str!("../corpus/div.trs");
pub const DIFF: &str = include_str!("../corpus/diff.trs");
pub const GCD: &str = include_str!("../corpus/gcd.trs");
pub const EXP: &str = include_str!("../corpus/exp.trs");
pub const TOYAMA: &str = include_str!("../corpus/toyama.trs");
pub const DUP_SUM: &str = include_str!("../corpus/dup_sum.trs");
pub const LISTS: &str = include_str!("../corpus/lists.trs");
pub const DOUBLE: &str = include_str!("../corpus/double.trs");
pub const PAIRS: &str = include_str!("../corpus/pairs.trs");
pub const MINUS_F: &str = include_str!("../corpus/minus_f.trs");

pub const ALL: &[(&str, &str)] = &[
    ("div", DIV),
    ("diff", DIFF),
    ("gcd", GCD),
    ("exp", EXP),
    ("toyama", TOYAMA),
    ("dup_sum", DUP_SUM),
    ("lists", LISTS),
    ("double", DOUBLE),
    ("pairs", PAIRS),
    ("minus_f", MINUS_F),
];

/// Parses a bundled system by name.
pub fn load(name: &str) -> Option<Trs> {
    ALL.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_trs(text).expect("bundled system parses"))
}
