//! Polynomial runtime complexity analysis for term rewrite systems.
//!
//! Bounds are certified by matrix interpretations, applied directly or
//! after a weak dependency pair transformation, optionally refined by
//! path analysis over the estimated dependency graph.

pub mod certificate;
pub mod cli;
pub mod corpus;
pub mod dp;
pub mod error;
pub mod graph;
pub mod interpretation;
pub mod pipeline;
pub mod replacement;
pub mod rewrite;
pub mod search;
pub mod term;
pub mod trs;

pub use error::{Error, Result};
pub use term::{match_term, unify, Position, Substitution, Symbol, Term, Var, VarGen};
pub use trs::{parse_trs, print_trs, Rule, Strategy, Trs};
